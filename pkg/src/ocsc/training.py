"""Training loops: online streaming, full batch, and the FISTA-dictionary mode.

The online trainer is the centerpiece: each incoming sample is coded against
the current feasible dictionary, folded into the constant-size history, and
followed by a few inner dictionary ADMM rounds. Memory never grows with the
number of samples; batch mode stores all codes and alternates full sweeps.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import dense_history, fista_dict_update
from .coding import CodeState, CodingConfig, coding_objective, infer_code
from .dictionary import (
    DictState,
    HistoryState,
    batch_history,
    dict_state_from_filters,
    empty_history,
    update_dictionary,
    update_history,
)
from .errors import ShapeMismatchError
from .evaluate import EvalResult, evaluate_dictionary
from .transforms import (
    SignalShape,
    crop_filter_cols,
    forward_dft,
    forward_dft_cols,
    inverse_dft_cols,
)


@dataclass(frozen=True)
class TrainConfig:
    """Shared knobs for every training mode."""

    n_filters: int = 100
    beta: float = 1.0
    rho_code: float = 1.0
    rho_dict: float = 10.0
    inner_iters: int = 10       # dictionary ADMM rounds per online sample
    max_passes: int = 10
    stop_tol: float = 1e-3
    seed: int = 0
    code_max_iters: int = 300
    code_rel_tol: float = 1e-3
    batch_dict_iters: int = 200  # cap for the to-convergence batch update
    batch_dict_tol: float = 1e-4
    fista_iters: int = 100       # dictionary FISTA steps per outer sweep
    mode: str = "online"

    def coding(self) -> CodingConfig:
        return CodingConfig(
            beta=self.beta,
            rho=self.rho_code,
            max_iters=self.code_max_iters,
            rel_tol=self.code_rel_tol,
        )


@dataclass
class PassRecord:
    """One row of the training log (one pass / outer iteration)."""

    index: int
    time_s: float              # cumulative training seconds, evaluation excluded
    train_obj: float
    test_obj: float | None
    psnr: float | None
    history_bytes: int
    snapshot_id: str


@dataclass
class TrainReport:
    """Everything a run produces besides the dictionary file itself."""

    config: TrainConfig
    shape: SignalShape
    records: list[PassRecord] = field(default_factory=list)
    filters: np.ndarray | None = None    # (M, K) final spatial dictionary
    stopped_early: bool = False


def init_dictionary(shape: SignalShape, n_filters: int, seed: int) -> np.ndarray:
    """Seeded Gaussian filters scaled to exactly unit l2 norm, (M, K)."""
    rng = np.random.default_rng(seed)
    filters = rng.normal(size=(shape.filter_size, n_filters))
    return filters / np.linalg.norm(filters, axis=0)


def _snapshot_id(filters: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(filters).tobytes()).hexdigest()[:12]


class OnlineTrainer:
    """Streaming trainer; one `step` per incoming sample.

    Exposes the pieces the training loop and the benchmarks need: the
    feasible coding dictionary, the history, and per-step change metrics.
    """

    def __init__(self, shape: SignalShape, config: TrainConfig):
        self.shape = shape
        self.config = config
        self.coding_config = config.coding()
        filters = init_dictionary(shape, config.n_filters, config.seed)
        self.initial_filters = filters
        self.dict_state: DictState = dict_state_from_filters(filters, shape)
        # coding always sees the feasible spatial copy's spectrum
        self.working_freq = self.dict_state.freq.copy()
        self.history: HistoryState = empty_history(
            shape, config.n_filters, rho=config.rho_dict
        )
        self.rng = np.random.default_rng(config.seed)
        self._prev_code: np.ndarray | None = None
        self._prev_filters = filters.copy()
        self.code_change = np.inf
        self.dict_change = np.inf
        self.last_objective = np.nan

    def step(self, x) -> CodeState:
        """Code one sample, absorb it into the history, refresh the dictionary."""
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != self.shape.size:
            raise ShapeMismatchError(
                f"sample has {x.size} entries, expected {self.shape.size}"
            )
        state = infer_code(x, self.working_freq, self.shape, self.coding_config)
        self.last_objective = coding_objective(
            x, self.working_freq, state.code, self.shape, self.config.beta
        )
        committed = forward_dft_cols(state.code, self.shape)
        update_history(self.history, committed, forward_dft(x, self.shape))
        self.dict_state = update_dictionary(
            self.dict_state, self.history, self.config.inner_iters
        )
        self.working_freq = forward_dft_cols(self.dict_state.v, self.shape)

        if self._prev_code is not None:
            num = np.linalg.norm(state.code - self._prev_code)
            self.code_change = num / max(np.linalg.norm(state.code), 1e-12)
        self._prev_code = state.code
        filters = crop_filter_cols(self.dict_state.v, self.shape)
        self.dict_change = np.linalg.norm(filters - self._prev_filters) / max(
            np.linalg.norm(filters), 1e-12
        )
        self._prev_filters = filters
        return state

    def converged(self) -> bool:
        tol = self.config.stop_tol
        return self.code_change < tol and self.dict_change < tol

    def coding_filters(self) -> np.ndarray:
        """The feasible filters coding currently uses, (M, K)."""
        return crop_filter_cols(self.dict_state.v, self.shape)

    def final_filters(self) -> np.ndarray:
        """Crop of the inverse-transformed spectrum rows, (M, K)."""
        return crop_filter_cols(
            inverse_dft_cols(self.dict_state.freq, self.shape), self.shape
        )


def _evaluate_pass(filters, test_samples, shape, coding) -> EvalResult | None:
    if test_samples is None:
        return None
    return evaluate_dictionary(filters, test_samples, shape, coding)


def train_online(
    samples,
    shape: SignalShape,
    config: TrainConfig,
    test_samples=None,
) -> TrainReport:
    """Stream the corpus in shuffled passes until both change metrics settle."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    trainer = OnlineTrainer(shape, config)
    report = TrainReport(config=config, shape=shape)
    if samples.size == 0:
        report.filters = trainer.coding_filters()
        return report
    train_seconds = 0.0
    for pass_idx in range(1, config.max_passes + 1):
        order = trainer.rng.permutation(samples.shape[0])
        objectives = []
        tic = time.perf_counter()
        stopped = False
        for idx in order:
            trainer.step(samples[idx])
            objectives.append(trainer.last_objective)
            if trainer.converged():
                stopped = True
                break
        train_seconds += time.perf_counter() - tic
        filters = trainer.final_filters()
        result = _evaluate_pass(
            trainer.coding_filters(), test_samples, shape, config.coding()
        )
        report.records.append(
            PassRecord(
                index=pass_idx,
                time_s=train_seconds,
                train_obj=float(np.mean(objectives)),
                test_obj=None if result is None else result.test_objective,
                psnr=None if result is None else result.psnr,
                history_bytes=trainer.history.nbytes,
                snapshot_id=_snapshot_id(filters),
            )
        )
        if stopped:
            report.stopped_early = True
            break
    report.filters = trainer.final_filters()
    return report


def _code_all(samples, dict_freq, shape, coding, warm_states):
    states = []
    for i, x in enumerate(samples):
        warm = warm_states[i] if warm_states is not None else None
        states.append(infer_code(x, dict_freq, shape, coding, warm=warm))
    return states


def train_batch(
    samples,
    shape: SignalShape,
    config: TrainConfig,
    test_samples=None,
) -> TrainReport:
    """Alternate coding the whole corpus and a to-convergence dictionary solve."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    coding = config.coding()
    filters = init_dictionary(shape, config.n_filters, config.seed)
    dict_state = dict_state_from_filters(filters, shape)
    report = TrainReport(config=config, shape=shape)
    if samples.size == 0:
        report.filters = filters
        return report
    working = dict_state.freq.copy()
    x_freqs = np.stack([forward_dft(x, shape) for x in samples])

    states: list[CodeState] | None = None
    prev_filters = filters
    train_seconds = 0.0
    for outer in range(1, config.max_passes + 1):
        tic = time.perf_counter()
        new_states = _code_all(samples, working, shape, coding, states)
        code_change = 0.0
        if states is not None:
            changes = [
                np.linalg.norm(new.code - old.code)
                / max(np.linalg.norm(new.code), 1e-12)
                for new, old in zip(new_states, states)
            ]
            code_change = float(np.mean(changes))
        states = new_states

        z_freqs = np.stack([forward_dft_cols(s.code, shape) for s in states])
        history = batch_history(z_freqs, x_freqs, shape, rho=config.rho_dict)
        dict_state = update_dictionary(
            dict_state,
            history,
            config.batch_dict_iters,
            tol=config.batch_dict_tol,
        )
        working = forward_dft_cols(dict_state.v, shape)
        train_seconds += time.perf_counter() - tic

        filters = crop_filter_cols(dict_state.v, shape)
        dict_change = np.linalg.norm(filters - prev_filters) / max(
            np.linalg.norm(filters), 1e-12
        )
        prev_filters = filters
        train_objs = [
            coding_objective(x, working, s.code, shape, config.beta)
            for x, s in zip(samples, states)
        ]
        result = _evaluate_pass(filters, test_samples, shape, coding)
        final = crop_filter_cols(inverse_dft_cols(dict_state.freq, shape), shape)
        report.records.append(
            PassRecord(
                index=outer,
                time_s=train_seconds,
                train_obj=float(np.mean(train_objs)),
                test_obj=None if result is None else result.test_objective,
                psnr=None if result is None else result.psnr,
                history_bytes=history.nbytes,
                snapshot_id=_snapshot_id(final),
            )
        )
        if outer > 1 and code_change < config.stop_tol and dict_change < config.stop_tol:
            report.stopped_early = True
            break
    report.filters = crop_filter_cols(inverse_dft_cols(dict_state.freq, shape), shape)
    return report


def train_fista_dict(
    samples,
    shape: SignalShape,
    config: TrainConfig,
    test_samples=None,
) -> TrainReport:
    """Batch alternation with the projected-FISTA dictionary step."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    coding = config.coding()
    filters = init_dictionary(shape, config.n_filters, config.seed)
    report = TrainReport(config=config, shape=shape)
    if samples.size == 0:
        report.filters = filters
        return report
    working = dict_state_from_filters(filters, shape).freq
    x_freqs = np.stack([forward_dft(x, shape) for x in samples])

    states: list[CodeState] | None = None
    prev_filters = filters
    train_seconds = 0.0
    for outer in range(1, config.max_passes + 1):
        tic = time.perf_counter()
        new_states = _code_all(samples, working, shape, coding, states)
        code_change = 0.0
        if states is not None:
            changes = [
                np.linalg.norm(new.code - old.code)
                / max(np.linalg.norm(new.code), 1e-12)
                for new, old in zip(new_states, states)
            ]
            code_change = float(np.mean(changes))
        states = new_states

        z_freqs = np.stack([forward_dft_cols(s.code, shape) for s in states])
        history = dense_history(z_freqs, x_freqs, shape)
        working, _ = fista_dict_update(history, working, config.fista_iters)
        train_seconds += time.perf_counter() - tic

        filters = crop_filter_cols(inverse_dft_cols(working, shape), shape)
        dict_change = np.linalg.norm(filters - prev_filters) / max(
            np.linalg.norm(filters), 1e-12
        )
        prev_filters = filters
        train_objs = [
            coding_objective(x, working, s.code, shape, config.beta)
            for x, s in zip(samples, states)
        ]
        result = _evaluate_pass(filters, test_samples, shape, coding)
        report.records.append(
            PassRecord(
                index=outer,
                time_s=train_seconds,
                train_obj=float(np.mean(train_objs)),
                test_obj=None if result is None else result.test_objective,
                psnr=None if result is None else result.psnr,
                history_bytes=history.cross.nbytes + history.gram.nbytes,
                snapshot_id=_snapshot_id(filters),
            )
        )
        if outer > 1 and code_change < config.stop_tol and dict_change < config.stop_tol:
            report.stopped_early = True
            break
    report.filters = prev_filters
    return report


def train(mode: str, samples, shape, config, test_samples=None) -> TrainReport:
    """Dispatch on mode: online, batch, or fista-dict."""
    runner = {
        "online": train_online,
        "batch": train_batch,
        "fista-dict": train_fista_dict,
    }.get(mode)
    if runner is None:
        raise ValueError(f"unknown training mode: {mode!r}")
    return runner(samples, shape, replace(config, mode=mode), test_samples)
