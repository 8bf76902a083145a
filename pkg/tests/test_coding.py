"""Sparse coding tests: closed-form row solves and lasso-oracle equivalence."""

import numpy as np
import pytest

from ocsc import (
    CodingConfig,
    DivergenceError,
    SignalShape,
    coding_objective,
    forward_dft_cols,
    infer_code,
    pad_filter_cols,
    reconstruct,
    soft_threshold,
    solve_code_rows,
)


def prox_grid_oracle(v: float, t: float) -> float:
    """Brute-force prox of t|.| at v by scanning a fine grid."""
    grid = np.linspace(-abs(v) - 1.0, abs(v) + 1.0, 400001)
    vals = 0.5 * (grid - v) ** 2 + t * np.abs(grid)
    return float(grid[np.argmin(vals)])


def circulant_design(filters, shape):
    """Explicit (P, P*K) design whose columns are circular filter shifts."""
    p = shape.size
    cols = []
    for k in range(filters.shape[1]):
        padded = np.zeros(p)
        padded[: filters.shape[0]] = filters[:, k]
        for m in range(p):
            cols.append(np.roll(padded, m))
    return np.array(cols).T


def lasso_cd_oracle(design, x, beta, sweeps=200000, tol=1e-13):
    """Cyclic coordinate descent on 0.5||x - Bw||^2 + beta||w||_1."""
    n = design.shape[1]
    w = np.zeros(n)
    col_sq = np.einsum("ij,ij->j", design, design)
    resid = x.copy()
    for _ in range(sweeps):
        biggest = 0.0
        for j in range(n):
            old = w[j]
            rho_j = design[:, j] @ resid + col_sq[j] * old
            new = np.sign(rho_j) * max(abs(rho_j) - beta, 0.0) / col_sq[j]
            if new != old:
                resid -= design[:, j] * (new - old)
                w[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest < tol:
            break
    return w


class TestSoftThreshold:
    def test_matches_grid_prox(self):
        rng = np.random.default_rng(21)
        for _ in range(12):
            v = float(rng.normal() * 3)
            t = float(rng.uniform(0.01, 2.0))
            assert abs(soft_threshold(v, t) - prox_grid_oracle(v, t)) < 2e-5

    def test_exact_zero_band(self):
        assert soft_threshold(np.array([0.3, -0.5, 0.0]), 0.5).tolist() == [0.0, 0.0, 0.0]

    def test_shrinks_toward_zero(self):
        out = soft_threshold(np.array([2.0, -3.0]), 0.5)
        assert np.allclose(out, [1.5, -2.5])


class TestSolveCodeRows:
    def test_matches_dense_inverse(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            k = int(rng.integers(1, 6))
            rho = float(rng.uniform(0.2, 4.0))
            d = rng.normal(size=k) + 1j * rng.normal(size=k)
            x = complex(rng.normal(), rng.normal())
            u = rng.normal(size=k) + 1j * rng.normal(size=k)
            got = solve_code_rows(d[None, :], np.array([x]), u[None, :], rho)[0]
            normal = np.outer(d.conj(), d) + rho * np.eye(k)
            expect = np.linalg.solve(normal, d.conj() * x + rho * u)
            assert np.abs(got - expect).max() < 1e-10

    def test_single_filter_closed_form(self):
        d = np.array([[1.0 + 2.0j]])
        x = np.array([3.0 - 1.0j])
        u = np.array([[0.5 + 0.5j]])
        rho = 2.0
        got = solve_code_rows(d, x, u, rho)[0, 0]
        expect = (d[0, 0].conjugate() * x[0] + rho * u[0, 0]) / (abs(d[0, 0]) ** 2 + rho)
        assert abs(got - expect) < 1e-12

    def test_zero_dictionary_row_returns_target(self):
        u = np.array([[1.0 + 1.0j, -2.0j]])
        got = solve_code_rows(np.zeros((1, 2), complex), np.array([5.0 + 0j]), u, 3.0)
        assert np.abs(got - u).max() < 1e-14


def _random_instance(seed, p=8, k=2, m=3):
    rng = np.random.default_rng(seed)
    shape = SignalShape((p,), (m,))
    filters = rng.normal(size=(m, k))
    filters /= np.linalg.norm(filters, axis=0)
    x = rng.normal(size=p)
    dict_freq = forward_dft_cols(pad_filter_cols(filters, shape), shape)
    return shape, filters, dict_freq, x


class TestInferCode:
    def test_zero_signal_gives_zero_code(self):
        shape, _, dict_freq, _ = _random_instance(30)
        state = infer_code(np.zeros(8), dict_freq, shape)
        assert np.all(state.code == 0.0)

    def test_huge_beta_gives_zero_code(self):
        shape, _, dict_freq, x = _random_instance(31)
        state = infer_code(x, dict_freq, shape, CodingConfig(beta=1e6))
        assert np.all(state.code == 0.0)

    def test_code_is_exactly_sparse(self):
        shape, _, dict_freq, x = _random_instance(32)
        state = infer_code(x, dict_freq, shape, CodingConfig(beta=0.5))
        assert np.any(state.code == 0.0)

    def test_matches_lasso_oracle(self):
        # objective parity with coordinate descent on the explicit circulant
        # design, both beta regimes
        for seed in (40, 41, 42):
            for beta in (0.05, 0.5):
                shape, filters, dict_freq, x = _random_instance(seed)
                cfg = CodingConfig(beta=beta, rel_tol=1e-7, max_iters=4000)
                state = infer_code(x, dict_freq, shape, cfg)
                ours = coding_objective(x, dict_freq, state.code, shape, beta)
                design = circulant_design(filters, shape)
                w = lasso_cd_oracle(design, x, beta)
                oracle = 0.5 * float(np.sum((x - design @ w) ** 2)) + beta * float(
                    np.abs(w).sum()
                )
                assert ours <= oracle + 1e-4
                assert abs(ours - oracle) < 1e-4

    def test_objective_settles_monotone(self):
        shape, _, dict_freq, x = _random_instance(43)
        x = x / np.linalg.norm(x)
        trace = []
        infer_code(
            x,
            dict_freq,
            shape,
            CodingConfig(beta=0.1, rel_tol=0.0, max_iters=60),
            monitor=lambda it, code: trace.append(
                coding_objective(x, dict_freq, code, shape, 0.1)
            ),
        )
        for prev, nxt in zip(trace[3:], trace[4:]):
            assert nxt <= prev + 1e-6

    def test_warm_start_not_slower(self):
        shape, _, dict_freq, x = _random_instance(44)
        cfg = CodingConfig(beta=0.3)
        cold = infer_code(x, dict_freq, shape, cfg)
        warm = infer_code(x, dict_freq, shape, cfg, warm=cold)
        assert warm.iterations <= cold.iterations

    def test_primal_gap_small_at_convergence(self):
        from ocsc import inverse_dft_cols

        shape, _, dict_freq, x = _random_instance(45)
        cfg = CodingConfig(beta=0.2, rel_tol=1e-8, max_iters=5000)
        state = infer_code(x, dict_freq, shape, cfg)
        gap = np.abs(state.code - inverse_dft_cols(state.z_freq, shape)).max()
        assert gap < 1e-4

    def test_divergence_reported_with_iteration(self):
        shape, _, dict_freq, x = _random_instance(46)
        x = x.copy()
        x[0] = np.nan
        with pytest.raises(DivergenceError, match="iteration"):
            infer_code(x, dict_freq, shape)

    def test_reconstruct_matches_convolution_sum(self):
        from ocsc import circular_convolve

        shape, filters, dict_freq, x = _random_instance(47)
        state = infer_code(x, dict_freq, shape, CodingConfig(beta=0.1))
        rec = reconstruct(dict_freq, state.code, shape)
        direct = sum(
            circular_convolve(filters[:, k], state.code[:, k], shape)
            for k in range(filters.shape[1])
        )
        assert np.abs(rec - direct).max() < 1e-10
