"""Command-line front end: train, eval, reconstruct, mosaic, synth.

A plain key=value config file can supply any flag; explicit flags win.
Exit codes: 0 success, 2 usage problems, 3 data problems, 4 numerical
divergence.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .coding import CodingConfig, infer_code, reconstruct
from .errors import (
    DataFileError,
    DivergenceError,
    NumericalConsistencyError,
    ShapeMismatchError,
    UndefinedVarianceError,
)
from .evaluate import evaluate_dictionary, export_mosaic
from .persistence import (
    SAMPLE_MAGIC,
    load_dictionary,
    load_sample,
    save_dictionary,
    save_sample,
)
from .preprocessing import PreprocessSpec, load_image, preprocess
from .synthetic import synth_generate
from .training import TrainConfig, TrainReport, train
from .transforms import SignalShape, forward_dft_cols, pad_filter_cols

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
_REQUIRED = object()


class UsageError(Exception):
    pass


def _parse_extents(text: str) -> tuple[int, ...]:
    """'11' -> (11,); '8x8' -> (8, 8)."""
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse extents {text!r}; use N or NxM") from None
    if len(dims) not in (1, 2) or any(d <= 0 for d in dims):
        raise UsageError(f"bad extents {text!r}; use N or NxM with positive sizes")
    return dims


def _read_config(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, value = key.strip(), value.strip()
        if key in entries and entries[key] != value:
            raise UsageError(
                f"{path}:{lineno}: conflicting values for {key!r} "
                f"({entries[key]!r} vs {value!r})"
            )
        entries[key] = value
    return entries


def _resolve(args, spec: dict[str, tuple]) -> dict:
    """Merge CLI flags over config entries over defaults; flags win."""
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    unknown = sorted(set(config) - set(spec))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    out = {}
    for name, (parse, default) in spec.items():
        cli_value = getattr(args, name.replace("-", "_"))
        if cli_value is not None:
            out[name] = cli_value
        elif name in config:
            try:
                out[name] = parse(config[name])
            except UsageError:
                raise
            except ValueError:
                raise UsageError(
                    f"config value {config[name]!r} is invalid for {name}"
                ) from None
        elif default is _REQUIRED:
            raise UsageError(f"missing required option --{name}")
        else:
            out[name] = default
    return out


def _load_sample_file(path: Path, index: int, seed: int):
    with open(path, "rb") as fh:
        head = fh.read(len(SAMPLE_MAGIC))
    if head == SAMPLE_MAGIC:
        return load_sample(path)
    if path.suffix.lower() in _IMAGE_SUFFIXES:
        image = preprocess(load_image(path), PreprocessSpec(seed=seed + index))
        return image.ravel(), image.shape
    return None


def _load_corpus(directory: str, seed: int) -> tuple[np.ndarray, tuple[int, ...]]:
    root = Path(directory)
    if not root.is_dir():
        raise DataFileError(f"{directory}: not a directory")
    signals = []
    dims: tuple[int, ...] | None = None
    for index, path in enumerate(sorted(p for p in root.iterdir() if p.is_file())):
        loaded = _load_sample_file(path, index, seed)
        if loaded is None:
            continue
        signal, signal_dims = loaded
        signal_dims = tuple(signal_dims)
        if dims is None:
            dims = signal_dims
        elif dims != signal_dims:
            raise DataFileError(
                f"{path}: extents {signal_dims} differ from earlier {dims}"
            )
        signals.append(np.asarray(signal, dtype=np.float64).ravel())
    if not signals:
        raise DataFileError(f"{directory}: no samples or images found")
    return np.stack(signals), dims


def _filter_dims_for(data_dims: tuple[int, ...], spec: tuple[int, ...]) -> tuple[int, ...]:
    if len(spec) == 1 and len(data_dims) == 2:
        return (spec[0], spec[0])
    if len(spec) != len(data_dims):
        raise UsageError(
            f"filter extents {spec} do not fit {len(data_dims)}-D data"
        )
    return spec


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_report(path: str, report: TrainReport, meta: dict) -> None:
    lines = [f"# {key}={meta[key]}" for key in sorted(meta)]
    lines.append("pass,time_s,train_obj,test_obj,psnr,history_bytes")
    for rec in report.records:
        lines.append(
            ",".join(
                _format_cell(v)
                for v in (
                    rec.index,
                    rec.time_s,
                    rec.train_obj,
                    rec.test_obj,
                    rec.psnr,
                    rec.history_bytes,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _base_meta(resolved: dict) -> dict:
    meta = {k: v for k, v in resolved.items() if v is not None}
    meta["version"] = __version__
    meta["pixel_scale"] = "preprocessed-units-255sq"
    return meta


_TRAIN_SPEC = {
    "mode": (str, "online"),
    "data": (str, _REQUIRED),
    "test": (str, None),
    "k": (int, 100),
    "filter-size": (_parse_extents, (11,)),
    "beta": (float, 1.0),
    "rho-code": (float, 1.0),
    "rho-dict": (float, 10.0),
    "inner-j": (int, 10),
    "passes": (int, 10),
    "seed": (int, 0),
    "out": (str, _REQUIRED),
    "report": (str, None),
}


def _cmd_train(args) -> int:
    opts = _resolve(args, _TRAIN_SPEC)
    if opts["mode"] not in ("online", "batch", "fista-dict"):
        raise UsageError(f"unknown mode {opts['mode']!r}")
    samples, dims = _load_corpus(opts["data"], opts["seed"])
    test_samples = None
    if opts["test"]:
        test_samples, test_dims = _load_corpus(opts["test"], opts["seed"] + 10_000)
        if test_dims != dims:
            raise DataFileError(
                f"test extents {test_dims} differ from training extents {dims}"
            )
    shape = SignalShape(dims, _filter_dims_for(dims, opts["filter-size"]))
    config = TrainConfig(
        n_filters=opts["k"],
        beta=opts["beta"],
        rho_code=opts["rho-code"],
        rho_dict=opts["rho-dict"],
        inner_iters=opts["inner-j"],
        max_passes=opts["passes"],
        seed=opts["seed"],
    )
    report = train(opts["mode"], samples, shape, config, test_samples)
    save_dictionary(report.filters, shape.filter_dims, opts["out"])
    if opts["report"]:
        _write_report(opts["report"], report, _base_meta(opts))
    last = report.records[-1]
    print(
        f"trained mode={opts['mode']} passes={last.index} "
        f"train_obj={last.train_obj:.6g} dict={opts['out']}"
    )
    return 0


_EVAL_SPEC = {
    "dict": (str, _REQUIRED),
    "test": (str, _REQUIRED),
    "beta": (float, 1.0),
    "seed": (int, 0),
    "report": (str, None),
}


def _cmd_eval(args) -> int:
    opts = _resolve(args, _EVAL_SPEC)
    filters, filter_dims = load_dictionary(opts["dict"])
    samples, dims = _load_corpus(opts["test"], opts["seed"])
    shape = SignalShape(dims, filter_dims)
    tic = time.perf_counter()
    result = evaluate_dictionary(
        filters, samples, shape, CodingConfig(beta=opts["beta"])
    )
    elapsed = time.perf_counter() - tic
    if opts["report"]:
        meta = _base_meta(opts)
        lines = [f"# {key}={meta[key]}" for key in sorted(meta)]
        lines.append("pass,time_s,train_obj,test_obj,psnr,history_bytes")
        lines.append(
            ",".join(
                _format_cell(v)
                for v in (0, elapsed, None, result.test_objective, result.psnr, None)
            )
        )
        Path(opts["report"]).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(
        f"test_objective={result.test_objective:.10g} psnr={result.psnr:.6g} "
        f"images={result.n_images} excluded_infinite={result.infinite_count}"
    )
    return 0


_RECONSTRUCT_SPEC = {
    "dict": (str, _REQUIRED),
    "in": (str, _REQUIRED),
    "out": (str, _REQUIRED),
    "beta": (float, 1.0),
    "seed": (int, 0),
}


def _cmd_reconstruct(args) -> int:
    opts = _resolve(args, _RECONSTRUCT_SPEC)
    filters, filter_dims = load_dictionary(opts["dict"])
    loaded = _load_sample_file(Path(opts["in"]), 0, opts["seed"])
    if loaded is None:
        raise DataFileError(f"{opts['in']}: neither a sample file nor an image")
    signal, dims = loaded
    shape = SignalShape(tuple(dims), filter_dims)
    dict_freq = forward_dft_cols(pad_filter_cols(filters, shape), shape)
    state = infer_code(signal, dict_freq, shape, CodingConfig(beta=opts["beta"]))
    recon = reconstruct(dict_freq, state.code, shape)
    out = Path(opts["out"])
    if out.suffix.lower() == ".png":
        if shape.ndim != 2:
            raise DataFileError("PNG output needs 2-D data")
        img = recon.reshape(shape.dims)
        lo, hi = img.min(), img.max()
        scaled = np.zeros_like(img) if hi - lo < 1e-300 else (img - lo) / (hi - lo)
        Image.fromarray(np.round(255 * scaled).astype(np.uint8), mode="L").save(out)
    else:
        save_sample(recon, shape.dims, out)
    err = float(np.sum((recon - np.asarray(signal).ravel()) ** 2))
    nnz = int(np.count_nonzero(state.code))
    print(f"reconstructed {opts['in']} -> {out} residual_sq={err:.6g} nonzeros={nnz}")
    return 0


_MOSAIC_SPEC = {
    "dict": (str, _REQUIRED),
    "out": (str, _REQUIRED),
}


def _cmd_mosaic(args) -> int:
    opts = _resolve(args, _MOSAIC_SPEC)
    filters, filter_dims = load_dictionary(opts["dict"])
    if len(filter_dims) != 2:
        raise DataFileError("mosaic needs a 2-D filter dictionary")
    shape = SignalShape(filter_dims, filter_dims)
    export_mosaic(filters, shape, opts["out"])
    print(f"wrote mosaic of {filters.shape[1]} filters to {opts['out']}")
    return 0


_SYNTH_SPEC = {
    "p": (_parse_extents, _REQUIRED),
    "k": (int, 100),
    "m": (_parse_extents, (11,)),
    "n": (int, 10),
    "seed": (int, 0),
    "noise": (float, 0.01),
    "variant": (str, "consistent"),
    "out": (str, _REQUIRED),
}


def _cmd_synth(args) -> int:
    opts = _resolve(args, _SYNTH_SPEC)
    if opts["variant"] not in ("consistent", "raw"):
        raise UsageError(f"unknown variant {opts['variant']!r}")
    dims = opts["p"]
    filter_dims = _filter_dims_for(dims, opts["m"])
    shape = SignalShape(dims, filter_dims)
    data = synth_generate(shape, opts["k"], opts["n"], opts["seed"], opts["noise"])
    out_dir = Path(opts["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    signals = data.consistent if opts["variant"] == "consistent" else data.raw
    for i, signal in enumerate(signals):
        save_sample(signal, shape.dims, out_dir / f"sample_{i:04d}.smp")
    save_dictionary(data.dictionary, shape.filter_dims, out_dir / "truth.dic")
    print(
        f"wrote {len(signals)} {opts['variant']} samples and truth.dic to {out_dir}"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocsc",
        description="Convolutional sparse coding with an online frequency-domain "
        "ADMM dictionary learner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(sub_parser, name, parse):
        kwargs = {"default": None}
        if parse in (int, float, str):
            kwargs["type"] = parse
        elif parse is _parse_extents:
            kwargs["type"] = str
        sub_parser.add_argument(f"--{name}", **kwargs)

    train_p = sub.add_parser("train", help="learn a dictionary from a sample corpus")
    for name, (parse, _) in _TRAIN_SPEC.items():
        add(train_p, name, parse)
    train_p.add_argument("--config", default=None)
    train_p.set_defaults(func=_cmd_train, extent_keys=("filter-size",))

    eval_p = sub.add_parser("eval", help="score a dictionary on held-out samples")
    for name, (parse, _) in _EVAL_SPEC.items():
        add(eval_p, name, parse)
    eval_p.add_argument("--config", default=None)
    eval_p.set_defaults(func=_cmd_eval, extent_keys=())

    rec_p = sub.add_parser("reconstruct", help="code one sample and write its reconstruction")
    for name, (parse, _) in _RECONSTRUCT_SPEC.items():
        add(rec_p, name, parse)
    rec_p.add_argument("--config", default=None)
    rec_p.set_defaults(func=_cmd_reconstruct, extent_keys=())

    mosaic_p = sub.add_parser("mosaic", help="render filters as a variance-ordered PNG grid")
    for name, (parse, _) in _MOSAIC_SPEC.items():
        add(mosaic_p, name, parse)
    mosaic_p.add_argument("--config", default=None)
    mosaic_p.set_defaults(func=_cmd_mosaic, extent_keys=())

    synth_p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    for name, (parse, _) in _SYNTH_SPEC.items():
        add(synth_p, name, parse)
    synth_p.add_argument("--config", default=None)
    synth_p.set_defaults(func=_cmd_synth, extent_keys=("p", "m"))

    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        # extent-valued flags arrive as strings; parse them now
        for key in args.extent_keys:
            attr = key.replace("-", "_")
            value = getattr(args, attr)
            if value is not None:
                setattr(args, attr, _parse_extents(value))
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataFileError, ShapeMismatchError, UndefinedVarianceError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (DivergenceError, NumericalConsistencyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(cli_main())
