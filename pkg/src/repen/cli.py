"""Command-line interface.

Subcommands:
    pipeline    run score -> threshold -> train -> transform -> detect on a file
    synth       generate a synthetic benchmark dataset file
    experiment  run a protocol (comparison, labeled_curve, dim_sensitivity,
                scalability) and write CSV tables plus gnuplot scripts
    downsample  subsample the outlier class of a labeled dataset to a target rate
    score       apply a saved model and the detector to a dataset

Configuration is a flat ``key = value`` text file ('#' starts a comment);
command-line flags override file values. Every pipeline or experiment run
writes a ``manifest.cfg`` of all resolved settings, sufficient to reproduce
the run bit-exactly in single-threaded mode.

Thread count comes from --threads or the REPEN_THREADS environment variable
and is applied to the BLAS thread pools before numpy loads;
--deterministic forces one thread.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

_THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")

_BOOL_KEYS = {"normalize", "deterministic"}
_INT_KEYS = {
    "subsample_size",
    "ensemble_size",
    "rep_dim",
    "query_size",
    "n_epochs",
    "batch_size",
    "samples_per_epoch",
    "rng_seed",
    "repeats",
    "size_sweep_dim",
    "dim_sweep_size",
    "d_relevant",
}
_FLOAT_KEYS = {
    "alpha",
    "margin",
    "optimizer_decay",
    "optimizer_eps",
    "labeled_fraction",
    "rate",
    "separation",
    "outlier_rate",
}
_LIST_KEYS = {"l_values", "m_values", "sizes", "dims"}


def parse_config_file(path: str) -> dict:
    """Read a flat key = value config file into a string dict."""
    settings = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            settings[key.strip()] = value.strip()
    return settings


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    if key in _BOOL_KEYS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"invalid boolean for {key}: {value!r}")
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _LIST_KEYS:
        return [int(tok) for tok in value.replace(",", " ").split()]
    return value


def resolve_settings(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, the config file, and explicit flags (flags win)."""
    settings = dict(defaults)
    if getattr(args, "config", None):
        for key, value in parse_config_file(args.config).items():
            if key not in defaults:
                raise ValueError(f"unknown config key {key!r}")
            settings[key] = _coerce(key, value)
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = _coerce(key, flag)
    return settings


def write_manifest(path: Path, settings: dict, artifacts: list[str]) -> None:
    lines = [f"{key} = {_manifest_value(settings[key])}" for key in sorted(settings)]
    lines.append(f"artifacts = {','.join(artifacts)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _manifest_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def _hyperparams(settings: dict):
    from .data import HyperParams

    kwargs = {
        name: settings[name] for name in HyperParams.field_names() if name in settings
    }
    params = HyperParams(**kwargs)
    params.validate()
    return params


def _load_dataset(settings: dict):
    from . import ingest

    path = settings["input"]
    if not path:
        raise ValueError("input path is required")
    if not os.path.exists(path):
        raise FileNotFoundError(f"input file not found: {path}")
    fmt = settings.get("format") or "auto"
    if fmt == "auto":
        fmt = "csv" if path.endswith(".csv") else "libsvm"
    if fmt == "csv":
        dataset = ingest.load_csv(path, label_column=settings.get("label_column") or None)
    elif fmt == "libsvm":
        dataset = ingest.load_libsvm(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if settings.get("normalize"):
        dataset = ingest.minmax_scale(dataset)
    return dataset


def _write_scores_csv(path: Path, scores) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("index,score\n")
        for i, value in enumerate(scores.scores):
            handle.write(f"{i},{float(value)!r}\n")


_PIPELINE_DEFAULTS = {
    "input": "",
    "output_dir": "",
    "format": "auto",
    "label_column": "",
    "normalize": False,
    "backend": "kd_tree",
    "subsample_size": 8,
    "ensemble_size": 50,
    "alpha": 1.732,
    "rep_dim": 20,
    "query_size": 1,
    "margin": 1000.0,
    "n_epochs": 30,
    "batch_size": 256,
    "samples_per_epoch": 5000,
    "optimizer_decay": 0.95,
    "optimizer_eps": 1e-4,
    "rng_seed": 0,
    "labeled_fraction": 0.5,
}


def cmd_pipeline(args: argparse.Namespace) -> int:
    from . import ingest, learner
    from .pipeline import run_pipeline

    settings = resolve_settings(args, _PIPELINE_DEFAULTS)
    out_dir = Path(settings["output_dir"] or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _load_dataset(settings)
    params = _hyperparams(settings)

    result = run_pipeline(dataset, params, backend=settings["backend"])

    artifacts = ["model.repen", "embedded.csv", "scores.csv"]
    learner.save_model(result.model, out_dir / "model.repen")
    ingest.write_csv(result.embedded, out_dir / "embedded.csv")
    _write_scores_csv(out_dir / "scores.csv", result.embedded_scores)
    if result.auc_embedded is not None:
        (out_dir / "auc.txt").write_text(
            f"auc_original = {result.auc_original!r}\n"
            f"auc_embedded = {result.auc_embedded!r}\n",
            encoding="utf-8",
        )
        artifacts.append("auc.txt")
    write_manifest(out_dir / "manifest.cfg", settings, artifacts)
    print(f"pipeline done: train {result.train_seconds:.2f}s, detect {result.detect_seconds:.3f}s")
    if result.auc_embedded is not None:
        print(
            f"auc original {result.auc_original:.4f} -> embedded {result.auc_embedded:.4f}"
        )
    print(f"artifacts written to {out_dir}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    from . import ingest

    dataset = ingest.synth_gaussian_with_outliers(
        args.n_inliers, args.n_outliers, args.d_relevant, args.d_noise,
        args.separation, args.seed,
    )
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        ingest.write_csv(dataset, out)
    else:
        ingest.write_libsvm(dataset, out)
    print(f"wrote {dataset.n_objects}x{dataset.n_features} dataset to {out}")
    return 0


def cmd_downsample(args: argparse.Namespace) -> int:
    from . import ingest

    settings = {
        "input": args.input,
        "format": args.format,
        "label_column": args.label_column or "",
        "normalize": False,
    }
    dataset = _load_dataset(settings)
    result = ingest.downsample_to_rate(dataset, args.rate, args.seed)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".csv":
        ingest.write_csv(result, out)
    else:
        ingest.write_libsvm(result, out)
    kept = int(result.labels.sum())
    print(f"kept {kept} outliers of {result.n_objects} objects -> {out}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    from . import learner, sp

    settings = {
        "input": args.input,
        "format": args.format,
        "label_column": args.label_column or "",
        "normalize": args.normalize,
    }
    dataset = _load_dataset(settings)
    model = learner.load_model(args.model)
    config = sp.SpConfig(
        subsample_size=args.subsample_size,
        ensemble_size=args.ensemble_size,
        backend=args.backend,
        rng_seed=args.seed,
    )
    scores = sp.sp_score_embedded(dataset, model, config)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_scores_csv(out, scores)
    if dataset.labels is not None:
        from .evaluation import auc

        print(f"auc = {auc(scores.scores, dataset.labels):.4f}")
    print(f"wrote scores to {out}")
    return 0


_EXPERIMENT_DEFAULTS = {
    **_PIPELINE_DEFAULTS,
    "kind": "",
    "repeats": 10,
    "l_values": [0, 1, 5, 10, 20, 40, 80],
    "m_values": [],
    "sizes": [1000, 2000, 4000],
    "dims": [1250, 2500, 5000],
    "size_sweep_dim": 10000,
    "dim_sweep_size": 10000,
    "outlier_rate": 0.02,
    "d_relevant": 10,
    "separation": 6.0,
}

_EXPERIMENT_KINDS = ("comparison", "labeled_curve", "dim_sensitivity", "scalability")


def cmd_experiment(args: argparse.Namespace) -> int:
    from . import experiments
    from .evaluation import (
        RESULT_HEADER,
        SCALABILITY_HEADER,
        write_gnuplot_script,
        write_rows_csv,
    )

    settings = resolve_settings(args, _EXPERIMENT_DEFAULTS)
    kind = settings["kind"]
    if kind not in _EXPERIMENT_KINDS:
        raise ValueError(f"unknown experiment kind {kind!r}; choose from {_EXPERIMENT_KINDS}")
    out_dir = Path(settings["output_dir"] or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    params = _hyperparams(settings)
    backend = settings["backend"]
    artifacts = []

    if kind == "scalability":
        rows = experiments.run_scalability(
            params,
            sizes=settings["sizes"],
            dims=settings["dims"],
            size_sweep_dim=settings["size_sweep_dim"],
            dim_sweep_size=settings["dim_sweep_size"],
            backend=backend,
            outlier_rate=settings["outlier_rate"],
            d_relevant=settings["d_relevant"],
            separation=settings["separation"],
        )
        csv_path = out_dir / "scalability_rows.csv"
        write_rows_csv(csv_path, rows, SCALABILITY_HEADER)
        write_gnuplot_script(
            out_dir / "scalability.gp", csv_path.name, 2, 7,
            "total runtime vs data size", "objects", "seconds", logscale=True,
        )
        artifacts += [csv_path.name, "scalability.gp"]
    else:
        dataset = _load_dataset(settings)
        if kind == "comparison":
            rows, summary = experiments.run_comparison(
                dataset, params, repeats=settings["repeats"], backend=backend
            )
            write_rows_csv(out_dir / "comparison_summary.csv", summary,
                           ("method", "mean_auc", "std_auc", "mean_detect_seconds"))
            artifacts.append("comparison_summary.csv")
            csv_path = out_dir / "comparison_rows.csv"
            plot = ("comparison.gp", 4, 5, "AUC per repeat", "repeat", "auc")
        elif kind == "labeled_curve":
            rows = experiments.run_labeled_curve(
                dataset, params, settings["l_values"],
                repeats=settings["repeats"], backend=backend,
            )
            csv_path = out_dir / "labeled_curve_rows.csv"
            plot = ("labeled_curve.gp", 3, 5, "AUC vs labeled outliers", "labeled outliers", "auc")
        else:
            m_values = settings["m_values"] or list(experiments.DEFAULT_M_GRID)
            rows = experiments.run_dim_sensitivity(
                dataset, params, m_values, repeats=settings["repeats"], backend=backend
            )
            csv_path = out_dir / "dim_sensitivity_rows.csv"
            plot = ("dim_sensitivity.gp", 2, 5, "AUC vs representation dimension",
                    "representation dimension", "auc")
        write_rows_csv(csv_path, rows, RESULT_HEADER)
        name, x, y, title, xlabel, ylabel = plot
        write_gnuplot_script(out_dir / name, csv_path.name, x, y, title, xlabel, ylabel)
        artifacts += [csv_path.name, name]

    write_manifest(out_dir / "manifest.cfg", settings, artifacts)
    print(f"experiment '{kind}' wrote {', '.join(artifacts)} to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repen",
        description="Representation learning for random-distance outlier detection",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS thread count (default: REPEN_THREADS or library default)")
    parser.add_argument("--deterministic", action="store_true",
                        help="force single-threaded, bit-reproducible execution")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pipe = sub.add_parser("pipeline", help="run the full pipeline on a dataset file")
    p_pipe.add_argument("--config", help="flat key = value config file")
    for key, default in _PIPELINE_DEFAULTS.items():
        flag = "--" + key.replace("_", "-")
        if key in _BOOL_KEYS:
            p_pipe.add_argument(flag, action="store_const", const=True, default=None)
        else:
            p_pipe.add_argument(flag, default=None, metavar=str(default))
    p_pipe.set_defaults(func=cmd_pipeline)

    p_synth = sub.add_parser("synth", help="generate a synthetic benchmark dataset")
    p_synth.add_argument("--n-inliers", type=int, required=True)
    p_synth.add_argument("--n-outliers", type=int, required=True)
    p_synth.add_argument("--d-relevant", type=int, required=True)
    p_synth.add_argument("--d-noise", type=int, required=True)
    p_synth.add_argument("--separation", type=float, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--format", choices=("libsvm", "csv"), default="libsvm")
    p_synth.add_argument("--output", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_exp = sub.add_parser("experiment", help="run an experiment protocol")
    p_exp.add_argument("--kind", choices=_EXPERIMENT_KINDS, default=None)
    p_exp.add_argument("--config", help="flat key = value config file")
    for key, default in _EXPERIMENT_DEFAULTS.items():
        if key == "kind":
            continue
        flag = "--" + key.replace("_", "-")
        if key in _BOOL_KEYS:
            p_exp.add_argument(flag, action="store_const", const=True, default=None)
        else:
            p_exp.add_argument(flag, default=None, metavar=str(default))
    p_exp.set_defaults(func=cmd_experiment)

    p_down = sub.add_parser("downsample", help="downsample outliers to a target rate")
    p_down.add_argument("--input", required=True)
    p_down.add_argument("--output", required=True)
    p_down.add_argument("--rate", type=float, default=0.02)
    p_down.add_argument("--seed", type=int, default=0)
    p_down.add_argument("--format", default="auto")
    p_down.add_argument("--label-column", default=None)
    p_down.set_defaults(func=cmd_downsample)

    p_score = sub.add_parser("score", help="apply a saved model and the detector")
    p_score.add_argument("--model", required=True)
    p_score.add_argument("--input", required=True)
    p_score.add_argument("--output", required=True)
    p_score.add_argument("--format", default="auto")
    p_score.add_argument("--label-column", default=None)
    p_score.add_argument("--normalize", action="store_true")
    p_score.add_argument("--backend", default="kd_tree")
    p_score.add_argument("--subsample-size", type=int, default=8)
    p_score.add_argument("--ensemble-size", type=int, default=50)
    p_score.add_argument("--seed", type=int, default=0)
    p_score.set_defaults(func=cmd_score)

    return parser


def _apply_thread_settings(args: argparse.Namespace) -> None:
    threads = args.threads
    if args.deterministic:
        threads = 1
    if threads is None:
        env = os.environ.get("REPEN_THREADS")
        threads = int(env) if env else None
    if threads is not None:
        for var in _THREAD_ENV_VARS:
            os.environ[var] = str(threads)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_thread_settings(args)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
