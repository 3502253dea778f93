"""Command-line surface: generate / fit / eval / bounds / attack / plot,
plus pipeline, which chains them end to end under a single seed.

Exit codes: 0 success, 1 usage, 2 runtime or I/O failure, 3 attack
budget exhausted.  Every subcommand is a pure function of its flags and
input files; reruns produce byte-identical artifacts.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import islice
from pathlib import Path

from . import attack as attack_mod
from . import bounds as bounds_mod
from . import metrics as metrics_mod
from . import plot as plot_mod
from . import regress
from .dataset import (DatasetHeader, SplitSpec, in_train, read_csv, stats,
                      write_csv)
from .samples import generate_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_BUDGET = 3

_UNSET = object()

_DEFAULTS = {
    "count": 10 ** 4,
    "seed": 1,
    "threads": 1,
    "train_fraction": Fraction(4, 5),
    "mode": regress.HALF_SLOPE,
    "metric_precision": 17,
    "bound_precision": 128,
    "budget": 10 ** 5,
    "split": "test",
    "limit": None,
}

_CONVERTERS = {
    "bits": int, "count": int, "seed": int, "threads": int,
    "train_fraction": Fraction, "mode": str, "metric_precision": int,
    "bound_precision": int, "budget": int, "limit": int, "split": str,
    "out": str, "out_dir": str, "dataset": str, "model": str,
    "n": int, "n_file": str,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_config(path: str) -> dict:
    """Flat key=value file with the same keys as the flags."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = raw.strip()
    return values


class _Config:
    """Resolution order: explicit flag, then config file, then default."""

    def __init__(self, args, file_values: dict):
        self._args = args
        self._file = file_values

    def get(self, key, default=_UNSET):
        value = getattr(self._args, key, _UNSET)
        if value is not _UNSET and value is not None:
            return value
        if key in self._file:
            try:
                return _CONVERTERS[key](self._file[key])
            except ValueError as exc:
                raise UsageError(f"bad config value for {key}: {exc}") from None
        if default is not _UNSET:
            return default
        if key in _DEFAULTS:
            return _DEFAULTS[key]
        raise UsageError(f"missing required option --{key.replace('_', '-')}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="totientlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, keys: list[str]) -> None:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None,
                       help="key=value file supplying flag defaults")
        for key in keys:
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, default=None)

    add("generate", "write a seeded semiprime dataset CSV",
        ["bits", "count", "seed", "threads", "out"])
    add("fit", "fit a predictor on the training split of a dataset",
        ["dataset", "mode", "train_fraction", "seed", "metric_precision",
         "out"])
    add("eval", "evaluate a model file against a dataset split",
        ["dataset", "model", "split", "train_fraction", "seed",
         "metric_precision", "threads", "out"])
    add("bounds", "classical vs learned totient bounds per modulus",
        ["dataset", "model", "bound_precision", "limit", "out"])
    add("attack", "budgeted Fermat search seeded by a model's prediction",
        ["n", "n_file", "model", "budget", "out"])
    add("plot", "scatter and residual-histogram SVGs with companion CSVs",
        ["dataset", "model", "split", "train_fraction", "seed", "out_dir"])
    add("pipeline", "generate, fit, evaluate, bounds and window report",
        ["bits", "count", "seed", "threads", "train_fraction", "mode",
         "metric_precision", "bound_precision", "budget", "out"])
    return parser


def _int_arg(cfg: _Config, key: str, minimum=None, default=_UNSET) -> int:
    raw = cfg.get(key, default)
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"--{key.replace('_', '-')} must be an integer") from None
    if minimum is not None and value < minimum:
        raise UsageError(f"--{key.replace('_', '-')} must be >= {minimum}")
    return value


def _bits_arg(cfg: _Config) -> int:
    bits = _int_arg(cfg, "bits", minimum=8)
    if bits % 2 != 0:
        raise UsageError("--bits must be even")
    return bits


def _fraction_arg(cfg: _Config, key: str) -> Fraction:
    raw = cfg.get(key)
    try:
        value = Fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise UsageError(f"--{key.replace('_', '-')} must be a fraction") from None
    if not 0 < value < 1:
        raise UsageError(f"--{key.replace('_', '-')} must lie in (0, 1)")
    return value


def _mode_arg(cfg: _Config) -> str:
    mode = str(cfg.get("mode"))
    if mode not in regress.FIT_MODES:
        raise UsageError(f"--mode must be one of {', '.join(regress.FIT_MODES)}")
    return mode


def _print_stats(collected) -> None:
    s = stats(collected)
    render = metrics_mod.render_decimal
    print(f"rows={s.count}")
    print(f"n: min={s.n_min} max={s.n_max} mean={render(s.n_mean, 17)}")
    print(f"p+q: min={s.prime_sum_min} max={s.prime_sum_max} "
          f"mean={render(s.prime_sum_mean, 17)}")
    print(f"epsilon: min={s.epsilon_min} max={s.epsilon_max} "
          f"mean={render(s.epsilon_mean, 17)}")


def cmd_generate(cfg: _Config) -> int:
    bits = _bits_arg(cfg)
    count = _int_arg(cfg, "count", minimum=1)
    seed = _int_arg(cfg, "seed", minimum=0)
    threads = _int_arg(cfg, "threads", minimum=1)
    out = str(cfg.get("out"))

    collected = []

    def tee():
        for sample in generate_dataset(bits, count, seed, threads=threads):
            collected.append(sample)
            yield sample

    write_csv(DatasetHeader(bits, count, seed), tee(), out)
    _print_stats(collected)
    print(f"dataset written to {out}")
    return EXIT_OK


def _fit_on_dataset(dataset_path: str, mode: str, train_fraction: Fraction,
                    seed: int | None, precision: int):
    """Two streaming passes: fit on train rows, then test metrics plus a
    train-side violation count for the lower-bound modes."""
    header, rows = read_csv(dataset_path)
    split_seed = header.master_seed if seed is None else seed
    spec = SplitSpec(train_fraction=train_fraction, split_seed=split_seed)

    sums = regress.OlsSums()
    worst = None
    train_count = 0
    for i, sample in enumerate(rows):
        if not in_train(spec, i):
            continue
        train_count += 1
        sums = sums.merge(regress.OlsSums(
            1, sample.n, sample.epsilon, sample.n * sample.epsilon,
            sample.n * sample.n))
        doubled = 2 * sample.epsilon - sample.n
        if worst is None or doubled < worst:
            worst = doubled

    if mode == regress.FREE_OLS:
        model = regress.fit_free_ols(sums, header.modulus_bits, split_seed)
    elif mode == regress.HALF_SLOPE:
        model = regress.fit_half_slope(sums, header.modulus_bits, split_seed)
    elif mode == regress.CONSERVATIVE:
        if train_count == 0:
            raise regress.FitError("conservative fit needs training rows")
        model = regress.LinearModel(
            regress.HALF, Fraction(worst, 2), regress.CONSERVATIVE,
            header.modulus_bits, train_count, split_seed)
    else:
        model = regress.fit_provable(header.modulus_bits, split_seed)

    _, rows2 = read_csv(dataset_path)
    acc = metrics_mod.MetricsAccumulator()
    violations = 0
    test_count = 0
    for i, sample in enumerate(rows2):
        if in_train(spec, i):
            if model.predict(sample.n) > sample.epsilon:
                violations += 1
        else:
            test_count += 1
            acc.push(sample.epsilon, model.predict(sample.n))
    report = acc.report(precision) if test_count else None
    if report is not None:
        model = regress.attach_metrics(model, report)
    return model, header, violations, test_count


def cmd_fit(cfg: _Config) -> int:
    dataset_path = str(cfg.get("dataset"))
    out = str(cfg.get("out"))
    mode = _mode_arg(cfg)
    train_fraction = _fraction_arg(cfg, "train_fraction")
    seed_raw = cfg.get("seed", None)
    seed = None if seed_raw is None else int(seed_raw)
    precision = _int_arg(cfg, "metric_precision", minimum=1)

    model, header, violations, test_count = _fit_on_dataset(
        dataset_path, mode, train_fraction, seed, precision)
    regress.save_model(model, out)

    print(f"mode={model.mode} bits={model.modulus_bits} "
          f"train_count={model.train_count} test_count={test_count}")
    print(f"slope={model.slope} intercept={model.intercept}")
    print(f"alpha={model.alpha}")
    if model.mode in (regress.CONSERVATIVE, regress.PROVABLE):
        print(f"train_violations={violations}")
    if model.metrics is not None:
        r = model.metrics.rendered
        print(f"mae={r['mae']} mse={r['mse']} r2={r['r2']}")
    print(f"model written to {out}")
    return EXIT_OK


def _split_rows(dataset_path: str, which: str, train_fraction: Fraction,
                split_seed: int):
    spec = SplitSpec(train_fraction=train_fraction, split_seed=split_seed)
    _, rows = read_csv(dataset_path)
    for i, sample in enumerate(rows):
        if which == "all" or (which == "train") == in_train(spec, i):
            yield sample


def _evaluate_split(model, row_iter, precision: int, threads: int):
    """Chunked evaluation: per-chunk accumulators merged in chunk order,
    so the result is independent of the worker count."""
    def consume(chunk):
        acc = metrics_mod.MetricsAccumulator()
        for sample in chunk:
            acc.push(sample.epsilon, model.predict(sample.n))
        return acc

    chunks = iter(lambda: list(islice(row_iter, 2048)), [])
    if threads <= 1:
        parts = map(consume, chunks)
    else:
        pool = ThreadPoolExecutor(max_workers=threads)
        parts = pool.map(consume, chunks)
    total = metrics_mod.MetricsAccumulator()
    for part in parts:
        total = total.merge(part)
    if threads > 1:
        pool.shutdown()
    return total.report(precision)


def cmd_eval(cfg: _Config) -> int:
    dataset_path = str(cfg.get("dataset"))
    model = regress.load_model(str(cfg.get("model")))
    which = str(cfg.get("split"))
    if which not in ("test", "train", "all"):
        raise UsageError("--split must be test, train or all")
    train_fraction = _fraction_arg(cfg, "train_fraction")
    seed_raw = cfg.get("seed", None)
    split_seed = model.master_seed if seed_raw is None else int(seed_raw)
    precision = _int_arg(cfg, "metric_precision", minimum=1)
    threads = _int_arg(cfg, "threads", minimum=1)

    rows = _split_rows(dataset_path, which, train_fraction, split_seed)
    report = _evaluate_split(model, rows, precision, threads)

    print(f"count={report.count}")
    for name in ("mae", "mse", "r2"):
        value = getattr(report, name)
        print(f"{name}={report.rendered[name]} "
              f"exact={value.numerator}/{value.denominator}")
    out = cfg.get("out", None)
    if out is not None:
        Path(out).write_text(
            json.dumps(metrics_mod.report_to_json(report), indent=2) + "\n",
            encoding="utf-8")
        print(f"metrics written to {out}")
    return EXIT_OK


def cmd_bounds(cfg: _Config) -> int:
    dataset_path = str(cfg.get("dataset"))
    out = str(cfg.get("out"))
    precision = _int_arg(cfg, "bound_precision", minimum=53)
    limit_raw = cfg.get("limit")
    limit = None if limit_raw is None else int(limit_raw)
    model_path = cfg.get("model", None)
    model = regress.load_model(str(model_path)) if model_path else None

    _, rows = read_csv(dataset_path)

    failures = 0
    count = 0

    def reports():
        nonlocal failures, count
        for i, sample in enumerate(rows):
            if limit is not None and i >= limit:
                break
            report = bounds_mod.compare(sample.n, sample.p, sample.q,
                                        model=model, precision=precision)
            count += 1
            if not all(report.verdicts.values()):
                failures += 1
            yield report

    bounds_mod.write_csv(reports(), out)
    print(f"rows={count} verdict_failures={failures}")
    print(f"bound table written to {out}")
    return EXIT_OK


def cmd_attack(cfg: _Config) -> int:
    n_raw = cfg.get("n", None)
    n_file = cfg.get("n_file", None)
    if (n_raw is None) == (n_file is None):
        raise UsageError("supply exactly one of --n or --n-file")
    n = int(n_raw) if n_raw is not None else int(
        Path(str(n_file)).read_text(encoding="utf-8").strip())
    model = regress.load_model(str(cfg.get("model")))
    budget = _int_arg(cfg, "budget", minimum=1)

    seed_sum = attack_mod.predicted_sum(model, n)
    outcome = attack_mod.fermat_search(n, seed_sum, budget)
    doc = {
        "n": str(n),
        "predicted_sum": str(outcome.predicted_sum),
        "success": outcome.success,
        "p": None if outcome.p is None else str(outcome.p),
        "q": None if outcome.q is None else str(outcome.q),
        "iterations_used": outcome.iterations_used,
        "budget": budget,
    }
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    out = cfg.get("out", None)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return EXIT_OK if outcome.success else EXIT_BUDGET


def cmd_plot(cfg: _Config) -> int:
    dataset_path = str(cfg.get("dataset"))
    model = regress.load_model(str(cfg.get("model")))
    which = str(cfg.get("split"))
    if which not in ("test", "train", "all"):
        raise UsageError("--split must be test, train or all")
    train_fraction = _fraction_arg(cfg, "train_fraction")
    seed_raw = cfg.get("seed", None)
    split_seed = model.master_seed if seed_raw is None else int(seed_raw)
    out_dir = Path(str(cfg.get("out_dir")))
    out_dir.mkdir(parents=True, exist_ok=True)

    true_values = []
    predicted = []
    for sample in _split_rows(dataset_path, which, train_fraction, split_seed):
        true_values.append(sample.epsilon)
        predicted.append(model.predict(sample.n))
    if not true_values:
        raise ValueError("selected split is empty")

    series = plot_mod.scatter_svg(true_values, predicted,
                                  out_dir / "scatter.svg")
    plot_mod.series_csv(series, out_dir / "scatter.csv")

    residual_values = [y - p for y, p in zip(true_values, predicted)]
    hist = metrics_mod.histogram(residual_values)
    plot_mod.histogram_svg(hist, out_dir / "residual_hist.svg")
    plot_mod.histogram_csv(hist, out_dir / "residual_hist.csv")

    for name in ("scatter.svg", "scatter.csv", "residual_hist.svg",
                 "residual_hist.csv"):
        print(f"wrote {out_dir / name}")
    return EXIT_OK


def cmd_pipeline(cfg: _Config) -> int:
    bits = _bits_arg(cfg)
    count = _int_arg(cfg, "count", minimum=1)
    seed = _int_arg(cfg, "seed", minimum=0)
    threads = _int_arg(cfg, "threads", minimum=1)
    mode = _mode_arg(cfg)
    train_fraction = _fraction_arg(cfg, "train_fraction")
    metric_precision = _int_arg(cfg, "metric_precision", minimum=1)
    bound_precision = _int_arg(cfg, "bound_precision", minimum=53)
    out_dir = Path(str(cfg.get("out")))
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset_path = out_dir / "dataset.csv"
    write_csv(DatasetHeader(bits, count, seed),
              generate_dataset(bits, count, seed, threads=threads),
              dataset_path)

    model, header, violations, test_count = _fit_on_dataset(
        str(dataset_path), mode, train_fraction, seed, metric_precision)
    regress.save_model(model, out_dir / "model.json")
    if model.metrics is not None:
        (out_dir / "metrics.json").write_text(
            json.dumps(metrics_mod.report_to_json(model.metrics), indent=2)
            + "\n", encoding="utf-8")

    _, rows = read_csv(str(dataset_path))
    bounds_mod.write_csv(
        (bounds_mod.compare(s.n, s.p, s.q, model=model,
                            precision=bound_precision) for s in rows),
        out_dir / "bounds.csv")

    test_rows = _split_rows(str(dataset_path), "test", train_fraction, seed)
    report = attack_mod.window_report(model, test_rows)
    attack_mod.write_csv(report, out_dir / "window_report.csv")
    (out_dir / "window_summary.json").write_text(
        json.dumps(attack_mod.summary_json(report), indent=2) + "\n",
        encoding="utf-8")

    print(f"mode={model.mode} bits={bits} count={count} seed={seed}")
    if model.metrics is not None:
        r = model.metrics.rendered
        print(f"test mae={r['mae']} mse={r['mse']} r2={r['r2']}")
    print(f"window mean={report.summary.window_mean} "
          f"max={report.summary.window_max}")
    for name in ("dataset.csv", "model.json", "metrics.json", "bounds.csv",
                 "window_report.csv", "window_summary.json"):
        print(f"wrote {out_dir / name}")
    return EXIT_OK


_HANDLERS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "eval": cmd_eval,
    "bounds": cmd_bounds,
    "attack": cmd_attack,
    "plot": cmd_plot,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        file_values = _load_config(args.config) if args.config else {}
        cfg = _Config(args, file_values)
        return _HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
