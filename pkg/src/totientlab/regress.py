"""Exact-arithmetic linear regression of epsilon on n.

Four fit flavors:

  free_ols      unconstrained least squares (checks that the slope really
                sits at 1/2 for semiprime populations)
  half_slope    slope fixed at 1/2, least-squares intercept
  conservative  slope 1/2, intercept low enough that no training point is
                over-predicted
  provable      slope 1/2, intercept -2^(bits/2): under-predicts every
                balanced modulus of that size, no training data needed

Everything is Fraction/int arithmetic; no floats appear anywhere in
fitting or prediction, so results are identical across platforms and
meaningful at 512-bit magnitudes.
"""

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from . import metrics as _metrics

FREE_OLS = "free_ols"
HALF_SLOPE = "half_slope"
CONSERVATIVE = "conservative"
PROVABLE = "provable"
FIT_MODES = (FREE_OLS, HALF_SLOPE, CONSERVATIVE, PROVABLE)

MODEL_FORMAT = "totient-model/v1"

HALF = Fraction(1, 2)


class FitError(ValueError):
    """Degenerate or empty input to a fit."""


class ModelFormatError(ValueError):
    """Malformed model file."""


@dataclass(frozen=True)
class OlsSums:
    """Exact sufficient statistics for a line fit; mergeable across
    partitions (commutative, associative, identity = all zeros)."""

    count: int = 0
    sum_x: int = 0
    sum_y: int = 0
    sum_xy: int = 0
    sum_xx: int = 0

    def merge(self, other: "OlsSums") -> "OlsSums":
        return OlsSums(
            self.count + other.count,
            self.sum_x + other.sum_x,
            self.sum_y + other.sum_y,
            self.sum_xy + other.sum_xy,
            self.sum_xx + other.sum_xx,
        )


def accumulate(pairs: Iterable[tuple[int, int]]) -> OlsSums:
    count = sx = sy = sxy = sxx = 0
    for x, y in pairs:
        count += 1
        sx += x
        sy += y
        sxy += x * y
        sxx += x * x
    return OlsSums(count, sx, sy, sxy, sxx)


@dataclass(frozen=True)
class LinearModel:
    """Fitted predictor y_hat(x) = slope*x + intercept, exact rationals."""

    slope: Fraction
    intercept: Fraction
    mode: str
    modulus_bits: int = 0
    train_count: int = 0
    master_seed: int = 0
    metrics: "_metrics.MetricsReport | None" = None

    def __post_init__(self):
        if self.mode not in FIT_MODES:
            raise ValueError(f"unknown fit mode: {self.mode!r}")
        if self.mode != FREE_OLS and self.slope != HALF:
            raise ValueError(f"mode {self.mode} requires slope 1/2")

    def predict(self, x: int) -> Fraction:
        return self.slope * x + self.intercept

    @property
    def alpha(self) -> Fraction:
        """The negated intercept (predictor written as y_hat = x/2 - alpha)."""
        return -self.intercept


def predict(model: LinearModel, x: int) -> Fraction:
    return model.predict(x)


def fit_free_ols(sums: OlsSums, modulus_bits: int = 0,
                 master_seed: int = 0) -> LinearModel:
    """Unconstrained OLS from sufficient statistics."""
    n = sums.count
    if n < 2:
        raise FitError("free OLS needs at least 2 points")
    det = n * sums.sum_xx - sums.sum_x ** 2
    if det == 0:
        raise FitError("degenerate x variance")
    slope = Fraction(n * sums.sum_xy - sums.sum_x * sums.sum_y, det)
    intercept = (Fraction(sums.sum_y) - slope * sums.sum_x) / n
    return LinearModel(slope, intercept, FREE_OLS, modulus_bits, n,
                       master_seed)


def fit_half_slope(sums: OlsSums, modulus_bits: int = 0,
                   master_seed: int = 0) -> LinearModel:
    """Least-squares intercept given slope 1/2: mean of (y - x/2)."""
    n = sums.count
    if n < 1:
        raise FitError("half-slope fit needs at least 1 point")
    intercept = Fraction(2 * sums.sum_y - sums.sum_x, 2 * n)
    return LinearModel(HALF, intercept, HALF_SLOPE, modulus_bits, n,
                       master_seed)


def fit_conservative(pairs: Iterable[tuple[int, int]], modulus_bits: int = 0,
                     master_seed: int = 0) -> LinearModel:
    """Slope 1/2, intercept = min(y - x/2): no training point is ever
    over-predicted, with equality at the tightest one."""
    worst = None  # min of 2y - x (intercept doubled)
    count = 0
    for x, y in pairs:
        count += 1
        doubled = 2 * y - x
        if worst is None or doubled < worst:
            worst = doubled
    if count == 0:
        raise FitError("conservative fit needs at least 1 point")
    return LinearModel(HALF, Fraction(worst, 2), CONSERVATIVE, modulus_bits,
                       count, master_seed)


def fit_provable(modulus_bits: int, master_seed: int = 0) -> LinearModel:
    """Slope 1/2, intercept -2^(bits/2).

    For any n = p*q with both primes below 2^(bits/2), the residual
    epsilon - y_hat(n) equals 2^(bits/2) - (p+q+1)/2 > 0, so the
    under-prediction guarantee needs no training data at all.
    """
    if modulus_bits < 8 or modulus_bits % 2 != 0:
        raise ValueError("modulus_bits must be even and >= 8")
    intercept = Fraction(-(1 << (modulus_bits // 2)))
    return LinearModel(HALF, intercept, PROVABLE, modulus_bits, 0,
                       master_seed)


def phi_lower_bound(model: LinearModel, n: int) -> Fraction:
    """Totient lower bound n + 2*intercept + 2 = 2*(y_hat(n) + 1), exact.

    Only defined for the slope-1/2 family.
    """
    if model.slope != HALF:
        raise ValueError("phi_lower_bound requires slope 1/2")
    return n + 2 * model.intercept + 2


def _fraction_json(value: Fraction) -> dict:
    return {"num": str(value.numerator), "den": str(value.denominator)}


def _fraction_from_json(obj, field: str) -> Fraction:
    try:
        return Fraction(int(obj["num"]), int(obj["den"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad rational field {field!r}: {exc}") from None


def save_model(model: LinearModel, destination) -> None:
    """Write the model as JSON; big integers as decimal strings."""
    doc = {
        "format": MODEL_FORMAT,
        "bits": model.modulus_bits,
        "mode": model.mode,
        "slope": _fraction_json(model.slope),
        "intercept": _fraction_json(model.intercept),
        "train_count": model.train_count,
        "seed": model.master_seed,
    }
    if model.metrics is not None:
        doc["metrics"] = _metrics.report_to_json(model.metrics)
    text = json.dumps(doc, indent=2) + "\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def load_model(source) -> LinearModel:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    if doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"unknown model format {doc.get('format')!r}")
    mode = doc.get("mode")
    if mode not in FIT_MODES:
        raise ModelFormatError(f"unknown fit mode {mode!r}")
    report = None
    if "metrics" in doc:
        report = _metrics.report_from_json(doc["metrics"])
    try:
        return LinearModel(
            slope=_fraction_from_json(doc["slope"], "slope"),
            intercept=_fraction_from_json(doc["intercept"], "intercept"),
            mode=mode,
            modulus_bits=int(doc["bits"]),
            train_count=int(doc["train_count"]),
            master_seed=int(doc["seed"]),
            metrics=report,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"bad model document: {exc}") from None


def attach_metrics(model: LinearModel,
                   report: "_metrics.MetricsReport") -> LinearModel:
    return replace(model, metrics=report)
