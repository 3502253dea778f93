"""Exact evaluation metrics: MAE, MSE, R^2, residuals, histogram binning.

All statistics are exact rationals; decimal strings are produced only at
render time, correctly rounded to a requested number of significant
digits (default 17).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

DEFAULT_PRECISION = 17

_EXPONENT_THRESHOLD = 21  # no exponent notation below 10^21


def _as_xy(sample):
    if hasattr(sample, "n") and hasattr(sample, "epsilon"):
        return sample.n, sample.epsilon
    x, y = sample
    return x, y


def residuals(model, samples) -> Iterator[Fraction]:
    """Exact residuals y - y_hat(x); samples are (x, y) pairs or dataset
    rows (then x = n, y = epsilon)."""
    for sample in samples:
        x, y = _as_xy(sample)
        yield y - model.predict(x)


def mae(values: Iterable[Fraction]) -> Fraction:
    total = Fraction(0)
    count = 0
    for r in values:
        total += abs(r)
        count += 1
    if count == 0:
        raise ValueError("mae of empty residual stream")
    return total / count


def mse(values: Iterable[Fraction]) -> Fraction:
    total = Fraction(0)
    count = 0
    for r in values:
        total += r * r
        count += 1
    if count == 0:
        raise ValueError("mse of empty residual stream")
    return total / count


def r2(y_true: Iterable, y_pred: Iterable) -> Fraction:
    """Exact 1 - SSres/SStot with the mean taken over y_true."""
    true_list = [Fraction(y) for y in y_true]
    pred_list = [Fraction(y) for y in y_pred]
    if len(true_list) != len(pred_list):
        raise ValueError("series lengths differ")
    n = len(true_list)
    if n == 0:
        raise ValueError("r2 of empty series")
    mean = sum(true_list) / n
    ss_tot = sum((y - mean) ** 2 for y in true_list)
    if ss_tot == 0:
        raise ValueError("zero total variance")
    ss_res = sum((y - p) ** 2 for y, p in zip(true_list, pred_list))
    return 1 - Fraction(ss_res, ss_tot)


class MetricsAccumulator:
    """Streaming exact accumulator for MAE/MSE/R^2; mergeable across
    partitions with results identical to a sequential pass."""

    def __init__(self):
        self.count = 0
        self.abs_sum = Fraction(0)
        self.sq_sum = Fraction(0)
        self.y_sum = Fraction(0)
        self.y_sq_sum = Fraction(0)

    def push(self, y, y_pred) -> None:
        y = Fraction(y)
        r = y - y_pred
        self.count += 1
        self.abs_sum += abs(r)
        self.sq_sum += r * r
        self.y_sum += y
        self.y_sq_sum += y * y

    def merge(self, other: "MetricsAccumulator") -> "MetricsAccumulator":
        merged = MetricsAccumulator()
        merged.count = self.count + other.count
        merged.abs_sum = self.abs_sum + other.abs_sum
        merged.sq_sum = self.sq_sum + other.sq_sum
        merged.y_sum = self.y_sum + other.y_sum
        merged.y_sq_sum = self.y_sq_sum + other.y_sq_sum
        return merged

    def report(self, precision: int = DEFAULT_PRECISION) -> "MetricsReport":
        if self.count == 0:
            raise ValueError("no observations accumulated")
        n = self.count
        ss_tot = self.y_sq_sum - self.y_sum ** 2 / n
        if ss_tot == 0:
            raise ValueError("zero total variance")
        mae_value = self.abs_sum / n
        mse_value = self.sq_sum / n
        r2_value = 1 - self.sq_sum / ss_tot
        return MetricsReport(
            count=n, mae=mae_value, mse=mse_value, r2=r2_value,
            precision=precision,
            rendered={
                "mae": render_decimal(mae_value, precision),
                "mse": render_decimal(mse_value, precision),
                "r2": render_decimal(r2_value, precision),
            },
        )


@dataclass(frozen=True)
class MetricsReport:
    count: int
    mae: Fraction
    mse: Fraction
    r2: Fraction
    precision: int = DEFAULT_PRECISION
    rendered: dict = field(default_factory=dict)


def evaluate(model, samples, precision: int = DEFAULT_PRECISION) -> MetricsReport:
    """Evaluate a model over samples ((x, y) pairs or dataset rows)."""
    acc = MetricsAccumulator()
    for sample in samples:
        x, y = _as_xy(sample)
        acc.push(y, model.predict(x))
    return acc.report(precision)


def report_to_json(report: MetricsReport) -> dict:
    def frac(v):
        return {"num": str(v.numerator), "den": str(v.denominator)}

    return {
        "count": report.count,
        "mae": frac(report.mae),
        "mse": frac(report.mse),
        "r2": frac(report.r2),
        "precision": report.precision,
        "rendered": dict(report.rendered),
    }


def report_from_json(doc: dict) -> MetricsReport:
    def frac(obj):
        return Fraction(int(obj["num"]), int(obj["den"]))

    return MetricsReport(
        count=int(doc["count"]),
        mae=frac(doc["mae"]),
        mse=frac(doc["mse"]),
        r2=frac(doc["r2"]),
        precision=int(doc.get("precision", DEFAULT_PRECISION)),
        rendered=dict(doc.get("rendered", {})),
    )


def _floor_log10(num: int, den: int) -> int:
    """floor(log10(num/den)) for positive num/den, exactly."""
    e = len(str(num)) - len(str(den))
    # value < 10^e ?
    while (num < den * 10 ** e) if e >= 0 else (num * 10 ** -e < den):
        e -= 1
    while (num >= den * 10 ** (e + 1)) if e + 1 >= 0 else (num * 10 ** -(e + 1) >= den):
        e += 1
    return e


def render_decimal(value, significant_digits: int = DEFAULT_PRECISION) -> str:
    """Correctly rounded (half-even) decimal string of an exact rational.

    Plain notation below 10^21; scientific above.  Always exactly
    `significant_digits` significant digits, trailing zeros included.
    """
    if significant_digits < 1:
        raise ValueError("significant_digits must be >= 1")
    value = Fraction(value)
    sd = significant_digits
    if value == 0:
        return "0" if sd == 1 else "0." + "0" * (sd - 1)
    sign = "-" if value < 0 else ""
    num, den = abs(value).numerator, abs(value).denominator
    e = _floor_log10(num, den)

    k = sd - 1 - e
    if k >= 0:
        scaled_num, scaled_den = num * 10 ** k, den
    else:
        scaled_num, scaled_den = num, den * 10 ** -k
    q, rem = divmod(scaled_num, scaled_den)
    if 2 * rem > scaled_den or (2 * rem == scaled_den and q % 2 == 1):
        q += 1
    if q == 10 ** sd:  # rounding carried into a new leading digit
        q //= 10
        e += 1
    digits = str(q)

    if e >= _EXPONENT_THRESHOLD:
        if sd == 1:
            return f"{sign}{digits}e+{e}"
        return f"{sign}{digits[0]}.{digits[1:]}e+{e}"
    if e < 0:
        return sign + "0." + "0" * (-e - 1) + digits
    if e >= sd - 1:
        return sign + digits + "0" * (e - sd + 1)
    return sign + digits[:e + 1] + "." + digits[e + 1:]


@dataclass(frozen=True)
class HistogramSpec:
    bin_count: int = 100

    def __post_init__(self):
        if self.bin_count < 1:
            raise ValueError("bin_count must be >= 1")


@dataclass(frozen=True)
class Histogram:
    """Equal-width bins with exact rational edges; bins are left-closed,
    right-open, except the last which is closed."""

    edges: tuple
    counts: tuple

    def total(self) -> int:
        return sum(self.counts)


def histogram(values: Iterable[Fraction], spec: HistogramSpec = HistogramSpec()) -> Histogram:
    data = [Fraction(v) for v in values]
    if not data:
        raise ValueError("histogram of empty residual set")
    lo, hi = min(data), max(data)
    if lo == hi:  # degenerate range: widen so bins have nonzero width
        lo, hi = lo - 1, hi + 1
    bins = spec.bin_count
    width = hi - lo
    counts = [0] * bins
    for v in data:
        idx = int((v - lo) * bins / width)
        if idx == bins:
            idx -= 1
        counts[idx] += 1
    edges = tuple(lo + width * i / bins for i in range(bins + 1))
    return Histogram(edges=edges, counts=tuple(counts))
