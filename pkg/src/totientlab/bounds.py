"""Classical totient bounds and the learned bound, compared per modulus.

Directed rounding discipline: upper bounds are evaluated rounding toward
+inf, lower bounds toward -inf, so a reported bound is always valid at
any working precision.  Verdicts use exact integer tests where the bound
allows it (Kendall: phi^3 > n^2; Sierpinski: (n-phi)^2 >= n) and the
safe rounding direction otherwise, so doubling the precision never flips
a verdict.

Transcendental evaluation is delegated to gmpy2/MPFR under explicit
per-operation contexts.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import gmpy2
from gmpy2 import mpfr

from .ntheory import iroot
from .regress import LinearModel, phi_lower_bound

DEFAULT_PRECISION = 128

KENDALL_MIN = 31       # bound stated for n > 30
HATALOVA_MIN = 3
FANG_MIN = 16          # keeps ln ln n > 1 and the main term sane


def _check_precision(precision: int) -> None:
    if precision < 53:
        raise ValueError("precision must be >= 53 bits")


def sierpinski_upper(n: int, precision: int = DEFAULT_PRECISION) -> mpfr:
    """n - sqrt(n), rounded toward +inf (valid upper bound for phi of any
    composite n)."""
    _check_precision(precision)
    if n < 4:
        raise ValueError("needs composite n >= 4")
    with gmpy2.context(precision=precision, round=gmpy2.RoundDown):
        root = gmpy2.sqrt(mpfr(n))
    with gmpy2.context(precision=precision, round=gmpy2.RoundUp):
        return mpfr(n) - root


def kendall_lower(n: int) -> int:
    """floor(n^(2/3)), exact; the bound phi > n^(2/3) holds for n > 30."""
    if n <= 30:
        raise ValueError("Kendall bound needs n > 30")
    return iroot(n * n, 3)


def kendall_holds(n: int, phi: int) -> bool:
    """Exact verdict for phi > n^(2/3), no floor artifacts."""
    return phi ** 3 > n * n


def sierpinski_holds(n: int, phi: int) -> bool:
    """Exact verdict for phi <= n - sqrt(n)."""
    gap = n - phi
    return gap >= 0 and gap * gap >= n


def hatalova_lower(n: int, precision: int = DEFAULT_PRECISION) -> mpfr:
    """(ln 2 / 2) * n / ln n, rounded toward -inf."""
    _check_precision(precision)
    if n < HATALOVA_MIN:
        raise ValueError("Hatalova bound needs n >= 3")
    with gmpy2.context(precision=precision, round=gmpy2.RoundUp):
        log_n_up = gmpy2.log(mpfr(n))
    with gmpy2.context(precision=precision, round=gmpy2.RoundDown):
        numerator = gmpy2.log(mpfr(2)) * mpfr(n) / 2
        return numerator / log_n_up


def _hatalova_upper(n: int, precision: int) -> mpfr:
    # Safe side for the verdict phi > bound.
    with gmpy2.context(precision=precision, round=gmpy2.RoundDown):
        log_n_down = gmpy2.log(mpfr(n))
    with gmpy2.context(precision=precision, round=gmpy2.RoundUp):
        numerator = gmpy2.log(mpfr(2)) * mpfr(n) / 2
        return numerator / log_n_down


def hatalova_holds(n: int, phi: int, precision: int = DEFAULT_PRECISION) -> bool:
    return phi > _hatalova_upper(n, precision)


def fang_main_term(n: int, precision: int = DEFAULT_PRECISION) -> mpfr:
    """n / (e^gamma * ln ln n), rounded toward -inf.

    Main term only; the uncomputable error term means this is reported as
    a heuristic reference curve, never asserted as a bound.
    """
    _check_precision(precision)
    if n < FANG_MIN:
        raise ValueError("Fang main term needs n >= 16")
    with gmpy2.context(precision=precision, round=gmpy2.RoundUp):
        log_log_up = gmpy2.log(gmpy2.log(mpfr(n)))
        denominator = gmpy2.exp(gmpy2.const_euler()) * log_log_up
    with gmpy2.context(precision=precision, round=gmpy2.RoundDown):
        return mpfr(n) / denominator


@dataclass(frozen=True)
class BoundReport:
    """Per-modulus bound evaluation; fields are None where a bound's
    domain does not cover n or its input was not supplied."""

    n: int
    phi: int | None
    learned_lower: int | None
    kendall_lower: int | None
    hatalova_lower: mpfr | None
    sierpinski_upper: mpfr | None
    fang_main_term: mpfr | None
    verdicts: dict
    tightness: dict
    precision: int


def _tightness(bound, phi: int, precision: int) -> mpfr:
    with gmpy2.context(precision=precision):
        return (mpfr(bound) - mpfr(phi)) / mpfr(phi)


def compare(n: int, p: int | None = None, q: int | None = None,
            model: LinearModel | None = None,
            precision: int = DEFAULT_PRECISION) -> BoundReport:
    """Evaluate every applicable bound at n; verdicts and tightness are
    filled when the factorization (hence phi) is known."""
    _check_precision(precision)
    if (p is None) != (q is None):
        raise ValueError("supply both factors or neither")
    phi = None
    if p is not None:
        if p * q != n:
            raise ValueError("p*q != n")
        phi = (p - 1) * (q - 1)

    learned = None
    learned_exact = None
    if model is not None:
        learned_exact = phi_lower_bound(model, n)
        learned = math.floor(learned_exact)

    kendall = kendall_lower(n) if n > 30 else None
    hatalova = hatalova_lower(n, precision) if n >= HATALOVA_MIN else None
    sierpinski = sierpinski_upper(n, precision) if n >= 4 else None
    fang = fang_main_term(n, precision) if n >= FANG_MIN else None

    verdicts = {}
    tightness = {}
    if phi is not None:
        if learned_exact is not None:
            verdicts["learned"] = learned_exact < phi
            tightness["learned"] = _tightness(learned_exact, phi, precision)
        if kendall is not None:
            verdicts["kendall"] = kendall_holds(n, phi)
            tightness["kendall"] = _tightness(kendall, phi, precision)
        if hatalova is not None:
            verdicts["hatalova"] = hatalova_holds(n, phi, precision)
            tightness["hatalova"] = _tightness(hatalova, phi, precision)
        if sierpinski is not None:
            verdicts["sierpinski"] = sierpinski_holds(n, phi)
            tightness["sierpinski"] = _tightness(sierpinski, phi, precision)
        if fang is not None:
            tightness["fang"] = _tightness(fang, phi, precision)

    return BoundReport(
        n=n, phi=phi, learned_lower=learned, kendall_lower=kendall,
        hatalova_lower=hatalova, sierpinski_upper=sierpinski,
        fang_main_term=fang, verdicts=verdicts, tightness=tightness,
        precision=precision,
    )


_CSV_HEADER = ("n,phi,learned_lower,kendall_lower,hatalova_lower,"
               "sierpinski_upper,fang_main_term,verdicts")

_VERDICT_ORDER = ("learned", "kendall", "hatalova", "sierpinski")


def _verdict_cell(report: BoundReport) -> str:
    parts = [f"{name}={'pass' if report.verdicts[name] else 'FAIL'}"
             for name in _VERDICT_ORDER if name in report.verdicts]
    if report.fang_main_term is not None:
        parts.append("fang=heuristic")
    return ";".join(parts)


def write_csv(reports: Iterable[BoundReport], destination) -> int:
    """Bound comparison table; missing values are empty cells."""

    def cell(value):
        return "" if value is None else str(value)

    close = False
    if isinstance(destination, (str, Path)):
        handle = open(destination, "w", encoding="utf-8", newline="")
        close = True
    else:
        handle = destination
    rows = 0
    try:
        handle.write(_CSV_HEADER + "\n")
        for r in reports:
            handle.write(",".join([
                str(r.n), cell(r.phi), cell(r.learned_lower),
                cell(r.kendall_lower), cell(r.hatalova_lower),
                cell(r.sierpinski_upper), cell(r.fang_main_term),
                _verdict_cell(r),
            ]) + "\n")
            rows += 1
    finally:
        if close:
            handle.close()
    return rows
