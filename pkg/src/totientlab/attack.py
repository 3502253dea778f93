"""Attack-feasibility measurements for the totient predictors.

Two facts drive this module: knowing phi(n) exactly factors n in O(1)
(quadratic formula on p+q = n+1-phi), and knowing p+q approximately
turns factoring into a Fermat-style scan over candidate prime sums.
The distance between the predicted and true prime sum (the "window") is
therefore the honest measure of how much cryptanalytic value a
predictor carries.

fermat_search scans even candidate sums s' alternating outward from the
seed: start, start-2, start+2, start-4, start+4, ...  Candidates with
s'^2 < 4n cannot work (negative discriminant) and are skipped without
consuming budget.  Scanning the below side first makes a budget of
window+1 discriminant tests always sufficient when the seed comes from
predicted_sum (an odd seed rounds up to even, which shifts the upward
side half a step closer).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from statistics import median
from typing import Iterable

from .ntheory import (DEFAULT_POLICY, PrimalityPolicy, is_perfect_square,
                      is_probable_prime, isqrt)
from .regress import HALF, LinearModel
from .samples import RngStream, RsaSample

# Searches are pointless (and unaffordable) past this window; report the
# window's bit length instead.
DEFAULT_WINDOW_CAP = 1 << 40

_VERIFY_STREAM = (0xF37A11AC, 0)  # fixed stream for big-factor primality


class InconsistentPhiError(ValueError):
    """The claimed phi value cannot belong to the given modulus."""


@dataclass(frozen=True)
class AttackOutcome:
    success: bool
    p: int | None
    q: int | None
    iterations_used: int
    predicted_sum: int
    window: int | None = None  # |true sum - predicted|, filled by harnesses


def recover_factors_from_phi(n: int, phi: int) -> tuple[int, int]:
    """Factor a semiprime from its exact totient.

    p and q are the roots of z^2 - s z + n with s = n + 1 - phi; any
    inconsistency (negative or non-square discriminant, wrong parity,
    wrong product) raises InconsistentPhiError.
    """
    s = n + 1 - phi
    disc = s * s - 4 * n
    if s < 2 or disc < 0:
        raise InconsistentPhiError(f"phi={phi} impossible for n={n}")
    square, t = is_perfect_square(disc)
    if not square or (s - t) % 2 != 0:
        raise InconsistentPhiError(f"phi={phi} inconsistent with n={n}")
    p, q = (s - t) // 2, (s + t) // 2
    if p < 1 or p * q != n:
        raise InconsistentPhiError(f"phi={phi} inconsistent with n={n}")
    return p, q


def predicted_sum(model: LinearModel, n: int) -> int:
    """Predicted prime sum n + 1 - phi_hat(n) = 2*alpha - 1.

    Independent of n for a fixed slope-1/2 model; the n argument is kept
    for interface symmetry with the true quantity p+q it estimates.
    Non-integral 2*alpha (generic fitted intercepts) rounds to nearest.
    """
    if model.slope != HALF:
        raise ValueError("predicted_sum requires slope 1/2")
    exact = -2 * model.intercept - 1
    if exact.denominator == 1:
        return int(exact)
    return math.floor(exact + Fraction(1, 2))


def fermat_baseline_start(n: int) -> int:
    """ceil(2*sqrt(n)): the classical Fermat starting sum."""
    root = isqrt(4 * n)
    if root * root < 4 * n:
        root += 1
    return root


def _candidates(start_even: int, minimum_even: int):
    # Anything below minimum_even has a negative discriminant: skipped.
    if start_even >= minimum_even:
        yield start_even
    step = 2
    while True:
        below = start_even - step
        if below >= minimum_even:
            yield below
        above = start_even + step
        if above >= minimum_even:
            yield above
        step += 2


def fermat_search(n: int, start_sum: int | None = None, budget: int = 1,
                  policy: PrimalityPolicy = DEFAULT_POLICY,
                  rng: RngStream | None = None) -> AttackOutcome:
    """Budgeted Fermat scan for odd n, seeded at start_sum (default:
    classical start at ceil(2*sqrt(n))).

    The budget counts discriminant tests, the dominant cost; failure is
    a non-success outcome, not an error.  A success always carries two
    verified prime factors with p <= q.
    """
    if n < 9 or n % 2 == 0:
        raise ValueError("n must be an odd semiprime candidate >= 9")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if start_sum is None:
        start_sum = fermat_baseline_start(n)
    if rng is None:
        rng = RngStream(*_VERIFY_STREAM)

    start_even = start_sum + (start_sum & 1)
    minimum = fermat_baseline_start(n)
    minimum_even = minimum + (minimum & 1)

    tests = 0
    for s_cand in _candidates(start_even, minimum_even):
        tests += 1
        square, t = is_perfect_square(s_cand * s_cand - 4 * n)
        if square:
            p, q = (s_cand - t) // 2, (s_cand + t) // 2
            if (p >= 3 and is_probable_prime(p, policy, rng)
                    and is_probable_prime(q, policy, rng)):
                return AttackOutcome(True, p, q, tests, start_sum)
        if tests >= budget:
            break
    return AttackOutcome(False, None, None, tests, start_sum)


@dataclass(frozen=True)
class WindowRow:
    n: int
    true_sum: int
    predicted_sum: int
    window: int
    cost: int                     # window//2 + 1: tests if direction known
    window_bits: int              # bit length, the only sane cryptoscale unit
    searched: bool = False
    success: bool | None = None
    iterations_used: int | None = None


@dataclass(frozen=True)
class WindowSummary:
    count: int
    window_min: int
    window_median: Fraction
    window_max: int
    window_mean: Fraction
    cost_min: int
    cost_median: Fraction
    cost_max: int
    cost_mean: Fraction


@dataclass(frozen=True)
class WindowReport:
    rows: tuple
    summary: WindowSummary


def window_report(model: LinearModel, samples: Iterable[RsaSample],
                  run_searches: bool = False, budget: int | None = None,
                  window_cap: int = DEFAULT_WINDOW_CAP) -> WindowReport:
    """Per-sample prime-sum windows for a slope-1/2 model.

    With run_searches, fermat_search is executed per sample (budget
    defaults to window+1, the guaranteed-sufficient value) unless the
    window exceeds window_cap, in which case only the window's bit
    length is reported.
    """
    rows = []
    for sample in samples:
        s_hat = predicted_sum(model, sample.n)
        true_sum = sample.p + sample.q
        window = abs(true_sum - s_hat)
        cost = window // 2 + 1
        searched = False
        success = None
        iterations = None
        if run_searches and window <= window_cap:
            outcome = fermat_search(sample.n, s_hat,
                                    budget if budget else window + 1)
            searched = True
            success = outcome.success
            iterations = outcome.iterations_used
        rows.append(WindowRow(
            n=sample.n, true_sum=true_sum, predicted_sum=s_hat,
            window=window, cost=cost, window_bits=window.bit_length(),
            searched=searched, success=success, iterations_used=iterations,
        ))
    if not rows:
        raise ValueError("window_report needs at least one sample")

    windows = [r.window for r in rows]
    costs = [r.cost for r in rows]

    def exact_median(values):
        return Fraction(median(values))

    summary = WindowSummary(
        count=len(rows),
        window_min=min(windows), window_median=exact_median(windows),
        window_max=max(windows),
        window_mean=Fraction(sum(windows), len(windows)),
        cost_min=min(costs), cost_median=exact_median(costs),
        cost_max=max(costs), cost_mean=Fraction(sum(costs), len(costs)),
    )
    return WindowReport(rows=tuple(rows), summary=summary)


_CSV_HEADER = ("n,true_sum,predicted_sum,window,cost,window_bits,"
               "searched,success,iterations_used")


def write_csv(report: WindowReport, destination) -> int:
    def cell(value):
        return "" if value is None else str(value)

    close = False
    if isinstance(destination, (str, Path)):
        handle = open(destination, "w", encoding="utf-8", newline="")
        close = True
    else:
        handle = destination
    try:
        handle.write(_CSV_HEADER + "\n")
        for r in report.rows:
            handle.write(",".join([
                str(r.n), str(r.true_sum), str(r.predicted_sum),
                str(r.window), str(r.cost), str(r.window_bits),
                str(r.searched), cell(r.success), cell(r.iterations_used),
            ]) + "\n")
    finally:
        if close:
            handle.close()
    return len(report.rows)


def summary_json(report: WindowReport) -> dict:
    def frac(v: Fraction) -> dict:
        return {"num": str(v.numerator), "den": str(v.denominator)}

    s = report.summary
    doc = {
        "count": s.count,
        "window": {
            "min": s.window_min, "median": frac(s.window_median),
            "max": s.window_max, "mean": frac(s.window_mean),
        },
        "cost": {
            "min": s.cost_min, "median": frac(s.cost_median),
            "max": s.cost_max, "mean": frac(s.cost_mean),
        },
    }
    searched = [r for r in report.rows if r.searched]
    if searched:
        doc["searches"] = {
            "run": len(searched),
            "successes": sum(1 for r in searched if r.success),
        }
    return doc
