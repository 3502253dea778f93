"""Independent oracles used by the test suite.

Everything here recomputes expected values by a different route than the
library (naive loops, sieves, two-pass statistics, literal candidate
enumeration) so that agreement is evidence, not tautology.
"""

from fractions import Fraction
from math import gcd


def naive_mod_pow(base: int, exponent: int, modulus: int) -> int:
    result = 1 % modulus
    for _ in range(exponent):
        result = (result * base) % modulus
    return result


def prime_sieve(limit: int) -> bytearray:
    """sieve[i] == 1 iff i is prime, for 0 <= i < limit."""
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    i = 2
    while i * i < limit:
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
        i += 1
    return sieve


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def count_coprimes(n: int) -> int:
    if n == 1:
        return 1
    return sum(1 for k in range(1, n) if gcd(k, n) == 1)


def two_pass_metrics(y_true, y_pred):
    """Naive two-pass MAE/MSE/R^2 over materialized lists, exact."""
    y_true = [Fraction(v) for v in y_true]
    y_pred = [Fraction(v) for v in y_pred]
    n = len(y_true)
    residual = [t - p for t, p in zip(y_true, y_pred)]
    mae = sum(abs(r) for r in residual) / n
    mse = sum(r * r for r in residual) / n
    mean = sum(y_true) / n
    ss_tot = sum((t - mean) ** 2 for t in y_true)
    ss_res = sum(r * r for r in residual)
    r2 = 1 - ss_res / ss_tot
    return mae, mse, r2


def enumerate_fermat_tests(n: int, start_sum: int, true_sum: int) -> int:
    """Walk the documented candidate order (start_even, then below/above
    alternation, below first), applying the negative-discriminant skip
    rule, and count tests up to and including the true sum."""
    start_even = start_sum + (start_sum & 1)
    tests = 0
    step = 0
    while True:
        if step == 0:
            candidates = [start_even]
        else:
            candidates = [start_even - step, start_even + step]
        for cand in candidates:
            if cand * cand < 4 * n:
                continue  # skipped, free
            tests += 1
            if cand == true_sum:
                return tests
        step += 2
        if step > 4 * (abs(true_sum - start_even) + 4):
            raise AssertionError("enumeration overshot the true sum")
