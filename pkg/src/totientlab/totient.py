"""Totient and hyperbola-parameter formulas, plus a brute-force oracle.

For a semiprime n = p*q the totient is phi = (p-1)(q-1), the regression
target is epsilon = phi/2 - 1 (odd for odd primes), and the hyperbola
coordinates are X = 2(n-eps)(n+1) - (n-1)^2 and Y = 4n(n-eps)^2.
"""

from dataclasses import dataclass
from math import gcd

_BRUTEFORCE_CAP = 10 ** 7


@dataclass(frozen=True)
class HyperPoint:
    X: int  # may be negative: (n-1)^2 dominates once eps ~ n/2
    Y: int


def totient_semiprime(p: int, q: int) -> int:
    """phi(p*q) = (p-1)(q-1) for distinct primes."""
    if p == q:
        raise ValueError("totient_semiprime requires distinct primes")
    return (p - 1) * (q - 1)


def epsilon_of_phi(phi: int) -> int:
    """Invert phi = 2*(epsilon + 1)."""
    if phi % 2 != 0:
        raise ValueError("phi must be even")
    if phi < 4:
        raise ValueError("phi must be >= 4")
    return phi // 2 - 1


def phi_of_epsilon(epsilon: int) -> int:
    return 2 * (epsilon + 1)


def hyper_point(n: int, epsilon: int) -> HyperPoint:
    """Hyperbola coordinates of (n, epsilon); requires epsilon < n."""
    if epsilon >= n:
        raise ValueError("epsilon must be < n")
    d = n - epsilon
    return HyperPoint(X=2 * d * (n + 1) - (n - 1) ** 2, Y=4 * n * d * d)


def totient_bruteforce(n: int) -> int:
    """Count 1 <= k < n coprime to n; test oracle only, capped at 10^7.

    totient_bruteforce(1) = 1 by convention.
    """
    if n < 1 or n > _BRUTEFORCE_CAP:
        raise ValueError(f"oracle accepts 1 <= n <= {_BRUTEFORCE_CAP}")
    if n == 1:
        return 1
    return sum(1 for k in range(1, n) if gcd(k, n) == 1)
