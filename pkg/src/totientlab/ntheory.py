"""Arbitrary-precision number-theoretic primitives.

Modular exponentiation, Miller-Rabin primality, integer roots and
perfect-square testing.  Everything here is a pure function of its
arguments (plus an explicit RNG stream where witnesses are random), so
all of it is safe to call from concurrent workers.
"""

from dataclasses import dataclass

# Correct for every n < 3.3 * 10^24, which covers the full 64-bit range.
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_DETERMINISTIC_LIMIT = 1 << 64

# Cheap divisibility screen applied before any witness work.
_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    67, 71, 73, 79, 83, 89, 97,
)

DETERMINISTIC_SMALL = "deterministic_small"
PROBABILISTIC = "probabilistic"


@dataclass(frozen=True)
class PrimalityPolicy:
    """Witness strategy: fixed witness set below 2^64, random rounds above."""

    mode: str = DETERMINISTIC_SMALL
    rounds: int = 64

    def __post_init__(self):
        if self.mode not in (DETERMINISTIC_SMALL, PROBABILISTIC):
            raise ValueError(f"unknown primality mode: {self.mode!r}")
        if self.mode == PROBABILISTIC and self.rounds < 1:
            raise ValueError("probabilistic mode needs rounds >= 1")


DEFAULT_POLICY = PrimalityPolicy()


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """base^exponent mod modulus for non-negative integers, modulus >= 1."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if base < 0 or exponent < 0:
        raise ValueError("base and exponent must be non-negative")
    return pow(base, exponent, modulus)


def _miller_rabin_witness(n: int, d: int, r: int, a: int) -> bool:
    """True if witness a proves n composite; n - 1 = d * 2^r with d odd."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = (x * x) % n
        if x == n - 1:
            return False
    return True


def is_probable_prime(n: int, policy: PrimalityPolicy = DEFAULT_POLICY,
                      rng=None) -> bool:
    """Miller-Rabin primality test.

    Exact for n < 2^64 under the fixed witness set; above that (or in
    probabilistic mode) uses policy.rounds random witnesses drawn from
    rng, with false-positive probability <= 4^-rounds.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False

    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1

    if policy.mode == DETERMINISTIC_SMALL and n < _DETERMINISTIC_LIMIT:
        witnesses = _DETERMINISTIC_WITNESSES
        return not any(_miller_rabin_witness(n, d, r, a) for a in witnesses)

    if rng is None:
        raise ValueError("random-witness testing needs an explicit rng")
    for _ in range(policy.rounds):
        a = 2 + rng.randbelow(n - 3)  # witness in [2, n-2]
        if _miller_rabin_witness(n, d, r, a):
            return False
    return True


def isqrt(n: int) -> int:
    """Floor square root by integer Newton iteration.

    The returned r always satisfies r^2 <= n < (r+1)^2; the trailing
    adjustment enforces this regardless of iteration count.
    """
    if n < 0:
        raise ValueError("isqrt of negative number")
    if n < 2:
        return n
    x = 1 << (n.bit_length() + 1) // 2  # >= sqrt(n)
    while True:
        y = (x + n // x) // 2
        if y >= x:
            break
        x = y
    while x * x > n:
        x -= 1
    while (x + 1) * (x + 1) <= n:
        x += 1
    return x


def iroot(n: int, k: int) -> int:
    """Floor k-th root: r with r^k <= n < (r+1)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("iroot of negative number")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << (-(-n.bit_length() // k) + 1)  # >= n^(1/k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def is_perfect_square(n: int) -> tuple[bool, int]:
    """(True, r) with r^2 = n when n is square, else (False, floor(sqrt(n)))."""
    r = isqrt(n)
    return (r * r == n, r)
