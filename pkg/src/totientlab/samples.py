"""Deterministic, seeded generation of RSA semiprime samples.

Each sample index gets its own RNG stream derived from (master_seed,
index), so a dataset is reproducible byte-for-byte regardless of how
generation is spread over workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .ntheory import DEFAULT_POLICY, PrimalityPolicy, is_probable_prime

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int) -> int:
    """Stable 64-bit mix of a seed and a counter (splitmix64 finalizer)."""
    z = (seed ^ ((index + 1) * _GOLDEN)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """Counter-derived pseudo-random stream.

    The emitted sequence is a pure function of (master_seed,
    stream_index).  Not cryptographic; statistical quality is all the
    sampling here needs.
    """

    def __init__(self, master_seed: int, stream_index: int):
        self.master_seed = master_seed & _MASK64
        self.stream_index = stream_index & _MASK64
        self._state = mix64(self.master_seed, self.stream_index)

    def next64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state, 0)

    def getrandbits(self, bits: int) -> int:
        if bits < 1:
            raise ValueError("bits must be >= 1")
        value = 0
        filled = 0
        while filled < bits:
            value = (value << 64) | self.next64()
            filled += 64
        return value >> (filled - bits)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        bits = bound.bit_length()
        while True:
            value = self.getrandbits(bits)
            if value < bound:
                return value


@dataclass(frozen=True)
class RsaSample:
    """One dataset row: odd primes p != q, modulus n = p*q, and the
    regression target epsilon = phi(n)/2 - 1."""

    p: int
    q: int
    n: int
    epsilon: int

    def prime_sum(self) -> int:
        return self.p + self.q


def check_sample(sample: RsaSample, modulus_bits: int | None = None) -> None:
    """Raise ValueError on any violated row invariant (cheap checks only;
    primality is the caller's concern)."""
    p, q, n, eps = sample.p, sample.q, sample.n, sample.epsilon
    if p % 2 == 0 or q % 2 == 0 or p < 3 or q < 3:
        raise ValueError("p and q must be odd primes >= 3")
    if p == q:
        raise ValueError("p and q must be distinct")
    if n != p * q:
        raise ValueError("n != p*q")
    if 2 * (eps + 1) != (p - 1) * (q - 1):
        raise ValueError("epsilon != phi/2 - 1")
    if eps % 2 == 0:
        raise ValueError("epsilon must be odd")
    if modulus_bits is not None and n.bit_length() != modulus_bits:
        raise ValueError(f"n has {n.bit_length()} bits, expected {modulus_bits}")


def random_prime(bits: int, rng: RngStream,
                 policy: PrimalityPolicy = DEFAULT_POLICY) -> int:
    """Uniform prime with exactly `bits` bits (top bit set), by rejection
    sampling of odd candidates."""
    if bits < 3:
        raise ValueError("bits must be >= 3")
    top = 1 << (bits - 1)
    while True:
        candidate = rng.getrandbits(bits) | top | 1
        if is_probable_prime(candidate, policy, rng):
            return candidate


def generate_sample(modulus_bits: int, rng: RngStream,
                    policy: PrimalityPolicy = DEFAULT_POLICY) -> RsaSample:
    """Draw a semiprime sample whose modulus has exactly modulus_bits bits.

    Both primes carry modulus_bits/2 bits; the pair is redrawn until the
    product reaches the full bit length and p != q.
    """
    if modulus_bits < 8 or modulus_bits % 2 != 0:
        raise ValueError("modulus_bits must be even and >= 8")
    half = modulus_bits // 2
    while True:
        p = random_prime(half, rng, policy)
        q = random_prime(half, rng, policy)
        if p == q:
            continue
        n = p * q
        if n.bit_length() == modulus_bits:
            epsilon = (p - 1) * (q - 1) // 2 - 1
            return RsaSample(p, q, n, epsilon)


def generate_dataset(modulus_bits: int, count: int, master_seed: int,
                     threads: int = 1) -> Iterator[RsaSample]:
    """Emit `count` samples in index order.

    Sample i depends only on RngStream(master_seed, i), so the output is
    identical across runs and across worker counts.
    """
    if count < 1:
        raise ValueError("count must be >= 1")

    def one(i: int) -> RsaSample:
        return generate_sample(modulus_bits, RngStream(master_seed, i))

    if threads <= 1:
        for i in range(count):
            yield one(i)
        return

    chunk = 64

    def run_chunk(start: int) -> list[RsaSample]:
        return [one(i) for i in range(start, min(start + chunk, count))]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for block in pool.map(run_chunk, range(0, count, chunk)):
            yield from block
