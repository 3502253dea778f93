"""Streaming persistence, splitting and summary statistics for sample sets.

On-disk format (bit-exact, UTF-8, LF endings):

    # totient-dataset v1 bits=<B> count=<C> seed=<S>
    p,q,n,epsilon
    <p>,<q>,<n>,<epsilon>
    ...

All integers are plain base-10 ASCII, so 512-bit values survive
round-trips and the files stay diff-able.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .samples import RsaSample, mix64

FORMAT_VERSION = 1

_HEADER_RE = re.compile(
    r"# totient-dataset v(\d+) bits=(\d+) count=(\d+) seed=(\d+)$"
)
_COLUMNS = "p,q,n,epsilon"


class DatasetFormatError(ValueError):
    """Malformed dataset file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class DatasetHeader:
    modulus_bits: int
    count: int
    master_seed: int
    format_version: int = FORMAT_VERSION

    def render(self) -> str:
        return (f"# totient-dataset v{self.format_version} "
                f"bits={self.modulus_bits} count={self.count} "
                f"seed={self.master_seed}")


@dataclass(frozen=True)
class SplitSpec:
    """Per-row train/test assignment; train share defaults to 4/5."""

    train_fraction: Fraction = Fraction(4, 5)
    split_seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie strictly in (0, 1)")


def in_train(spec: SplitSpec, index: int) -> bool:
    """Pure per-row assignment: a 64-bit hash of (split_seed, index)
    compared against train_fraction, exactly (no floats)."""
    value = mix64(spec.split_seed, index)
    frac = spec.train_fraction
    return value * frac.denominator < frac.numerator << 64


def split(samples: Iterable[RsaSample], spec: SplitSpec):
    """Partition into (train, test), both preserving input order.

    Materializes the partitions; callers that must stay streaming can
    drive in_train() over row indices themselves.
    """
    train: list[RsaSample] = []
    test: list[RsaSample] = []
    for i, sample in enumerate(samples):
        (train if in_train(spec, i) else test).append(sample)
    return train, test


def write_csv(header: DatasetHeader, samples: Iterable[RsaSample],
              destination) -> int:
    """Write the dataset file; returns the number of data rows.

    The header's count must match the stream length (the count line is
    what read_csv trusts).
    """
    close = False
    if isinstance(destination, (str, Path)):
        handle = open(destination, "w", encoding="utf-8", newline="")
        close = True
    else:
        handle = destination
    try:
        handle.write(header.render() + "\n")
        handle.write(_COLUMNS + "\n")
        rows = 0
        for s in samples:
            handle.write(f"{s.p},{s.q},{s.n},{s.epsilon}\n")
            rows += 1
    except OSError as exc:
        raise OSError(f"writing dataset to {destination}: {exc}") from exc
    finally:
        if close:
            handle.close()
    if rows != header.count:
        raise ValueError(
            f"header declares {header.count} rows but {rows} were written")
    return rows


def _parse_header(first: str, second: str) -> DatasetHeader:
    match = _HEADER_RE.match(first.rstrip("\n"))
    if not match:
        raise DatasetFormatError("bad dataset header line", 1)
    version, bits, count, seed = (int(g) for g in match.groups())
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported format version {version}", 1)
    if second.rstrip("\n") != _COLUMNS:
        raise DatasetFormatError(f"expected column line {_COLUMNS!r}", 2)
    return DatasetHeader(modulus_bits=bits, count=count, master_seed=seed)


def read_csv(source, strict: bool = True):
    """Open a dataset file; returns (header, row iterator).

    Rows are streamed, not loaded at once.  In strict mode (default)
    every row is checked against n = p*q and 2(epsilon+1) = (p-1)(q-1);
    the trailing row count must match the header.
    """
    close = False
    if isinstance(source, (str, Path)):
        handle = open(source, "r", encoding="utf-8")
        close = True
    else:
        handle = source

    first = handle.readline()
    second = handle.readline()
    try:
        header = _parse_header(first, second)
    except DatasetFormatError:
        if close:
            handle.close()
        raise

    def rows() -> Iterator[RsaSample]:
        lineno = 2
        seen = 0
        try:
            for line in handle:
                lineno += 1
                parts = line.rstrip("\n").split(",")
                if len(parts) != 4:
                    raise DatasetFormatError(
                        f"expected 4 columns, got {len(parts)}", lineno)
                try:
                    p, q, n, eps = (int(part) for part in parts)
                except ValueError:
                    raise DatasetFormatError("malformed integer", lineno) from None
                if strict:
                    if n != p * q:
                        raise DatasetFormatError("n != p*q", lineno)
                    if 2 * (eps + 1) != (p - 1) * (q - 1):
                        raise DatasetFormatError(
                            "epsilon != phi/2 - 1", lineno)
                seen += 1
                yield RsaSample(p, q, n, eps)
            if strict and seen != header.count:
                raise DatasetFormatError(
                    f"header declares {header.count} rows, file has {seen}",
                    lineno + 1)
        finally:
            if close:
                handle.close()

    return header, rows()


@dataclass(frozen=True)
class DatasetStats:
    """Exact extrema and rational means of n, p+q and epsilon."""

    count: int
    n_min: int
    n_max: int
    n_mean: Fraction
    prime_sum_min: int
    prime_sum_max: int
    prime_sum_mean: Fraction
    epsilon_min: int
    epsilon_max: int
    epsilon_mean: Fraction


def stats(samples: Iterable[RsaSample]) -> DatasetStats:
    count = 0
    sums = [0, 0, 0]
    mins = [None, None, None]
    maxs = [None, None, None]
    for s in samples:
        values = (s.n, s.p + s.q, s.epsilon)
        for i, v in enumerate(values):
            sums[i] += v
            if mins[i] is None or v < mins[i]:
                mins[i] = v
            if maxs[i] is None or v > maxs[i]:
                maxs[i] = v
        count += 1
    if count == 0:
        raise ValueError("stats need at least one sample")
    return DatasetStats(
        count=count,
        n_min=mins[0], n_max=maxs[0], n_mean=Fraction(sums[0], count),
        prime_sum_min=mins[1], prime_sum_max=maxs[1],
        prime_sum_mean=Fraction(sums[1], count),
        epsilon_min=mins[2], epsilon_max=maxs[2],
        epsilon_mean=Fraction(sums[2], count),
    )
