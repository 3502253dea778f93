import io
import random
from fractions import Fraction

import pytest

from totientlab.dataset import (DatasetFormatError, DatasetHeader, SplitSpec,
                                in_train, read_csv, split, stats, write_csv)
from totientlab.samples import RsaSample, generate_dataset

random.seed(20250802)

TOY = [RsaSample(3, 5, 15, 3), RsaSample(5, 7, 35, 11),
       RsaSample(11, 13, 143, 59)]


def _write_to_string(header, samples) -> str:
    buf = io.StringIO()
    write_csv(header, samples, buf)
    return buf.getvalue()


def test_write_csv_exact_format():
    text = _write_to_string(DatasetHeader(8, 1, 7), [RsaSample(3, 5, 15, 3)])
    assert text == ("# totient-dataset v1 bits=8 count=1 seed=7\n"
                    "p,q,n,epsilon\n"
                    "3,5,15,3\n")


def test_write_csv_empty_stream():
    text = _write_to_string(DatasetHeader(8, 0, 7), [])
    assert text == ("# totient-dataset v1 bits=8 count=0 seed=7\n"
                    "p,q,n,epsilon\n")


def test_write_csv_count_mismatch_is_an_error():
    with pytest.raises(ValueError):
        _write_to_string(DatasetHeader(8, 5, 7), [RsaSample(3, 5, 15, 3)])


def test_round_trip_small(tmp_path):
    path = tmp_path / "toy.csv"
    write_csv(DatasetHeader(8, len(TOY), 1), TOY, path)
    header, rows = read_csv(path)
    assert header == DatasetHeader(8, len(TOY), 1)
    assert list(rows) == TOY


def test_round_trip_512_bit_values(tmp_path):
    samples = list(generate_dataset(512, 5, 30))
    # the whole point: values beyond float range survive as text
    assert any(len(str(s.n)) >= 155 for s in samples)
    path = tmp_path / "big.csv"
    write_csv(DatasetHeader(512, 5, 30), samples, path)
    _, rows = read_csv(path)
    assert list(rows) == samples


def test_read_csv_strict_validation():
    good = ("# totient-dataset v1 bits=8 count=1 seed=0\n"
            "p,q,n,epsilon\n")
    _, rows = read_csv(io.StringIO(good + "3,5,15,3\n"))
    assert list(rows) == [RsaSample(3, 5, 15, 3)]

    _, rows = read_csv(io.StringIO(good + "3,5,16,3\n"))
    with pytest.raises(DatasetFormatError, match="line 3"):
        list(rows)

    _, rows = read_csv(io.StringIO(good + "3,5,15\n"))
    with pytest.raises(DatasetFormatError, match="4 columns"):
        list(rows)

    _, rows = read_csv(io.StringIO(good + "3,5,xx,3\n"))
    with pytest.raises(DatasetFormatError, match="malformed integer"):
        list(rows)


def test_read_csv_header_errors():
    with pytest.raises(DatasetFormatError, match="line 1"):
        read_csv(io.StringIO("garbage\np,q,n,epsilon\n"))
    with pytest.raises(DatasetFormatError, match="line 2"):
        read_csv(io.StringIO(
            "# totient-dataset v1 bits=8 count=0 seed=0\nwrong\n"))


def test_read_csv_count_mismatch():
    text = ("# totient-dataset v1 bits=8 count=2 seed=0\n"
            "p,q,n,epsilon\n"
            "3,5,15,3\n")
    _, rows = read_csv(io.StringIO(text))
    with pytest.raises(DatasetFormatError, match="declares 2"):
        list(rows)


def test_non_strict_mode_skips_row_validation():
    text = ("# totient-dataset v1 bits=8 count=1 seed=0\n"
            "p,q,n,epsilon\n"
            "3,5,16,3\n")
    _, rows = read_csv(io.StringIO(text), strict=False)
    assert list(rows)[0].n == 16


def test_split_spec_rejects_degenerate_fractions():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=Fraction(1))
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=Fraction(0))


def test_split_is_deterministic_partition():
    spec = SplitSpec(split_seed=99)
    train1, test1 = split(TOY, spec)
    train2, test2 = split(TOY, spec)
    assert (train1, test1) == (train2, test2)
    assert sorted(train1 + test1, key=lambda s: s.n) == \
        sorted(TOY, key=lambda s: s.n)
    assert not set(s.n for s in train1) & set(s.n for s in test1)


def test_split_preserves_order():
    spec = SplitSpec(split_seed=5)
    train, test = split(TOY, spec)
    ns = [s.n for s in TOY]
    assert [s.n for s in train] == sorted(
        (s.n for s in train), key=ns.index)
    assert [s.n for s in test] == sorted((s.n for s in test), key=ns.index)


def test_split_share_concentrates_near_fraction():
    spec = SplitSpec(split_seed=1234)
    count = 100_000
    share = sum(1 for i in range(count) if in_train(spec, i)) / count
    assert abs(share - 0.8) < 0.005


def test_split_share_other_fraction():
    spec = SplitSpec(train_fraction=Fraction(1, 3), split_seed=77)
    count = 60_000
    share = sum(1 for i in range(count) if in_train(spec, i)) / count
    assert abs(share - 1 / 3) < 0.01


def test_stats_single_and_pair():
    s = stats([TOY[0]])
    assert s.count == 1
    assert s.n_mean == 15 and s.prime_sum_mean == 8 and s.epsilon_mean == 3

    s = stats(TOY[:2])
    assert s.n_mean == 25
    assert s.epsilon_mean == 7
    assert s.n_min == 15 and s.n_max == 35
    assert s.n_min <= s.n_mean <= s.n_max
    assert s.prime_sum_min <= s.prime_sum_mean <= s.prime_sum_max


def test_stats_empty_is_an_error():
    with pytest.raises(ValueError):
        stats([])


def test_prime_sum_identity_links_stats_to_regression():
    # n/2 - eps = (p+q+1)/2 exactly, per sample
    for s in TOY:
        assert Fraction(s.n, 2) - s.epsilon == Fraction(s.p + s.q + 1, 2)
