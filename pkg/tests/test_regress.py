import io
import random
from fractions import Fraction

import pytest

from totientlab.regress import (CONSERVATIVE, FREE_OLS, HALF_SLOPE, PROVABLE,
                                FitError, LinearModel, ModelFormatError,
                                OlsSums, accumulate, attach_metrics,
                                fit_conservative, fit_free_ols,
                                fit_half_slope, fit_provable, load_model,
                                phi_lower_bound, predict, save_model)
from totientlab.metrics import evaluate
from totientlab.samples import generate_dataset

random.seed(20250803)

HALF = Fraction(1, 2)


def test_accumulate_hand_example():
    sums = accumulate([(1, 1), (2, 2)])
    assert sums == OlsSums(2, 3, 3, 5, 5)
    assert accumulate([]) == OlsSums()


def test_merge_is_associative_commutative_with_identity():
    for _ in range(50):
        data = [(random.randrange(-50, 50), random.randrange(-50, 50))
                for _ in range(random.randrange(0, 12))]
        cut = random.randrange(0, len(data) + 1)
        a, b = accumulate(data[:cut]), accumulate(data[cut:])
        assert a.merge(b) == accumulate(data)
        assert a.merge(b) == b.merge(a)
        assert a.merge(OlsSums()) == a


def test_free_ols_hand_examples():
    m = fit_free_ols(accumulate([(1, 1), (2, 2), (3, 3)]))
    assert (m.slope, m.intercept) == (1, 0)
    m = fit_free_ols(accumulate([(0, 1), (2, 2)]))
    assert (m.slope, m.intercept) == (HALF, 1)
    m = fit_free_ols(accumulate([(0, 0), (1, 0), (2, 3)]))
    assert (m.slope, m.intercept) == (Fraction(3, 2), Fraction(-1, 2))


def test_free_ols_satisfies_normal_equations_exactly():
    # substitute the fit back into both normal equations as identities
    for _ in range(60):
        n = random.randrange(2, 15)
        data = [(random.randrange(-1000, 1000), random.randrange(-1000, 1000))
                for _ in range(n)]
        sums = accumulate(data)
        if sums.count * sums.sum_xx == sums.sum_x ** 2:
            continue
        m = fit_free_ols(sums)
        assert m.slope * sums.sum_xx + m.intercept * sums.sum_x == sums.sum_xy
        assert m.slope * sums.sum_x + m.intercept * sums.count == sums.sum_y


def test_free_ols_degenerate_variance():
    with pytest.raises(FitError):
        fit_free_ols(accumulate([(3, 1), (3, 2), (3, 5)]))
    with pytest.raises(FitError):
        fit_free_ols(accumulate([(3, 1)]))


def test_half_slope_hand_examples():
    assert fit_half_slope(accumulate([(2, 1)])).intercept == 0
    assert fit_half_slope(accumulate([(2, 2), (4, 2)])).intercept == HALF
    with pytest.raises(FitError):
        fit_half_slope(accumulate([]))


def test_half_slope_intercept_is_negated_mean_half_prime_sum():
    samples = list(generate_dataset(24, 60, 17))
    sums = accumulate((s.n, s.epsilon) for s in samples)
    m = fit_half_slope(sums)
    mean = Fraction(sum(s.p + s.q + 1 for s in samples), 2 * len(samples))
    assert m.intercept == -mean


def test_conservative_hand_example():
    m = fit_conservative([(10, 2), (20, 8)])
    assert m.intercept == -3
    assert [m.predict(x) for x in (10, 20)] == [2, 7]

    single = fit_conservative([(14, 5)])
    assert single.predict(14) == 5  # equality at the only point

    with pytest.raises(FitError):
        fit_conservative([])


def test_conservative_never_overpredicts_training_data():
    samples = list(generate_dataset(32, 100, 21))
    pairs = [(s.n, s.epsilon) for s in samples]
    m = fit_conservative(pairs)
    assert all(m.predict(x) <= y for x, y in pairs)
    assert any(m.predict(x) == y for x, y in pairs)
    # alpha = max (p+q+1)/2 over the training set
    assert m.alpha == max(Fraction(s.p + s.q + 1, 2) for s in samples)


def test_conservative_intercept_below_half_slope_intercept():
    samples = list(generate_dataset(32, 80, 22))
    pairs = [(s.n, s.epsilon) for s in samples]
    cons = fit_conservative(pairs)
    half = fit_half_slope(accumulate(pairs))
    assert cons.intercept <= half.intercept


def test_provable_definition_and_guard():
    m = fit_provable(8)
    assert m.intercept == -16
    assert m.predict(143) == Fraction(111, 2)  # 55.5 < eps = 59
    assert fit_provable(64).intercept == -(1 << 32)
    with pytest.raises(ValueError):
        fit_provable(9)


def test_provable_exhaustive_over_4_and_5_bit_primes():
    four_bit = [11, 13]
    five_bit = [17, 19, 23, 29, 31]
    for primes, bits in ((four_bit, 8), (five_bit, 10)):
        m = fit_provable(bits)
        for p in primes:
            for q in primes:
                if p == q:
                    continue
                n = p * q
                eps = (p - 1) * (q - 1) // 2 - 1
                assert m.predict(n) < eps


def test_predict_examples():
    m = LinearModel(HALF, Fraction(-16), PROVABLE, 8)
    assert predict(m, 143) == Fraction(143, 2) - 16 == Fraction(111, 2)
    ident = LinearModel(Fraction(1), Fraction(0), FREE_OLS)
    assert predict(ident, 12345) == 12345
    big_alpha = LinearModel(HALF, Fraction(-1637177340), HALF_SLOPE, 64)
    assert predict(big_alpha, 2 * 1637177340 + 2) == 1


def test_phi_lower_bound():
    m = fit_provable(8)
    assert phi_lower_bound(m, 143) == 113
    assert 113 < 120  # true phi
    # bound = 2*(prediction + 1)
    assert phi_lower_bound(m, 143) == 2 * (m.predict(143) + 1)
    free = LinearModel(Fraction(1), Fraction(0), FREE_OLS)
    with pytest.raises(ValueError):
        phi_lower_bound(free, 10)


def test_phi_lower_bound_of_conservative_fit_holds_on_training_set():
    samples = list(generate_dataset(32, 60, 23))
    m = fit_conservative((s.n, s.epsilon) for s in samples)
    for s in samples:
        assert phi_lower_bound(m, s.n) <= (s.p - 1) * (s.q - 1)


def test_mode_slope_invariant():
    with pytest.raises(ValueError):
        LinearModel(Fraction(1), Fraction(0), HALF_SLOPE)
    with pytest.raises(ValueError):
        LinearModel(HALF, Fraction(0), "banana")


def test_model_round_trip(tmp_path):
    samples = list(generate_dataset(24, 40, 19))
    m = fit_half_slope(accumulate((s.n, s.epsilon) for s in samples),
                       modulus_bits=24, master_seed=19)
    m = attach_metrics(m, evaluate(m, samples))
    path = tmp_path / "model.json"
    save_model(m, path)
    assert load_model(path) == m


def test_model_round_trip_512_bit_intercept():
    m = fit_provable(512)
    buf = io.StringIO()
    save_model(m, buf)
    text = buf.getvalue()
    assert str(1 << 256) in text  # intercept serialized losslessly
    assert load_model(io.StringIO(text)) == m


def test_model_file_shape(tmp_path):
    import json
    m = fit_provable(8, master_seed=5)
    path = tmp_path / "m.json"
    save_model(m, path)
    doc = json.loads(path.read_text())
    assert doc["format"] == "totient-model/v1"
    assert doc["mode"] == "provable"
    assert doc["bits"] == 8
    assert doc["seed"] == 5
    assert doc["slope"] == {"num": "1", "den": "2"}
    assert doc["intercept"] == {"num": "-16", "den": "1"}


def test_load_model_rejects_bad_documents():
    with pytest.raises(ModelFormatError):
        load_model(io.StringIO("not json"))
    with pytest.raises(ModelFormatError):
        load_model(io.StringIO('{"format": "other/v9"}'))
    bad_mode = ('{"format": "totient-model/v1", "mode": "quadratic", '
                '"bits": 8, "train_count": 0, "seed": 0, '
                '"slope": {"num": "1", "den": "2"}, '
                '"intercept": {"num": "-16", "den": "1"}}')
    with pytest.raises(ModelFormatError):
        load_model(io.StringIO(bad_mode))
