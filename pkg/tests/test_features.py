import numpy as np
import pytest

from msad.features import FEATURE_NAMES, MinimalFeatures, apply_scaler, extract_minimal, fit_feature_scaler


def feature(fv, name):
    return fv[FEATURE_NAMES.index(name)]


def test_hand_computed_values():
    fv = extract_minimal([1.0, 2.0, 3.0, 4.0])
    assert feature(fv, "sum") == 10
    assert feature(fv, "mean") == 2.5
    assert feature(fv, "median") == 2.5
    assert feature(fv, "length") == 4
    assert feature(fv, "minimum") == 1
    assert feature(fv, "maximum") == 4
    assert feature(fv, "variance") == pytest.approx(1.25)
    assert feature(fv, "root_mean_square") == pytest.approx(np.sqrt(7.5))


def test_constant_window():
    fv = extract_minimal([-3.0] * 6)
    assert feature(fv, "standard_deviation") == 0
    assert feature(fv, "variance") == 0
    assert feature(fv, "root_mean_square") == pytest.approx(3.0)


def test_reversal_gives_same_features():
    w = np.array([5.0, -1.0, 2.0, 8.0, 0.0])
    assert np.array_equal(extract_minimal(w), extract_minimal(w[::-1]))


def test_matches_direct_formulas_on_random_windows():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        w = rng.normal(rng.uniform(-5, 5), rng.uniform(0.1, 3), rng.integers(1, 40))
        fv = extract_minimal(w)
        mean = sum(w) / len(w)
        var = sum((v - mean) ** 2 for v in w) / len(w)
        s = sorted(w)
        mid = len(s) // 2
        median = s[mid] if len(s) % 2 else (s[mid - 1] + s[mid]) / 2
        direct = [sum(w), mean, median, len(w), var**0.5, var, min(w), max(w), (sum(v * v for v in w) / len(w)) ** 0.5]
        assert np.allclose(fv, direct, rtol=1e-12, atol=1e-12)
        assert fv[6] <= fv[2] <= fv[7]
        assert fv[5] == pytest.approx(fv[4] ** 2, rel=1e-12, abs=1e-15)


def test_batch_shape_and_transformer():
    X = np.arange(12.0).reshape(3, 4)
    assert extract_minimal(X).shape == (3, 9)
    tr = MinimalFeatures().fit(X)
    assert np.array_equal(tr.transform(X), extract_minimal(X))
    assert list(tr.get_feature_names_out()) == list(FEATURE_NAMES)
    with pytest.raises(ValueError):
        extract_minimal(np.empty((2, 0)))


def test_scaler_properties():
    rng = np.random.default_rng(1)
    F = extract_minimal(rng.normal(size=(50, 16)))
    scaler = fit_feature_scaler(F)
    Z = apply_scaler(scaler, F)
    assert np.allclose(Z.mean(axis=0), 0, atol=1e-12)
    # the length column is constant
    assert np.all(Z[:, FEATURE_NAMES.index("length")] == 0)
    assert np.all(np.isfinite(Z))
    single = fit_feature_scaler(F[:1])
    assert np.all(apply_scaler(single, F[0]) == 0)
