import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msad.core import (
    TimeSeries,
    align_score,
    minmax_normalize,
    segment,
    segment_array,
    sliding_windows,
    window_starts,
    znormalize,
)
from msad.synthetic import generate_synthetic


def test_segmentation_identities_exhaustive():
    for n in range(1, 65):
        x = np.arange(n, dtype=float)
        for length in range(1, n + 1):
            starts = window_starts(n, length)
            assert len(starts) == math.ceil(n / length)
            assert starts[0] == 0 and starts[-1] + length == n
            covered = np.zeros(n, dtype=int)
            for s in starts:
                covered[s:s + length] += 1
            assert covered.min() == 1
            # only the first two windows may overlap
            assert covered.sum() - n == len(starts) * length - n
            wins = segment(x, length)
            assert all(w.length == length for w in wins)
            assert np.array_equal(segment_array(x, length), np.stack([w.values for w in wins]))


def test_alignment_identities_exhaustive():
    for n in range(2, 65):
        for length in range(1, n):
            sub = np.arange(n - length, dtype=float) + 1
            out = align_score(sub, length)
            assert out.size == n
            head, tail = -(-length // 2), length // 2
            assert np.all(out[:head] == sub[0])
            assert np.all(out[n - tail:] == sub[-1])
            assert np.array_equal(out[head:n - tail], sub)


def test_window_examples():
    assert window_starts(10, 5) == [0, 5]
    assert window_starts(10, 4) == [0, 2, 6]
    with pytest.raises(ValueError):
        window_starts(3, 4)


def test_minmax_examples():
    assert np.allclose(minmax_normalize([1.0, 2.0, 3.0]), [0.0, 0.5, 1.0])
    assert np.all(minmax_normalize([4.0, 4.0]) == 0.5)
    with pytest.raises(ValueError):
        minmax_normalize([np.nan, 1.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_znormalize_idempotent(xs):
    z = znormalize(np.array(xs))
    zz = znormalize(z)
    assert np.allclose(z, zz, atol=1e-6)
    assert np.all(np.isfinite(z))


def test_znormalize_constant_rows():
    z = znormalize(np.array([[3.0, 3.0, 3.0], [1.0, 2.0, 3.0]]))
    assert np.all(z[0] == 0)
    assert abs(z[1].mean()) < 1e-12 and abs(z[1].std() - 1) < 1e-12


def test_sliding_windows_shape():
    assert sliding_windows(np.arange(10), 3).shape == (8, 3)


def test_timeseries_validation():
    with pytest.raises(ValueError):
        TimeSeries([1.0, np.inf])
    with pytest.raises(ValueError):
        TimeSeries([1.0, 2.0], [0, 2])
    with pytest.raises(ValueError):
        TimeSeries([1.0, 2.0], [0])
    ts = TimeSeries([1, 2, 3], [0, 1, 0], "a")
    with pytest.raises(ValueError):
        ts.values[0] = 5


def test_generator_deterministic():
    a = generate_synthetic(2, 3, 1024, seed=5)
    b = generate_synthetic(2, 3, 1024, seed=5)
    c = generate_synthetic(2, 3, 1024, seed=6)
    assert [s.series_id for s in a] == [s.series_id for s in b]
    assert all(np.array_equal(x.values, y.values) and np.array_equal(x.labels, y.labels) for x, y in zip(a, b))
    assert not all(np.array_equal(x.values, y.values) for x, y in zip(a, c))
    assert len({s.dataset_id for s in a}) == 2


def test_generator_zero_anomalies():
    corpus = generate_synthetic(1, 2, 512, n_anomalies=0, seed=0)
    assert all(s.labels.sum() == 0 for s in corpus)


def test_generator_point_anomaly_labels():
    corpus = generate_synthetic(1, 3, 1024, anomaly_kind="point", n_anomalies=1, seed=2)
    for s in corpus:
        (idx,) = np.flatnonzero(s.labels)
        # the spike is the most extreme deviation from the local level
        dev = np.abs(s.values - np.median(s.values))
        assert abs(int(np.argmax(dev)) - idx) <= 1


def test_generator_rejects_infeasible():
    with pytest.raises(ValueError):
        generate_synthetic(1, 1, 100, seed=0)
