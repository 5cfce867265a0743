import numpy as np
import pytest

from planar_oracles.constants import INF
from planar_oracles.monge import (
    Empty,
    ImplicitMatrix,
    StaircaseMatrix,
    is_monge,
    monge_min,
    smawk_row_minima,
    staircase_min,
)


def random_monge(p, q, rng):
    """Row + column offsets plus a scaled -min(i,j) kernel; always Monge."""
    a = np.add.outer(rng.integers(0, 50, p), rng.integers(0, 50, q))
    k = int(rng.integers(1, 4))
    return a - k * np.minimum.outer(np.arange(p), np.arange(q))


def brute_minima(m):
    return np.asarray(m).argmin(axis=1)


def test_is_monge_basics():
    assert is_monge([[0, 0], [0, 0]])
    assert not is_monge([[1, 2], [3, 5]])
    assert is_monge([[5]])
    assert is_monge(np.zeros((1, 4)))


def test_is_monge_with_inf_entries():
    assert is_monge([[0, INF], [0, INF]])
    assert is_monge([[0, INF], [0, 0]])
    assert not is_monge([[INF, 0], [0, 0]])


def test_smawk_tiny():
    m = ImplicitMatrix.from_array([[0, 1], [2, 1]])
    assert smawk_row_minima(m).tolist() == [0, 1]


def test_smawk_constant_matrix_leftmost():
    m = ImplicitMatrix.from_array(np.full((5, 7), 3))
    assert smawk_row_minima(m).tolist() == [0] * 5


def test_monge_min_tiny():
    assert monge_min(ImplicitMatrix.from_array([[0, 1], [2, 1]])) == (0, 0, 0)
    assert monge_min(ImplicitMatrix.from_array([[3, 4], [2, 1]])) == (1, 1, 1)


@pytest.mark.parametrize("seed", range(4))
def test_smawk_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    for _ in range(50):
        p, q = int(rng.integers(1, 65)), int(rng.integers(1, 65))
        a = random_monge(p, q, rng)
        assert is_monge(a)
        got = smawk_row_minima(ImplicitMatrix.from_array(a))
        assert np.array_equal(got, brute_minima(a))


def test_monge_min_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(50):
        p, q = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        a = random_monge(p, q, rng)
        i, j, v = monge_min(ImplicitMatrix.from_array(a))
        assert v == a.min()
        assert a[i, j] == v


def test_row_column_shift_keeps_argmin():
    rng = np.random.default_rng(5)
    a = random_monge(12, 9, rng)
    i0, j0, _ = monge_min(ImplicitMatrix.from_array(a))
    b = a.copy()
    b[4, :] += 17
    c = a.copy()
    c[:, 2] += 23
    for shifted in (b, c):
        assert is_monge(shifted)
        i, j, _ = monge_min(ImplicitMatrix.from_array(shifted))
        if (i0, j0) not in ((4, None), (None, 2)):
            # Shifting a row/column the minimum does not sit in keeps it.
            if i0 != 4 and shifted is b:
                assert (i, j) == (i0, j0)
            if j0 != 2 and shifted is c:
                assert (i, j) == (i0, j0)


def test_access_count_linear():
    rng = np.random.default_rng(2)
    for k in (16, 64, 256):
        a = random_monge(k, k, rng)
        m = ImplicitMatrix.from_array(a)
        smawk_row_minima(m)
        assert m.calls <= 8 * (2 * k)


def staircase_brute(a, orientation, bounds):
    p, q = a.shape
    best = None
    for i in range(p):
        cols = (range(int(bounds[i]), q) if orientation == "falling"
                else range(0, int(bounds[i]) + 1))
        for j in cols:
            if best is None or a[i, j] < best[2]:
                best = (i, j, int(a[i, j]))
    return best


def test_staircase_single_entry():
    a = np.asarray([[9, 7], [5, 3]])
    s = StaircaseMatrix(ImplicitMatrix.from_array(a), "falling", [2, 1])
    assert staircase_min(s) == (1, 1, 3)


def test_staircase_all_blank_raises():
    a = np.zeros((2, 2), dtype=np.int64)
    s = StaircaseMatrix(ImplicitMatrix.from_array(a), "falling", [2, 2])
    with pytest.raises(Empty):
        staircase_min(s)
    s2 = StaircaseMatrix(ImplicitMatrix.from_array(a), "inverse-falling", [-1, -1])
    with pytest.raises(Empty):
        staircase_min(s2)


def test_staircase_bounds_must_be_monotone():
    a = np.zeros((2, 3), dtype=np.int64)
    with pytest.raises(ValueError):
        StaircaseMatrix(ImplicitMatrix.from_array(a), "falling", [2, 1])


@pytest.mark.parametrize("orientation", ["falling", "inverse-falling"])
def test_staircase_matches_brute_force(orientation):
    rng = np.random.default_rng(3)
    for _ in range(100):
        p, q = int(rng.integers(1, 30)), int(rng.integers(1, 30))
        a = random_monge(p, q, rng)
        if orientation == "falling":
            bounds = np.sort(rng.integers(0, q + 1, p))
        else:
            bounds = np.sort(rng.integers(-1, q, p))
        s = StaircaseMatrix(ImplicitMatrix.from_array(a), orientation, bounds)
        expect = staircase_brute(a, orientation, bounds)
        if expect is None:
            with pytest.raises(Empty):
                staircase_min(s)
        else:
            i, j, v = staircase_min(s)
            assert v == expect[2]
            # Returned cell must be non-blank and attain the minimum.
            if orientation == "falling":
                assert j >= bounds[i]
            else:
                assert j <= bounds[i]
            assert a[i, j] == v


def test_staircase_access_count_linear():
    rng = np.random.default_rng(8)
    for k in (16, 64, 256):
        a = random_monge(k, k, rng)
        m = ImplicitMatrix.from_array(a)
        s = StaircaseMatrix(m, "falling", np.sort(rng.integers(0, k + 1, k)))
        try:
            staircase_min(s)
        except Empty:
            pass
        assert m.calls <= 8 * (2 * k)


def test_staircase_inf_entries_returned_not_swallowed():
    a = np.full((2, 2), INF, dtype=np.int64)
    s = StaircaseMatrix(ImplicitMatrix.from_array(a), "falling", [0, 0])
    i, j, v = staircase_min(s)
    assert v == INF
