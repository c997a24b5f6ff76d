from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from dft.exact import (_exact_fallback, _rational_reconstruct,
                       span_of_indicator_columns)


def test_empty_column_set():
    res = span_of_indicator_columns(3, [])
    assert res.rank == 0 and not res.full
    assert len(res.kernel) == 3
    assert not res.membership.any()


def test_full_rank_case():
    cols = [(0,), (1,), (0, 2)]
    res = span_of_indicator_columns(3, cols)
    assert res.full and res.rank == 3
    assert res.membership.all() and res.kernel == ()


def test_known_deficient_case():
    # e0+e2, e0+e1 in dimension 4: rank 2, kernel contains e3 and e0-e1-e2
    cols = [(0, 2), (0, 1)]
    res = span_of_indicator_columns(4, cols)
    assert res.rank == 2
    assert len(res.kernel) == 2
    assert list(res.membership) == [False, False, False, False]
    for vec in res.kernel:
        for support in cols:
            assert sum(vec.get(i, Fraction(0)) for i in support) == 0


def test_rational_reconstruction():
    p = 1048573
    assert _rational_reconstruct(pow(2, -1, p), p) == Fraction(1, 2)
    assert _rational_reconstruct((3 * pow(7, -1, p)) % p, p) == Fraction(3, 7)
    assert _rational_reconstruct(5, p) == Fraction(5)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_matches_exact_fallback(data):
    n = data.draw(st.integers(2, 10))
    ncols = data.draw(st.integers(0, 14))
    cols = []
    for _ in range(ncols):
        size = data.draw(st.integers(1, n))
        support = tuple(sorted(data.draw(
            st.sets(st.integers(0, n - 1), min_size=size, max_size=size))))
        cols.append(support)
    fast = span_of_indicator_columns(n, cols)
    slow = _exact_fallback(n, cols)
    assert fast.rank == slow.rank
    assert np.array_equal(fast.membership, slow.membership)
    # verified kernels annihilate every column on both routes
    for res in (fast, slow):
        for vec in res.kernel:
            for support in cols:
                assert sum(vec.get(i, Fraction(0)) for i in support) == 0


def test_pivot_columns_are_a_basis():
    cols = [(0, 1), (1, 2), (0, 2), (3,), (0, 1)]
    res = span_of_indicator_columns(4, cols)
    assert res.rank == 4
    assert len(res.pivot_columns) == 4
    assert sorted(res.pivot_columns) == [0, 1, 2, 3]
