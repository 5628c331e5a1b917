import itertools
import random
import time

import pytest
from hypothesis import given, strategies as st

from mlpit.algebra import Field, SparseMultilinearPoly
from mlpit.hitting import BudgetError, HittingSet, depth3_hs
from mlpit.lowerbound import (PreconditionError, _matrix, _rref_python, monomials,
                              vanishing_multilinear, verify_certificate)

from strategies import polys

F7 = Field(7)


def random_H(rng, n, size, hi=4, field=None):
    kw = {} if field is None else {"field": field}
    return HittingSet(n, [tuple(rng.randint(0, hi) for _ in range(n)) for _ in range(size)], **kw)


def test_examples():
    assert vanishing_multilinear(HittingSet(1, [(0,)])) == SparseMultilinearPoly(1, {(0,): 1})
    H = HittingSet(2, [(0, 0), (1, 1)])
    f = vanishing_multilinear(H)
    assert f == SparseMultilinearPoly(2, {(0,): -1, (1,): 1})
    assert f.eval((0, 0)) == f.eval((1, 1)) == 0
    assert vanishing_multilinear(HittingSet(3, [])) == SparseMultilinearPoly.constant(3, 1)


def test_full_cube_is_rejected():
    H = HittingSet(3, itertools.product((0, 1), repeat=3))
    with pytest.raises(PreconditionError, match="2\\^n"):
        vanishing_multilinear(H)


def test_dimension_and_budget_checks():
    H = HittingSet(2, [(0, 1)])
    with pytest.raises(PreconditionError):
        vanishing_multilinear(H, n=3)
    with pytest.raises(BudgetError):
        vanishing_multilinear(random_H(random.Random(0), 12, 50), max_rows=10)
    with pytest.raises(ValueError):
        vanishing_multilinear(H, engine="numpy")


def test_monomial_order():
    assert list(monomials(3)) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]


def test_verify_certificate_examples():
    H = HittingSet(2, [(0, 1), (3, 3)])
    assert verify_certificate(vanishing_multilinear(H), H)
    assert not verify_certificate(SparseMultilinearPoly.constant(2, 1), H)
    assert not verify_certificate(SparseMultilinearPoly.zero(2), H)


@given(polys(max_n=4), st.integers(0, 2 ** 30))
def test_verify_certificate_matches_evaluation_loop(f, seed):
    H = random_H(random.Random(seed), f.n, 5, hi=2)
    want = not f.is_zero() and all(f.eval(pt) == 0 for pt in H)
    assert verify_certificate(f, H) == want


@given(st.integers(0, 2 ** 30))
def test_engines_agree_and_output_is_minimal(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    H = random_H(rng, n, rng.randint(0, 2 ** n - 1), hi=3, field=F7)
    f = vanishing_multilinear(H)
    assert f == vanishing_multilinear(H, engine="python")
    assert verify_certificate(f, H)
    # the leading monomial is the first column not in the span of the earlier ones
    monos = list(monomials(n))
    lead = max(f.terms, key=monos.index)
    j = monos.index(lead)
    assert f.terms[lead] == 1
    rank_before = len(_rref_python(_matrix(H.points, monos[:j], 7), j, 7)[1])
    rank_with = len(_rref_python(_matrix(H.points, monos[:j + 1], 7), j + 1, 7)[1])
    assert rank_before == j and rank_with == j


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 12, 16])
def test_succeeds_up_to_n16(n):
    rng = random.Random(n)
    size = min(2 ** n - 1, 300)
    H = random_H(rng, n, size, hi=5)
    f = vanishing_multilinear(H)
    assert verify_certificate(f, H)
    assert vanishing_multilinear(H) == f


def test_almost_full_cube():
    for n in range(1, 7):
        pts = list(itertools.product((0, 1), repeat=n))[:-1]
        H = HittingSet(n, pts)
        f = vanishing_multilinear(H)
        assert verify_certificate(f, H)
        # the one missing point is where f must be nonzero
        assert f.eval((1,) * n) != 0


def test_certificate_for_a_constructed_hitting_set():
    H = depth3_hs(5, 0.25)
    if len(H) < 2 ** 5:
        assert verify_certificate(vanishing_multilinear(H), H)
    else:
        with pytest.raises(PreconditionError):
            vanishing_multilinear(H)


def test_fifty_instances_in_a_minute():
    rng = random.Random(909)
    t0 = time.perf_counter()
    for _ in range(50):
        n = rng.randint(1, 10)
        H = random_H(rng, n, rng.randint(0, min(2 ** n - 1, 400)))
        assert verify_certificate(vanishing_multilinear(H), H)
    assert time.perf_counter() - t0 < 60
