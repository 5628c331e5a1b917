"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from mlpit.algebra import DEFAULT_FIELD, Field, SparseMultilinearPoly
from mlpit.oracle import gen_depth3, gen_depth4, gen_regular

SMALL = Field(101)
coeffs = st.integers(-5, 5).filter(bool)


@st.composite
def polys(draw, n=None, max_n=5, max_terms=6, field=DEFAULT_FIELD):
    if n is None:
        n = draw(st.integers(1, max_n))
    monos = draw(st.lists(st.sets(st.integers(0, n - 1), max_size=n).map(lambda s: tuple(sorted(s))),
                          max_size=max_terms))
    return SparseMultilinearPoly(n, [(m, draw(coeffs)) for m in monos], field)


@st.composite
def points(draw, n, hi=4):
    return tuple(draw(st.lists(st.integers(0, hi), min_size=n, max_size=n)))


seeds = st.integers(0, 2 ** 30)


@st.composite
def depth3_formulas(draw, max_n=6, max_M=4):
    n = draw(st.integers(1, max_n))
    return gen_depth3(n, draw(st.integers(1, max_M)), draw(seeds))


@st.composite
def depth4_formulas(draw, max_n=6, max_M=3, max_s=4):
    n = draw(st.integers(1, max_n))
    return gen_depth4(n, draw(st.integers(1, max_M)), draw(seeds), s=draw(st.integers(1, max_s)))


@st.composite
def regular_formulas(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(0, 2))
    profile = tuple(draw(st.integers(1, 2)) for _ in range(2 * d + 1))
    return gen_regular(n, profile, draw(seeds))
