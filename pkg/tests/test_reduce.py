import math

import pytest
from hypothesis import assume, given, strategies as st

from mlpit.formula import Depth4Formula, FormulaError, delta_far, is_restricted, parse
from mlpit.hitting import depth3_eps
from mlpit.oracle import cancelling, gen_depth3, gen_regular
from mlpit.reduce import (ReductionError, classify_regular, collapse, depth3_support_bound,
                          depth3_tau, depth4_support_bound, reduce_depth3, reduce_depth4,
                          regular_to_depth4, squeeze, squeezed_profile)

from strategies import depth3_formulas, depth4_formulas, seeds


def P(text, n):
    return parse(f"({text})", n, kind="d4").expand()


def max_live_support(phi, f):
    live = f.var()
    return max((len(g.var() & live) for g in phi.factors()), default=0)


# -- depth-3 ---------------------------------------------------------------

def test_depth3_example():
    phi = parse("(x1 + x2 + x3)*(x4)", 4)
    A, out, tr = reduce_depth3(phi, tau=2)
    assert A == {0}
    assert out.expand() == P("x4", 4)
    assert [(s.var, s.before, s.after) for s in tr.steps] == [(0, 1, 0)]


def test_depth3_univariate_forms_untouched():
    phi = parse("(x1 + 1)*(x2) + (3*x3)*(x4 + 2)")
    A, out, tr = reduce_depth3(phi, tau=2)
    assert A == frozenset() and out is phi and tr.steps == []


def test_depth3_tau_from_eps():
    assert depth3_tau(16, 0.5) == pytest.approx(4)
    assert depth3_support_bound(16, 0.5, 4) == math.ceil(4 * math.log2(64)) + 1
    with pytest.raises(ValueError):
        reduce_depth3(parse("(x1 + x2)"))


def test_depth3_zero_input():
    with pytest.raises(ReductionError):
        reduce_depth3(cancelling(gen_depth3(4, 2, 1)), tau=2)


@given(depth3_formulas(max_n=7, max_M=4), st.integers(1, 4))
def test_depth3_reduction_properties(phi, tau):
    f = phi.expand()
    assume(not f.is_zero())
    n = phi.n
    A, out, tr = reduce_depth3(phi, tau=tau)
    g = out.expand()
    assert g == f.derivative(A)
    assert not g.is_zero()
    # no form meets var(d_A f) in tau or more variables
    assert max_live_support(out, g) < tau
    for s in tr.steps:
        # some variable lies in at least a tau/n fraction of the bad forms
        assert s.after <= s.before * (1 - tau / n) + 1e-9
    assert tr.certified


@given(depth3_formulas(max_n=7, max_M=4), st.sampled_from([0.25, 0.4, 0.49]))
def test_depth3_support_within_bound(phi, delta):
    assume(not phi.expand().is_zero())
    eps = depth3_eps(delta)
    A, out, tr = reduce_depth3(phi, eps=eps)
    assert tr.within_bound()
    assert len(A) <= depth3_support_bound(phi.n, eps, max(phi.top_fan_in, 1))


# -- depth-4 ---------------------------------------------------------------

def test_depth4_example():
    phi = parse("(x1*x2 + x3)*(x4)", 4)
    f = phi.expand()
    A, B, out, tr = reduce_depth4(phi, 2)
    # x1, x2, x3 tie on the bad factor; ties go to the lowest index
    assert len(tr.steps) == 1
    step = tr.steps[0]
    assert (step.action, step.before, step.after) == ("derive", 2, 0)
    assert B == frozenset()
    assert out.expand() == f.derivative(A) and not out.expand().is_zero()
    assert delta_far(out, 2) == 0


def test_depth4_restricted_input_is_untouched():
    phi = parse("(x1 + x2)*(x3*x4 + 1) + (x5)")
    assert is_restricted(phi, 2, 2)
    A, B, out, tr = reduce_depth4(phi, 2)
    assert A == B == frozenset() and tr.steps == []
    assert out.expand() == phi.expand()


def test_depth4_accepts_depth3_input():
    phi = parse("(x1 + x2 + x3)*(x4 + x5)")
    A, B, out, tr = reduce_depth4(phi, 1)
    assert isinstance(out, Depth4Formula)
    assert out.expand() == phi.expand().derivative(A).restrict(sorted(B))


def test_depth4_zero_input():
    with pytest.raises(ReductionError):
        reduce_depth4(cancelling(gen_depth3(4, 2, 1)).as_depth4(), 1)


def test_depth4_restrict_step():
    # the bad factor is a monomial, so g|x1=0 is empty and the derive test fails
    phi = parse("# class=d4 n=5\n(2*x1*x2*x3) + (-1)")
    A, B, out, tr = reduce_depth4(phi, 2)
    assert [(s.var, s.action, s.before, s.after) for s in tr.steps] == [(0, "restrict", 1, 0)]
    assert A == frozenset() and B == {0}
    assert out.expand() == P("-1", 5)


@given(depth4_formulas(max_n=7, max_M=3, max_s=5), st.integers(1, 3))
def test_depth4_reduction_properties(phi, tau):
    f = phi.expand()
    assume(not f.is_zero())
    n = phi.n
    A, B, out, tr = reduce_depth4(phi, tau)
    assert not A & B
    g = out.expand()
    assert g == f.derivative(A).restrict(sorted(B))
    assert not g.is_zero()
    assert delta_far(out, tau) == 0
    d0 = tr.steps[0].before if tr.steps else 0
    for k, s in enumerate(tr.steps, 1):
        assert s.after <= d0 * (1 - tau / (2 * n)) ** k + 1e-9
        assert s.action in ("derive", "restrict")
    assert tr.support <= depth4_support_bound(n, tau, phi.size()) + 1e-9


def test_trace_text():
    *_, tr = reduce_depth4(parse("(x1*x2 + x3)*(x4)", 4), 2)
    text = tr.to_text()
    assert text.splitlines()[0].startswith("tau=2 measure=delta")
    assert "derive x1: delta 2 -> 0" in text


# -- squeeze and collapse --------------------------------------------------

def test_squeeze_profile_examples():
    assert squeezed_profile((2, 2, 3, 1, 1)) == (18, 2, 1)
    assert squeezed_profile((1, 1, 1, 1, 1)) == (1, 1, 1)
    psi = gen_regular(4, (2, 2, 3, 1, 1), 7)
    out = squeeze(psi)
    assert out.profile == (18, 2, 1)
    assert out.expand() == psi.expand()
    one = gen_regular(2, (1, 1, 1, 1, 1), 2)
    assert squeeze(one).profile == (1, 1, 1)


def test_squeeze_rejects_other_profiles():
    with pytest.raises(FormulaError):
        squeeze(gen_regular(3, (2, 2, 1), 1))
    with pytest.raises(FormulaError):
        squeeze(gen_regular(3, (2, 2, 2, 2, 2), 1))


@given(st.tuples(*[st.integers(1, 3)] * 4), st.integers(1, 6), seeds)
def test_squeeze_preserves_expansion(prof, n, seed):
    a1, p1, a2, p2 = prof
    psi = gen_regular(n, (a1, p1, a2, p2, 1), seed)
    out = squeeze(psi)
    assert out.profile == (a1 * a2 ** p1, p1 * p2, 1)
    assert out.expand() == psi.expand()


@given(st.lists(st.integers(1, 2), min_size=6, max_size=6), st.integers(1, 5), seeds)
def test_collapse_preserves_expansion(prof, n, seed):
    psi = gen_regular(n, tuple(prof) + (1,), seed)
    out = collapse(psi)
    assert len(out.profile) == 3 and out.profile[2] == 1
    assert out.profile[1] == math.prod(prof[1::2])
    assert out.expand() == psi.expand()


# -- regular to depth-4 ----------------------------------------------------

def test_case1_small_degree():
    psi = gen_regular(5, (3, 1, 2, 1, 2), 5)
    red = regular_to_depth4(psi)
    assert red.case == "case1" and red.tag == "small-degree"
    assert red.formula.top_fan_in == 1 and len(red.formula.gates[0]) == 1
    assert red.formula.gates[0][0] == psi.expand()
    assert red.fan_in_bound_holds()


def test_case2_large_first_product():
    psi = gen_regular(4, (1, 4, 1, 1, 1), 2)
    assert classify_regular(psi.profile, 4) == ("case2", None)
    red = regular_to_depth4(psi)
    assert red.case == "case2" and red.M == 1
    assert red.formula.expand() == psi.expand()


def test_case3_split():
    c, n = 5, 3
    psi = gen_regular(n, (2, 1, 2, 3, 1), 9)
    assert classify_regular(psi.profile, n, c) == ("case3", 1)
    red = regular_to_depth4(psi, c=c)
    d, t = 2, 1
    assert red.alpha == pytest.approx((1 / c) ** (d - t) / (c - 1))
    assert red.formula.expand() == psi.expand()
    assert red.M <= red.S ** (n ** red.alpha)
    assert red.fan_in_bound_holds()


def test_two_two_profile_never_reaches_case3():
    for n in (2, 4, 5, 8, 64, 2 ** 20):
        assert classify_regular((2, 2, 2, 2, 1), n)[0] in ("case1", "case2")


def test_regular_errors():
    with pytest.raises(FormulaError):
        regular_to_depth4(gen_regular(3, (2, 2, 1), 1))
    with pytest.raises(ValueError):
        regular_to_depth4(gen_regular(3, (1, 2, 1, 2, 1), 1), c=2)


@given(st.lists(st.integers(1, 3), min_size=4, max_size=6).filter(lambda l: len(l) % 2 == 0),
       st.integers(1, 6), seeds)
def test_regular_reduction_preserves_expansion(prof, n, seed):
    psi = gen_regular(n, tuple(prof) + (1,), seed)
    assume(math.prod(psi.profile) <= 400)
    red = regular_to_depth4(psi)
    assert red.formula.expand() == psi.expand()
    assert red.fan_in_bound_holds()
