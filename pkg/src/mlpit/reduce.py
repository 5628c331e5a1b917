"""White-box support reduction and depth reduction of regular formulas."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

from .formula import (DEFAULT_TERM_CAP, Depth3Formula, Depth4Formula, ExpansionBudgetError, FormulaError,
                      ProductSumFormula, RegularFormula, delta_far, derive_restrict, expand_tree,
                      make_simple, substitute)


class ReductionError(RuntimeError):
    pass


@dataclass
class Step:
    var: int
    action: str  # "derive" or "restrict"
    before: int
    after: int


@dataclass
class ReductionTrace:
    tau: float
    measure: str  # what before/after count: "bad forms" or "delta"
    A: set = dc_field(default_factory=set)
    B: set = dc_field(default_factory=set)
    steps: list = dc_field(default_factory=list)
    certified: bool = True  # nonzeroness checked by expansion at every step
    size: int | None = None  # |input| in the leaf measure
    bound: float | None = None  # the trace length bound being checked

    @property
    def support(self) -> int:
        return len(self.A) + len(self.B)

    def within_bound(self) -> bool:
        return self.bound is None or self.support <= self.bound + 1e-9

    def to_text(self) -> str:
        lines = [f"tau={self.tau:.6g} measure={self.measure} certified={self.certified}"]
        for s in self.steps:
            lines.append(f"{s.action} x{s.var + 1}: {self.measure} {s.before} -> {s.after}")
        lines.append("A=" + ",".join(f"x{v + 1}" for v in sorted(self.A)))
        lines.append("B=" + ",".join(f"x{v + 1}" for v in sorted(self.B)))
        if self.bound is not None:
            lines.append(f"|A|+|B|={self.support} bound={self.bound:.6g} size={self.size}")
        return "\n".join(lines)


def _expand_or_none(phi, term_cap):
    try:
        return phi.expand(term_cap)
    except ExpansionBudgetError:
        return None


# ---------------------------------------------------------------------------
# depth-3


def depth3_tau(n: int, eps: float) -> float:
    return n ** (1 - eps)


def depth3_support_bound(n: int, eps: float, M: int) -> int:
    """Step bound n^eps * log2(M n) + 1, from |bad| <= M n shrinking by 1 - n^-eps."""
    return math.ceil(n ** eps * math.log2(max(M * n, 2))) + 1


def _bad_forms(phi, live, tau):
    """Positions (gate, factor) of linear forms meeting ``live`` in >= tau variables."""
    out = []
    for gi, gate in enumerate(phi.gates):
        for fj, ell in enumerate(gate):
            if len(ell.var() & live) >= tau:
                out.append((gi, fj))
    return out


def reduce_depth3(phi: Depth3Formula, eps: float | None = None, tau: float | None = None,
                  term_cap: int = DEFAULT_TERM_CAP):
    """Derive by variables until no linear form meets var(f) in >= tau variables.

    Returns (A, formula for d_A f, trace).  Each step derives by the
    variable of var(f) lying in the most bad forms, lowest index on ties.
    """
    n = phi.n
    if tau is None:
        if eps is None:
            raise ValueError("give eps or tau")
        tau = depth3_tau(n, eps)
    if eps is None:
        eps = 1 - math.log(tau, n) if n > 1 and tau > 0 else 0.0
    trace = ReductionTrace(tau, "bad forms", size=phi.size(),
                           bound=min(n, depth3_support_bound(n, eps, max(phi.top_fan_in, 1))))
    f = _expand_or_none(phi, term_cap)
    if f is not None and f.is_zero():
        raise ReductionError("input formula computes 0")
    cur = phi
    while True:
        if f is None:
            trace.certified = False
            live = cur.syntactic_vars()
        else:
            live = f.var()
        bad = _bad_forms(cur, live, tau)
        if not bad:
            break
        counts = {}
        for gi, fj in bad:
            for v in cur.gates[gi][fj].var() & live:
                counts[v] = counts.get(v, 0) + 1
        x = min(counts, key=lambda v: (-counts[v], v))
        cur = derive_restrict(cur, {x}, ())
        trace.A.add(x)
        if f is not None:
            f = f.derivative({x})
            live_after = f.var()
        else:
            f = _expand_or_none(cur, term_cap)
            live_after = f.var() if f is not None else cur.syntactic_vars()
        trace.steps.append(Step(x, "derive", len(bad), len(_bad_forms(cur, live_after, tau))))
    return frozenset(trace.A), cur, trace


# ---------------------------------------------------------------------------
# depth-4


def depth4_support_bound(n: int, tau: float, size: int) -> float:
    return (2 * n / tau) * math.log2(max(size, 1))


def _zero_dead_vars(phi, f):
    """Set to 0 the syntactic variables that cancel out of f; f is unchanged."""
    dead = sorted(phi.syntactic_vars() - f.var())
    if not dead:
        return phi
    return substitute(phi, dead, [0] * len(dead))


def reduce_depth4(phi: ProductSumFormula, tau: float, term_cap: int = DEFAULT_TERM_CAP):
    """Derive or zero variables until every factor has at most tau variables.

    Returns (A, B, formula for d_A f |_{B=0}, trace).  Each step picks the
    x in var*(f) carrying the most bad-factor sparsity (lowest index on
    ties) and derives when the x-free parts of those factors weigh more
    than Delta*tau/2n, else sets x to 0.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    n = phi.n
    size = phi.size()
    trace = ReductionTrace(tau, "delta", size=size, bound=depth4_support_bound(n, tau, size))
    f = _expand_or_none(phi, term_cap)
    if f is not None and f.is_zero():
        raise ReductionError("input formula computes 0")
    if isinstance(phi, Depth3Formula):
        phi = phi.as_depth4()
    cur = make_simple(phi, term_cap)
    if f is not None:
        cur = _zero_dead_vars(cur, f)
    else:
        trace.certified = False
    delta = delta_far(cur, tau)
    while delta > 0:
        bad = [g for g in cur.factors() if len(g.var()) > tau]
        if f is not None:
            vstar = f.var_star()
            for g in bad:
                if not g.var() <= vstar:
                    raise ReductionError(f"formula is not simple: factor {g} leaves var*(f)")
        else:
            vstar = frozenset().union(*(g.var() for g in bad))
        weight = {}
        for g in bad:
            for v in g.var():
                weight[v] = weight.get(v, 0) + g.sparsity
        x = min(weight, key=lambda v: (-weight[v], v))
        zero_part = sum(g.restrict([x]).sparsity for g in bad if x in g.var())
        if zero_part > delta * tau / (2 * n):
            action = "derive"
            cur = derive_restrict(cur, {x}, ())
            trace.A.add(x)
            if f is not None:
                f = f.derivative({x})
        else:
            action = "restrict"
            cur = derive_restrict(cur, (), {x})
            trace.B.add(x)
            if f is not None:
                f = f.restrict([x])
        if f is not None:
            if f.is_zero():
                raise ReductionError(f"step on x{x + 1} zeroed the polynomial")
            cur = _zero_dead_vars(make_simple(cur, term_cap), f)
        else:
            cur = make_simple(cur, term_cap)
        after = delta_far(cur, tau)
        if after > delta * (1 - tau / (2 * n)) + 1e-9:
            raise ReductionError(f"delta fell only from {delta} to {after} on x{x + 1}")
        trace.steps.append(Step(x, action, delta, after))
        delta = after
    return frozenset(trace.A), frozenset(trace.B), cur, trace


# ---------------------------------------------------------------------------
# regular formulas


class _Opaque:
    """Stand-in leaf for a whole subformula during the top-part squeeze."""

    __slots__ = ("node",)

    def __init__(self, node):
        self.node = node


def _squeeze_node(node):
    """(a1, p1, a2, p2, 1) sum node -> (a1 * a2^p1, p1 * p2, 1) sum node."""
    out = []
    for prod in node:
        for choice in itertools.product(*(range(len(s)) for s in prod)):
            merged = []
            for s, c in zip(prod, choice):
                merged.extend(s[c])
            out.append(tuple(merged))
    return tuple(out)


def squeeze(psi: RegularFormula) -> RegularFormula:
    """Distribute the products over the middle sums of a (a1,p1,a2,p2,1) formula."""
    prof = psi.profile
    if len(prof) != 5 or prof[4] != 1:
        raise FormulaError(f"squeeze needs a profile (a1, p1, a2, p2, 1), got {prof}")
    a1, p1, a2, p2, _ = prof
    return RegularFormula(psi.n, (a1 * a2 ** p1, p1 * p2, 1), _squeeze_node(psi.root), psi.field)


def squeezed_profile(prof):
    a1, p1, a2, p2, _ = prof
    return (a1 * a2 ** p1, p1 * p2, 1)


def _collapse(node, prof):
    """Squeeze repeatedly until the profile is (A, P, 1)."""
    if len(prof) == 3:
        return node, tuple(prof)
    inner_prof = None
    prods = []
    for prod in node:
        kids = []
        for s in prod:
            sub, inner_prof = _collapse(s, prof[2:])
            kids.append(sub)
        prods.append(tuple(kids))
    merged = (prof[0], prof[1]) + inner_prof
    return _squeeze_node(tuple(prods)), squeezed_profile(merged)


def collapse(psi: RegularFormula) -> RegularFormula:
    """Fully squeeze a regular formula with bottom fan-in 1 to profile (M, deg, 1)."""
    if psi.profile[-1] != 1:
        raise FormulaError(f"collapse needs bottom fan-in 1, got profile {psi.profile}")
    root, prof = _collapse(psi.root, psi.profile)
    return RegularFormula(psi.n, prof, root, psi.field)


@dataclass
class Depth4Reduced:
    case: str  # "case1", "case2" or "case3"
    formula: Depth4Formula
    M: int
    S: int  # size of the source regular formula
    t: int | None = None
    alpha: float | None = None
    size_bound: float | None = None
    sparsity_bound: float | None = None

    @property
    def tag(self) -> str:
        return {"case1": "small-degree", "case2": "large-p1"}.get(self.case, f"split({self.t})")

    def fan_in_bound_holds(self) -> bool:
        if self.case != "case3":
            return self.M <= self.S
        # M <= S^(n^alpha), compared in logs
        return math.log2(self.M) <= self.formula.n ** self.alpha * math.log2(self.S) + 1e-9


def classify_regular(profile, n: int, c: float = 5):
    """Case label and split index t (None outside case 3)."""
    ps = profile[1::2]
    d = len(ps)
    if math.prod(ps) <= n ** (1 - (1 / c) ** d):
        return "case1", None
    if ps[0] > n ** ((1 / c) ** d):
        return "case2", None
    for i in range(2, d + 1):
        if ps[i - 1] > n ** ((1 / c) ** (d + 1 - i)):
            return "case3", i - 1
    raise ReductionError(f"profile {profile} at n={n} fits no case; c={c} must be >= 3")


def regular_to_depth4(psi: RegularFormula, c: float = 5, term_cap: int = DEFAULT_TERM_CAP) -> Depth4Reduced:
    if psi.d < 2:
        raise FormulaError(f"need depth parameter d >= 2, got profile {psi.profile}")
    if c < 3:
        raise ValueError(f"c must be >= 3, got {c}")
    n, field = psi.n, psi.field
    S = psi.size()
    case, t = classify_regular(psi.profile, n, c)
    d = psi.d
    if case == "case1":
        phi = Depth4Formula(n, [[psi.expand(term_cap)]], field)
        return Depth4Reduced(case, phi, 1, S)
    if case == "case2":
        gates = [[expand_tree(s, n, field, term_cap) for s in prod] for prod in psi.root]
        return Depth4Reduced(case, Depth4Formula(n, gates, field), psi.profile[0], S)
    # case 3: squeeze layers 1..t+1 with the subformulas below as opaque leaves
    top_prof = psi.profile[:2 * (t + 1)] + (1,)

    def cut(node, layer):
        if layer == 2 * (t + 1):
            return (_Opaque(node),)
        return tuple(tuple(cut(s, layer + 2) for s in prod) for prod in node)

    root, prof = _collapse(cut(psi.root, 0), top_prof)
    memo = {}

    def bottom(leaf):
        key = id(leaf.node)
        if key not in memo:
            memo[key] = expand_tree(leaf.node, n, field, term_cap)
        return memo[key]

    gates = [[bottom(s[0]) for s in prod] for prod in root]
    phi = Depth4Formula(n, gates, field)
    ps = psi.product_fan_ins
    alpha = (1 / (c - 1)) * (1 / c) ** (d - t)
    sparsity_bound = 2 * n ** (n ** (1 - (c - 1) * alpha))
    size_bound = prof[0] * n * sparsity_bound
    assert prof[1] == math.prod(ps[:t + 1])
    return Depth4Reduced(case, phi, prof[0], S, t, alpha, size_bound, sparsity_bound)
