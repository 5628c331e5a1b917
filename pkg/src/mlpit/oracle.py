"""Brute-force PIT and seeded random formula generators."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable

from .algebra import DEFAULT_FIELD, Field, SparseMultilinearPoly
from .formula import Depth3Formula, Depth4Formula, Leaf, RegularFormula
from .hitting import BudgetError, PitResult

DEFAULT_GRID_BUDGET = 1 << 20


def grid_pit(f: Callable[[tuple], int], n: int, d: int = 1, field: Field = DEFAULT_FIELD,
             budget: int = DEFAULT_GRID_BUDGET) -> PitResult:
    """Exact PIT for individual degree <= d: scan {0..d}^n in lexicographic order."""
    size = (d + 1) ** n
    if size > budget:
        raise BudgetError(f"grid {{0..{d}}}^{n} has {size} points, budget is {budget}")
    p = field.p
    for i, pt in enumerate(itertools.product(range(d + 1), repeat=n)):
        v = f(pt) % p
        if v:
            return PitResult(False, pt, i + 1, v)
    return PitResult(True, None, size)


# ---------------------------------------------------------------------------
# generators


def _coeff(rng, lo=-3, hi=3):
    c = 0
    while c == 0:
        c = rng.randint(lo, hi)
    return c


def _groups(rng, vars_, count):
    """Split a shuffled variable list into ``count`` nonempty groups (count <= len)."""
    vars_ = list(vars_)
    rng.shuffle(vars_)
    cuts = sorted(rng.sample(range(1, len(vars_)), count - 1)) if count > 1 else []
    out, prev = [], 0
    for c in cuts + [len(vars_)]:
        out.append(sorted(vars_[prev:c]))
        prev = c
    return out


def random_linear(rng, n, group, field, const_prob=0.5):
    terms = [((v,), _coeff(rng)) for v in group]
    if rng.random() < const_prob:
        terms.append(((), _coeff(rng)))
    return SparseMultilinearPoly(n, terms, field)


def random_sparse(rng, n, group, s, field):
    """Nonzero polynomial over the variables of ``group`` with at most s terms."""
    monos = set()
    target = rng.randint(1, s)
    for _ in range(4 * target):
        if len(monos) >= target:
            break
        k = rng.randint(0, len(group))
        monos.add(tuple(sorted(rng.sample(group, k))))
    return SparseMultilinearPoly(n, [(m, _coeff(rng)) for m in sorted(monos)], field)


def gen_depth3(n, M, seed, field=DEFAULT_FIELD, max_factors=None):
    rng = random.Random(seed)
    gates = []
    for _ in range(M):
        used = rng.sample(range(n), rng.randint(1, n))
        t = rng.randint(1, len(used) if max_factors is None else min(max_factors, len(used)))
        gates.append([random_linear(rng, n, g, field) for g in _groups(rng, used, t)])
    return Depth3Formula(n, gates, field)


def gen_depth4(n, M, seed, s=4, field=DEFAULT_FIELD, max_factors=None):
    rng = random.Random(seed)
    gates = []
    for _ in range(M):
        used = rng.sample(range(n), rng.randint(1, n))
        t = rng.randint(1, len(used) if max_factors is None else min(max_factors, len(used)))
        gates.append([random_sparse(rng, n, g, s, field) for g in _groups(rng, used, t)])
    return Depth4Formula(n, gates, field)


def gen_regular(n, profile, seed, field=DEFAULT_FIELD, const_prob=0.2):
    """Random regular formula; product children get disjoint variable pools."""
    rng = random.Random(seed)
    profile = tuple(profile)

    def leaf(pool):
        if not pool or rng.random() < const_prob:
            return Leaf(None, _coeff(rng))
        return Leaf(rng.choice(pool), _coeff(rng))

    def sum_node(layer, pool):
        a = profile[layer]
        if layer == len(profile) - 1:
            return tuple(leaf(pool) for _ in range(a))
        p = profile[layer + 1]
        prods = []
        for _ in range(a):
            shuffled = list(pool)
            rng.shuffle(shuffled)
            parts = [shuffled[i::p] for i in range(p)]
            prods.append(tuple(sum_node(layer + 2, parts[i]) for i in range(p)))
        return tuple(prods)

    return RegularFormula(n, profile, sum_node(0, list(range(n))), field)


def gen_formula(cls: str, params: dict, seed: int, field: Field = DEFAULT_FIELD):
    """Seeded random formula of class d3, d4 or regular."""
    n = params["n"]
    if cls in ("d3", "depth3"):
        return gen_depth3(n, params.get("M", 2), seed, field, params.get("max_factors"))
    if cls in ("d4", "depth4"):
        return gen_depth4(n, params.get("M", 2), seed, params.get("s", 4), field, params.get("max_factors"))
    if cls == "regular":
        return gen_regular(n, params["profile"], seed, field, params.get("const_prob", 0.2))
    raise ValueError(f"unknown class {cls!r}")


# ---------------------------------------------------------------------------
# adversarial items


def _negate_sum(node):
    if node and isinstance(node[0], Leaf):
        return tuple(Leaf(leaf.var, -leaf.coeff) for leaf in node)
    return tuple((_negate_sum(prod[0]),) + tuple(prod[1:]) for prod in node)


def cancelling(phi):
    """phi plus its negation: zero, but not syntactically."""
    if isinstance(phi, RegularFormula):
        profile = (2 * phi.profile[0],) + phi.profile[1:]
        return RegularFormula(phi.n, profile, phi.root + _negate_sum(phi.root), phi.field)
    neg = [[gate[0].scale(-1)] + list(gate[1:]) for gate in phi.gates]
    return phi.with_gates(list(phi.gates) + neg)


def with_divisor(phi, x, coeff=1):
    """Multiply every gate by the variable x, folded into an existing factor where possible.

    x must be absent from phi.  The result is divisible by x while x is not
    a standalone factor of every gate, which is what make_simple repairs.
    """
    xp = SparseMultilinearPoly.variable(phi.n, x, phi.field, coeff)
    linear = isinstance(phi, Depth3Formula)
    gates = []
    for gi, gate in enumerate(phi.gates):
        if linear:
            # keep factors linear: a scaled copy of x that make_simple must normalise
            gates.append(list(gate) + [xp.scale(gi + 2)])
        elif gi % 2 == 0 and gate:
            gates.append([gate[0] * xp] + list(gate[1:]))
        else:
            gates.append(list(gate) + [xp])
    return phi.with_gates(gates)


def wide_form(n, M, seed, field=DEFAULT_FIELD):
    """Depth-3 formula whose gates each hold one linear form on all variables."""
    rng = random.Random(seed)
    gates = []
    for _ in range(M):
        gates.append([random_linear(rng, n, list(range(n)), field, const_prob=1.0)])
    return Depth3Formula(n, gates, field)


# ---------------------------------------------------------------------------
# corpora


@dataclass
class CorpusItem:
    formula: object
    poly: SparseMultilinearPoly
    nonzero: bool
    tag: str = "random"


@dataclass
class Corpus:
    seed: int
    cls: str
    params: dict
    items: list = dc_field(default_factory=list)

    def nonzero_items(self):
        return [it for it in self.items if it.nonzero]

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def _item(phi, tag):
    f = phi.expand()
    return CorpusItem(phi, f, not f.is_zero(), tag)


def build_corpus(cls: str, params: dict, count: int, seed: int = 0, adversarial: bool = True,
                 field: Field = DEFAULT_FIELD) -> Corpus:
    """``count`` random items plus, when asked, hand-shaped hard cases.

    ``params`` may give a range for M as ``M_max``; items cycle through
    M = 1..M_max.  With ``max_size`` formulas above that size are redrawn,
    and with ``nonzero_only`` zero formulas are redrawn, so the corpus holds
    exactly ``count`` random items of the requested kind.
    """
    corpus = Corpus(seed, cls, dict(params))
    rng = random.Random(seed)
    n = params["n"]
    max_size = params.get("max_size")
    nonzero_only = params.get("nonzero_only", False)

    def fits(phi):
        return max_size is None or phi.size() <= max_size

    i = 0
    while len(corpus.items) < count:
        if i > 1000 * (count + 1):
            raise ValueError(f"could not draw {count} items within the constraints {params}")
        p = dict(params)
        if "M_max" in params:
            p["M"] = 1 + i % params["M_max"]
        i += 1
        phi = gen_formula(cls, p, rng.randrange(1 << 30), field)
        if not fits(phi):
            continue
        item = _item(phi, "random")
        if nonzero_only and not item.nonzero:
            continue
        corpus.items.append(item)
    if adversarial and cls in ("d3", "d4", "depth3", "depth4"):
        M = params.get("M", params.get("M_max", 2))
        base = gen_formula(cls, dict(params, M=max(1, M // 2)), rng.randrange(1 << 30), field)
        extra = [(cancelling(base), "cancel")]
        if n >= 2:
            sub = gen_formula(cls, dict(params, n=n - 1, M=M), rng.randrange(1 << 30), field)
            sub = type(sub)(n, [[f.with_n(n) for f in g] for g in sub.gates], field)
            extra.append((with_divisor(sub, n - 1), "divisor"))
        if cls in ("d3", "depth3"):
            extra.append((wide_form(n, M, rng.randrange(1 << 30), field), "wide"))
        for phi, tag in extra:
            if fits(phi):
                corpus.items.append(_item(phi, tag))
    elif adversarial and cls == "regular":
        corpus.items.append(_item(cancelling(gen_formula(cls, params, rng.randrange(1 << 30), field)), "cancel"))
    return corpus
