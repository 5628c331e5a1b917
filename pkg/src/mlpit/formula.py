"""Depth-3, depth-4 and regular multilinear formulas: IR, text form, expansion.

Text grammar (whitespace is ignored, ``#`` lines are directives/comments)::

    formula := gate ('+' gate)*
    gate    := factor ('*' factor)*
    factor  := '(' poly ')'
    poly    := term (('+' | '-') term)*
    term    := ['-'] (int ('*' var)* | var ('*' var)*)
    var     := 'x' digits            (1-based)

A regular formula nests further: a product gate multiplies parenthesised sum
nodes, and the bottom sum nodes hold leaves ``c``, ``x<i>`` or ``c*x<i>``.
A leading directive line ``# class=d3|d4|regular n=<count>`` fixes the class
and the ambient variable count; without it both are inferred.

Formula size, written |F| throughout the package, is the number of leaves:
for depth-3/4 formulas every bottom factor is written as a sum of monomials,
a monomial of degree e >= 1 costs e leaves, a constant monomial inside a
non-constant factor costs one leaf and a purely constant factor is a free
scalar.  For regular formulas it is the number of tree leaves, which equals
prod(a_i) * prod(p_i).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .algebra import (DEFAULT_FIELD, DimensionError, Field, MultilinearityError,
                      SparseMultilinearPoly)

DEFAULT_TERM_CAP = 1 << 20


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, msg, pos=None):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}" if pos is not None else msg)


class ExpansionBudgetError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# IR


@dataclass(frozen=True)
class LinearForm:
    """sum_i coeffs[i] * x_i + constant, with zero coefficients omitted."""

    coeffs: tuple  # ((index, coeff), ...) sorted by index
    constant: int = 0

    @classmethod
    def from_poly(cls, f: SparseMultilinearPoly) -> "LinearForm":
        if f.degree() > 1:
            raise FormulaError(f"not a linear form: {f}")
        coeffs = tuple(sorted((m[0], c) for m, c in f.terms.items() if m))
        return cls(coeffs, f.constant_term())

    def to_poly(self, n, field=DEFAULT_FIELD) -> SparseMultilinearPoly:
        terms = {(i,): c for i, c in self.coeffs}
        if self.constant:
            terms[()] = self.constant
        return SparseMultilinearPoly(n, terms, field)

    def support(self) -> frozenset:
        return frozenset(i for i, _ in self.coeffs)


def factor_size(f: SparseMultilinearPoly) -> int:
    if f.degree() <= 0:
        return 0
    return sum(max(1, len(m)) for m in f.terms)


class ProductSumFormula:
    """sum_i prod_j f_ij with variable-disjoint factors inside every gate."""

    kind = "d4"

    def __init__(self, n: int, gates: Sequence[Sequence[SparseMultilinearPoly]], field: Field = DEFAULT_FIELD):
        self.n = n
        self.field = field
        gs = []
        for gi, gate in enumerate(gates):
            seen = {}
            facs = []
            for fj, f in enumerate(gate):
                if f.n != n or f.field != field:
                    raise DimensionError(f"gate {gi + 1}, factor {fj + 1}: ambient mismatch")
                for x in f.var():
                    if x in seen:
                        raise MultilinearityError(
                            f"gate {gi + 1}: factors {seen[x] + 1} and {fj + 1} share x{x + 1}")
                    seen[x] = fj
                facs.append(f)
            gs.append(tuple(facs))
        self.gates = tuple(gs)
        self._validate()

    def _validate(self):
        pass

    @property
    def top_fan_in(self) -> int:
        return len(self.gates)

    M = top_fan_in

    def factors(self):
        for gate in self.gates:
            yield from gate

    def size(self) -> int:
        return sum(factor_size(f) for f in self.factors())

    def max_factor_sparsity(self) -> int:
        return max((f.sparsity for f in self.factors()), default=0)

    def syntactic_vars(self) -> frozenset:
        out = set()
        for f in self.factors():
            out |= f.var()
        return frozenset(out)

    def with_gates(self, gates):
        return type(self)(self.n, gates, self.field)

    def eval(self, point) -> int:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        p = self.field.p
        total = 0
        for gate in self.gates:
            v = 1
            for f in gate:
                v = v * f.eval(point) % p
                if not v:
                    break
            total += v
        return total % p

    __call__ = eval

    def expand(self, term_cap: int = DEFAULT_TERM_CAP) -> SparseMultilinearPoly:
        total = SparseMultilinearPoly.zero(self.n, self.field)
        for gate in self.gates:
            g = SparseMultilinearPoly.constant(self.n, 1, self.field)
            for f in gate:
                if f.sparsity * g.sparsity > term_cap:
                    raise ExpansionBudgetError(f"expansion exceeds term cap {term_cap}")
                g = g * f
            total = total + g
            if total.sparsity > term_cap:
                raise ExpansionBudgetError(f"expansion exceeds term cap {term_cap}")
        return total

    def to_text(self, header=True) -> str:
        body = " + ".join("*".join(f"({f.to_text()})" for f in gate) if gate else "(1)"
                          for gate in self.gates) or "(0)"
        if header:
            return f"# class={self.kind} n={self.n}\n{body}"
        return body

    def __str__(self):
        return self.to_text(header=False)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, {self.to_text(header=False)!r})"

    def __eq__(self, other):
        return (type(other) is type(self) and other.n == self.n and other.field == self.field
                and other.gates == self.gates)

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.gates))


class Depth4Formula(ProductSumFormula):
    kind = "d4"


class Depth3Formula(ProductSumFormula):
    kind = "d3"

    def _validate(self):
        for gi, gate in enumerate(self.gates):
            for fj, f in enumerate(gate):
                if f.degree() > 1:
                    raise FormulaError(f"gate {gi + 1}, factor {fj + 1} is not linear: {f}")

    def linear_forms(self):
        return [[LinearForm.from_poly(f) for f in gate] for gate in self.gates]

    def as_depth4(self) -> Depth4Formula:
        return Depth4Formula(self.n, self.gates, self.field)


class Leaf(NamedTuple):
    var: int | None
    coeff: int

    def to_poly(self, n, field):
        if self.var is None:
            return SparseMultilinearPoly.constant(n, self.coeff, field)
        return SparseMultilinearPoly.variable(n, self.var, field, self.coeff)

    def to_text(self, field):
        c = field.signed(self.coeff)
        if self.var is None:
            return str(c)
        return f"x{self.var + 1}" if c == 1 else f"{c}*x{self.var + 1}"


class RegularFormula:
    """Alternating sum/product tree with a constant fan-in per layer.

    ``root`` is the top sum node.  A sum node above the bottom layer is a
    tuple of product nodes, a product node is a tuple of sum nodes, and a
    bottom sum node is a tuple of :class:`Leaf`.  Children of every product
    node must have pairwise disjoint leaf variables.
    """

    kind = "regular"

    def __init__(self, n: int, profile: Sequence[int], root, field: Field = DEFAULT_FIELD):
        profile = tuple(int(v) for v in profile)
        if len(profile) % 2 != 1 or any(v < 1 for v in profile):
            raise FormulaError(f"bad profile {profile}: need (a1, p1, ..., ad, pd, a_(d+1)) with entries >= 1")
        self.n = n
        self.field = field
        self.profile = profile
        self.root = _freeze_tree(root, field.p)
        self._check(self.root, 0)

    def _check(self, node, layer):
        prof = self.profile
        if len(node) != prof[layer]:
            raise FormulaError(f"sum node at layer {layer + 1} has fan-in {len(node)}, expected {prof[layer]}")
        if layer == len(prof) - 1:
            for leaf in node:
                if not isinstance(leaf, Leaf):
                    raise FormulaError("bottom sum node must hold leaves")
                if leaf.var is not None and not 0 <= leaf.var < self.n:
                    raise DimensionError(f"leaf variable x{leaf.var + 1} out of range for n={self.n}")
            return _leaf_vars(node)
        out = set()
        for prod in node:
            if len(prod) != prof[layer + 1]:
                raise FormulaError(
                    f"product node at layer {layer + 2} has fan-in {len(prod)}, expected {prof[layer + 1]}")
            seen = set()
            for child in prod:
                vs = self._check(child, layer + 2)
                if vs & seen:
                    raise MultilinearityError(
                        f"product node at layer {layer + 2}: children share x{min(vs & seen) + 1}")
                seen |= vs
            out |= seen
        return out

    @property
    def d(self) -> int:
        return len(self.profile) // 2

    @property
    def sum_fan_ins(self):
        return self.profile[0::2]

    @property
    def product_fan_ins(self):
        return self.profile[1::2]

    def formal_degree(self) -> int:
        return math.prod(self.product_fan_ins)

    def size(self) -> int:
        return math.prod(self.profile)

    def eval(self, point) -> int:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        return _eval_sum(self.root, point, self.field.p)

    __call__ = eval

    def expand(self, term_cap: int = DEFAULT_TERM_CAP) -> SparseMultilinearPoly:
        return expand_tree(self.root, self.n, self.field, term_cap)

    def to_text(self, header=True) -> str:
        body = " + ".join(_prod_text(prod, self.field) for prod in self.root) if self.d else \
            " + ".join(leaf.to_text(self.field) for leaf in self.root)
        if header:
            return f"# class=regular n={self.n}\n{body}"
        return body

    def __str__(self):
        return self.to_text(header=False)

    def __repr__(self):
        return f"RegularFormula(n={self.n}, profile={self.profile}, {self.to_text(header=False)!r})"

    def __eq__(self, other):
        return (isinstance(other, RegularFormula) and other.n == self.n and other.field == self.field
                and other.profile == self.profile and other.root == self.root)

    def __hash__(self):
        return hash(("regular", self.n, self.profile, self.root))


def _freeze_tree(node, p):
    if isinstance(node, Leaf):
        return Leaf(node.var, node.coeff % p)
    return tuple(_freeze_tree(c, p) for c in node)


def _leaf_vars(node):
    return {leaf.var for leaf in node if leaf.var is not None and leaf.coeff}


def _eval_sum(node, point, p):
    total = 0
    for child in node:
        if isinstance(child, Leaf):
            total += child.coeff if child.var is None else child.coeff * point[child.var]
        else:
            v = 1
            for s in child:
                v = v * _eval_sum(s, point, p) % p
                if not v:
                    break
            total += v
    return total % p


def expand_tree(node, n, field, term_cap=DEFAULT_TERM_CAP):
    """Expand a sum node of a regular tree into a polynomial."""
    total = SparseMultilinearPoly.zero(n, field)
    for child in node:
        if isinstance(child, Leaf):
            total = total + child.to_poly(n, field)
            continue
        g = SparseMultilinearPoly.constant(n, 1, field)
        for s in child:
            f = expand_tree(s, n, field, term_cap)
            if f.sparsity * g.sparsity > term_cap:
                raise ExpansionBudgetError(f"expansion exceeds term cap {term_cap}")
            g = g * f
        total = total + g
        if total.sparsity > term_cap:
            raise ExpansionBudgetError(f"expansion exceeds term cap {term_cap}")
    return total


def _sum_text(node, field):
    if node and isinstance(node[0], Leaf):
        return "(" + " + ".join(leaf.to_text(field) for leaf in node) + ")"
    return "(" + " + ".join(_prod_text(prod, field) for prod in node) + ")"


def _prod_text(prod, field):
    return "*".join(_sum_text(s, field) for s in prod)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|([+\-*()]))")


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            k = int(m.group(2))
            if k < 1:
                raise FormulaSyntaxError("variables are numbered from x1", start)
            toks.append(("var", k - 1, start))
        else:
            toks.append((m.group(3), None, start))
        pos = m.end()
    toks.append(("eof", None, n))
    return toks


class _Paren(NamedTuple):
    body: list  # list of products
    pos: int


class _Term(NamedTuple):
    coeff: int
    vars: tuple
    pos: int


class _Parser:
    """Recursive descent over the generic sum/product/paren shape."""

    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        body = self.sum()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(f"unexpected {tok[0]!r}", tok[2])
        return body

    def sum(self):
        items = [self.product(negated=self._sign())]
        while self.peek()[0] in "+-":
            op = self.take()[0]
            neg = op == "-"
            if self.peek()[0] == "-":
                self.take()
                neg = not neg
            items.append(self.product(negated=neg))
        return items

    def _sign(self):
        if self.peek()[0] == "-":
            self.take()
            return True
        return False

    def product(self, negated=False):
        tok = self.peek()
        if tok[0] == "(":
            atoms = [self.paren()]
            while self.peek()[0] == "*":
                self.take()
                atoms.append(self.paren())
            if negated:
                raise FormulaSyntaxError("'-' is only allowed in front of a term", tok[2])
            return atoms
        return self.term(negated)

    def paren(self):
        tok = self.take("(")
        body = self.sum()
        self.take(")")
        return _Paren(body, tok[2])

    def term(self, negated):
        tok = self.peek()
        coeff = 1
        vars_ = []
        if tok[0] == "int":
            coeff = self.take()[1]
        elif tok[0] == "var":
            vars_.append(self.take()[1])
        else:
            raise FormulaSyntaxError(f"expected a term, found {tok[0]!r}", tok[2])
        while self.peek()[0] == "*":
            self.take()
            nxt = self.peek()
            if nxt[0] == "var":
                vars_.append(self.take()[1])
            elif nxt[0] == "int" and not vars_:
                coeff *= self.take()[1]
            else:
                raise FormulaSyntaxError("expected a variable after '*'", nxt[2])
        if len(set(vars_)) != len(vars_):
            raise MultilinearityError(f"term at position {tok[2]} repeats a variable")
        return _Term(-coeff if negated else coeff, tuple(vars_), tok[2])


def _directives(text):
    opts = {}
    body = []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            for key, val in re.findall(r"(\w+)=([\w.,]+)", s):
                opts.setdefault(key, val)
        else:
            body.append(line)
    return opts, "\n".join(body)


def _max_var(node, acc):
    if isinstance(node, _Term):
        acc.extend(node.vars)
    elif isinstance(node, _Paren):
        for prod in node.body:
            _max_var(prod, acc)
    else:
        for item in node:
            _max_var(item, acc)
    return acc


def parse(text: str, n: int | None = None, field: Field = DEFAULT_FIELD, kind: str | None = None):
    """Parse a formula file body into Depth3Formula, Depth4Formula or RegularFormula."""
    opts, body = _directives(text)
    kind = kind or opts.get("class")
    if kind not in (None, "d3", "d4", "regular"):
        raise FormulaError(f"unknown formula class {kind!r}")
    if n is None and "n" in opts:
        n = int(opts["n"])
    if not body.strip():
        raise FormulaSyntaxError("empty formula", 0)
    tree = _Parser(body).parse()
    used = _max_var(tree, [])
    need = max(used) + 1 if used else 1
    if n is None:
        n = need
    elif need > n:
        raise DimensionError(f"formula uses x{need} but n={n}")

    if kind is None:
        kind = "regular" if _is_nested(tree) else None
    if kind == "regular":
        return _to_regular(tree, n, field)

    gates = []
    for prod in tree:
        if isinstance(prod, _Term):
            raise FormulaSyntaxError("top-level terms must be wrapped in parentheses", prod.pos)
        factors = []
        for atom in prod:
            factors.append(_flat_poly(atom, n, field))
        gates.append(factors)
    if kind is None:
        kind = "d3" if all(f.degree() <= 1 for g in gates for f in g) else "d4"
    cls = Depth3Formula if kind == "d3" else Depth4Formula
    return cls(n, gates, field)


def _is_nested(tree):
    for prod in tree:
        if isinstance(prod, _Term):
            return True
        for atom in prod:
            if any(not isinstance(item, _Term) for item in atom.body):
                return True
    return False


def _flat_poly(paren, n, field):
    terms = []
    for item in paren.body:
        if not isinstance(item, _Term):
            raise FormulaSyntaxError("nested parentheses inside a depth-3/4 factor", item[0].pos)
        terms.append((item.vars, item.coeff))
    return SparseMultilinearPoly(n, terms, field)


def _to_regular(tree, n, field):
    root = _regular_sum(tree)
    profile = []
    _profile_of(root, 0, profile)
    return RegularFormula(n, profile, root, field)


def _regular_sum(items):
    if all(isinstance(it, _Term) for it in items):
        leaves = []
        for t in items:
            if len(t.vars) > 1:
                raise FormulaError(f"leaf at position {t.pos} has more than one variable")
            leaves.append(Leaf(t.vars[0] if t.vars else None, t.coeff))
        return tuple(leaves)
    if any(isinstance(it, _Term) for it in items):
        pos = next(it.pos for it in items if isinstance(it, _Term))
        raise FormulaError(f"uneven depth: leaf at position {pos} next to product gates")
    return tuple(tuple(_regular_sum(p.body) for p in prod) for prod in items)


def _profile_of(node, layer, profile):
    def note(k, v):
        if len(profile) <= k:
            profile.append(v)
        elif profile[k] != v:
            raise FormulaError(f"fan-in mismatch at layer {k + 1}: {v} vs {profile[k]}")

    note(layer, len(node))
    if isinstance(node[0], Leaf):
        return layer
    bottoms = set()
    for prod in node:
        note(layer + 1, len(prod))
        for child in prod:
            bottoms.add(_profile_of(child, layer + 2, profile))
    if len(bottoms) > 1:
        raise FormulaError("uneven depth in regular formula")
    return bottoms.pop()


def to_text(formula, header=True) -> str:
    return formula.to_text(header=header)


def expand(formula, term_cap: int = DEFAULT_TERM_CAP) -> SparseMultilinearPoly:
    return formula.expand(term_cap)


# ---------------------------------------------------------------------------
# transformations


def delta_far(phi: ProductSumFormula, tau) -> int:
    """Total sparsity of the factors that depend on more than tau variables."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return sum(f.sparsity for f in phi.factors() if len(f.var()) > tau)


def is_restricted(phi: ProductSumFormula, M, tau) -> bool:
    return phi.top_fan_in <= M and all(len(f.var()) <= tau for f in phi.factors())


def _dividing_vars(phi, term_cap):
    try:
        f = phi.expand(term_cap)
    except ExpansionBudgetError:
        # sufficient condition: x divides some factor of every gate
        if not phi.gates:
            return []
        cand = set(phi.syntactic_vars())
        out = []
        for x in sorted(cand):
            if all(any(g.divides(x) for g in gate) for gate in phi.gates):
                out.append(x)
        return out
    return sorted(f.var() - f.var_star())


def make_simple(phi: ProductSumFormula, term_cap: int = DEFAULT_TERM_CAP):
    """Rewrite phi so every variable dividing its polynomial is a factor of every gate.

    Variables are handled in increasing index order.  For a dividing
    variable x, gates without x are dropped (they cancel), and the factor
    x*g + h that contains x is replaced by the factors x and g.
    """
    divisors = _dividing_vars(phi, term_cap)
    if not divisors:
        return phi
    n, field = phi.n, phi.field
    xpoly = {x: SparseMultilinearPoly.variable(n, x, field) for x in divisors}
    gates = [list(g) for g in phi.gates]
    for x in divisors:
        new_gates = []
        for gate in gates:
            j = next((j for j, f in enumerate(gate) if x in f.var()), None)
            if j is None:
                continue
            f = gate[j]
            if f == xpoly[x]:
                new_gates.append(gate)
                continue
            g, _h = f.split(x)
            if g.degree() == 0:
                # f = c*x: keep x alone; c goes to a factor that is not a bare
                # dividing variable, or becomes a constant factor (size 0)
                c = g.constant_term()
                new_gate = list(gate)
                new_gate[j] = xpoly[x]
                k = next((k for k, h in enumerate(gate)
                          if k != j and not (len(h.var()) == 1 and h.sparsity == 1
                                             and next(iter(h.var())) in divisors)), None)
                if k is None:
                    new_gate.append(g)
                else:
                    new_gate[k] = gate[k].scale(c)
            else:
                new_gate = gate[:j] + [xpoly[x], g] + gate[j + 1:]
            new_gates.append(new_gate)
        gates = new_gates
    return phi.with_gates(gates)


def derive_restrict(phi: ProductSumFormula, A=(), B=()):
    """Formula for d_A(f) with the variables of B set to zero.

    Each factor is differentiated by the part of A it contains and then
    restricted; gates that miss a variable of A, or whose factor vanishes,
    are dropped.  For depth-3 inputs a differentiated linear form becomes its
    coefficient, a constant.
    """
    A = frozenset(A)
    B = frozenset(B)
    if A & B:
        raise ValueError(f"A and B intersect in {sorted(A & B)}")
    if not A and not B:
        return phi
    gates = []
    for gate in phi.gates:
        covered = set()
        new = []
        dead = False
        for f in gate:
            fa = A & f.var()
            covered |= fa
            g = f.derivative(fa)
            if B:
                g = g.restrict(sorted(B & g.var()))
            if g.is_zero():
                dead = True
                break
            new.append(g)
        if dead or covered != A:
            continue
        gates.append(new)
    return phi.with_gates(gates)


formula_derive_restrict = derive_restrict


def substitute(phi: ProductSumFormula, B, values):
    """Set the variables of B to the given values in every factor."""
    B = list(B)
    gates = []
    for gate in phi.gates:
        new = [f.restrict([b for b in B if b in f.var()],
                          [v for b, v in zip(B, values) if b in f.var()]) for f in gate]
        if any(g.is_zero() for g in new):
            continue
        gates.append(new)
    return phi.with_gates(gates)
