"""Read-once oblivious algebraic branching programs in a known variable order."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import DEFAULT_FIELD, DimensionError, Field
from .formula import ProductSumFormula


class RoabpError(ValueError):
    pass


def _eval_label(coeffs, x, p):
    v = 0
    for c in reversed(coeffs):
        v = (v * x + c) % p
    return v


class Roabp:
    """Layered program; layer l's edges are univariate in ``order[l]``.

    ``layers[l]`` is a ``w_l x w_(l+1)`` matrix whose entries are coefficient
    tuples ``(c0, c1, ...)`` of the edge label, or None for a missing edge.
    The source and sink layers have exactly one node.
    """

    def __init__(self, n: int, order, layers, field: Field = DEFAULT_FIELD):
        self.n = n
        self.order = tuple(order)
        self.field = field
        if len(set(self.order)) != len(self.order):
            raise RoabpError("variable order repeats a variable")
        if any(not 0 <= v < n for v in self.order):
            raise DimensionError(f"order {self.order} out of range for n={n}")
        if len(layers) != len(self.order):
            raise RoabpError(f"{len(layers)} layers for {len(self.order)} variables")
        p = field.p
        mats = []
        rows = 1
        for li, mat in enumerate(layers):
            if len(mat) != rows:
                raise RoabpError(f"layer {li + 1} has {len(mat)} rows, expected {rows}")
            cols = len(mat[0]) if mat else None
            norm = []
            for row in mat:
                if cols is not None and len(row) != cols:
                    raise RoabpError(f"layer {li + 1} is ragged")
                norm.append(tuple(None if e is None else tuple(c % p for c in e) for e in row))
            mats.append(tuple(norm))
            if cols is None:
                # zero-width layer: the next layer is fixed by its own column count
                cols = 0 if li + 1 < len(layers) else 1
            rows = cols
        if self.order and rows != 1:
            raise RoabpError("last layer must end in a single sink")
        self.layers = tuple(mats)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def layer_sizes(self):
        sizes = [1]
        for mat in self.layers:
            sizes.append(len(mat[0]) if mat else 0)
        if self.layers:
            sizes[-1] = 1
        return sizes

    @property
    def width(self) -> int:
        return max(self.layer_sizes())

    @property
    def degree(self) -> int:
        return max((len(e) - 1 for mat in self.layers for row in mat for e in row if e is not None), default=0)

    def eval(self, point) -> int:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        p = self.field.p
        vec = [1]
        for var, mat in zip(self.order, self.layers):
            x = point[var] % p
            width = len(mat[0]) if mat else 0
            if not mat and var == self.order[-1]:
                width = 1
            out = [0] * width
            for i, row in enumerate(mat):
                vi = vec[i]
                if not vi:
                    continue
                for j, e in enumerate(row):
                    if e is not None:
                        out[j] = (out[j] + vi * _eval_label(e, x, p)) % p
            vec = out
        return vec[0] if vec else 0

    __call__ = eval

    def dump(self) -> str:
        """Line-oriented debug listing; not a stable format."""
        lines = [f"roabp n={self.n} depth={self.depth} width={self.width} layers={self.layer_sizes()}"]
        for li, (var, mat) in enumerate(zip(self.order, self.layers)):
            for i, row in enumerate(mat):
                for j, e in enumerate(row):
                    if e is not None:
                        label = " + ".join(f"{self.field.signed(c)}*x{var + 1}^{k}" for k, c in enumerate(e) if c)
                        lines.append(f"L{li + 1} {i}->{j}: {label or '0'}")
        return "\n".join(lines)

    def __repr__(self):
        return f"Roabp(n={self.n}, depth={self.depth}, width={self.width})"


def roabp_eval(P: Roabp, point) -> int:
    return P.eval(point)


@dataclass(frozen=True)
class SparseProductShape:
    """Measured parameters of a sum of products of sparse polynomials."""

    M: int
    k: int  # max number of factors with more than one variable in a gate
    s: int  # max factor sparsity

    @property
    def width_bound(self) -> int:
        return self.M * self.s ** self.k


def sparse_product_shape(phi: ProductSumFormula) -> SparseProductShape:
    k = max((sum(1 for f in gate if len(f.var()) > 1) for gate in phi.gates), default=0)
    s = max((f.sparsity for f in phi.factors()), default=0)
    return SparseProductShape(phi.top_fan_in, k, s)


def from_sparse_products(phi: ProductSumFormula, order=None, k=None, s=None) -> Roabp:
    """ROABP of width <= M * s**k computing phi in the given variable order.

    Each gate's multi-variable factors are multiplied out into at most s**k
    monomials; every monomial times the gate's univariate factors is a
    product of univariate polynomials, read along ``order`` as one path.
    All paths of all gates run in parallel.
    """
    n, field = phi.n, phi.field
    p = field.p
    if order is None:
        order = tuple(range(n))
    order = tuple(order)
    if len(set(order)) != len(order):
        raise RoabpError("variable order repeats a variable")
    pos = {v: i for i, v in enumerate(order)}
    missing = phi.syntactic_vars() - set(order)
    if missing:
        raise RoabpError("variables " + ", ".join(f"x{v + 1}" for v in sorted(missing)) + " are not in the order")
    for gi, gate in enumerate(phi.gates):
        multi = [fj for fj, f in enumerate(gate) if len(f.var()) > 1]
        if k is not None and len(multi) > k:
            raise RoabpError(f"gate {gi + 1} has {len(multi)} multi-variable factors, more than k={k}")
        for fj, f in enumerate(gate):
            if s is not None and f.sparsity > s:
                raise RoabpError(f"gate {gi + 1}, factor {fj + 1} has sparsity {f.sparsity} > s={s}")
    if not order:
        raise RoabpError("an ROABP needs at least one variable")

    paths = []  # (scalar, {layer: (c0, c1)})
    for gate in phi.gates:
        scalar = 1
        base = {}
        multi = []
        for f in gate:
            vs = f.var()
            if not vs:
                scalar = scalar * f.constant_term() % p
            elif len(vs) == 1:
                (v,) = vs
                base[pos[v]] = (f.terms.get((), 0), f.terms.get((v,), 0))
            else:
                multi.append(f)
        if not scalar:
            continue
        g = None
        for f in multi:
            g = f if g is None else g * f
        monos = g.terms.items() if g is not None else [((), 1)]
        for mono, c in monos:
            labels = dict(base)
            for v in mono:
                labels[pos[v]] = (0, 1)
            paths.append((scalar * c % p, labels))

    D = len(order)
    one = (1, 0)
    if D == 1:
        total = [0, 0]
        for c, labels in paths:
            lab = labels.get(0, one)
            total[0] = (total[0] + c * lab[0]) % p
            total[1] = (total[1] + c * lab[1]) % p
        return Roabp(n, order, [[[tuple(total)]]], field)

    W = len(paths)
    if W == 0:
        return _zero_roabp(n, order, field)
    layers = []
    first = [[None] * W]
    for j, (c, labels) in enumerate(paths):
        lab = labels.get(0, one)
        first[0][j] = (lab[0] * c % p, lab[1] * c % p)
    layers.append(first)
    for li in range(1, D - 1):
        mat = [[None] * W for _ in range(W)]
        for j, (_, labels) in enumerate(paths):
            mat[j][j] = labels.get(li, one)
        layers.append(mat)
    layers.append([[labels.get(D - 1, one)] for _, labels in paths])
    return Roabp(n, order, layers, field)


def _zero_roabp(n, order, field):
    # one path whose first edge is the zero polynomial
    D = len(order)
    if D == 1:
        return Roabp(n, order, [[[(0, 0)]]], field)
    layers = [[[(0, 0)]]] + [[[(1, 0)]] for _ in range(D - 2)] + [[[(1, 0)]]]
    return Roabp(n, order, layers, field)


def width_bound_holds(phi: ProductSumFormula, P: Roabp) -> bool:
    return P.width <= max(1, sparse_product_shape(phi).width_bound)


def log2_width(M, s, t) -> float:
    """log2(M * s**t) without forming the number."""
    return math.log2(M) + t * math.log2(s) if M > 0 and s > 0 else float("-inf")
