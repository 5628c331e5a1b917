"""Prime-field arithmetic and sparse multilinear polynomials.

Variables are indexed from 0 internally; the text form writes variable
``i`` as ``x{i+1}``.  A monomial is a sorted tuple of distinct variable
indices, so two polynomials are equal exactly when their term maps are.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

MERSENNE_61 = (1 << 61) - 1
DEFAULT_PRIME = MERSENNE_61


class DimensionError(ValueError):
    """A point or value vector has the wrong length."""


class MultilinearityError(ValueError):
    """An operation would produce a non-multilinear polynomial."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


class Field:
    """The prime field GF(p).  Elements are plain ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_PRIME):
        if p <= 2 or not is_prime(p):
            raise ValueError(f"modulus must be an odd prime, got {p}")
        self.p = p

    def __repr__(self):
        return f"Field({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __call__(self, a: int) -> int:
        return a % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def signed(self, a: int) -> int:
        """Representative of ``a`` in (-p/2, p/2], used for printing."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a


DEFAULT_FIELD = Field()


def _canon_monomial(vars_: Iterable[int]) -> tuple:
    mono = tuple(sorted(vars_))
    for a, b in zip(mono, mono[1:]):
        if a == b:
            raise MultilinearityError(f"variable x{a + 1} repeated in a monomial")
    return mono


class SparseMultilinearPoly:
    """Multilinear polynomial stored as {monomial: nonzero coefficient}.

    Instances are immutable; every operation returns a new polynomial.
    ``n`` is the ambient variable count and is kept for the zero polynomial
    too.
    """

    __slots__ = ("n", "field", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping | Iterable = (), field: Field = DEFAULT_FIELD):
        p = field.p
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            mono = _canon_monomial(mono)
            if mono and (mono[0] < 0 or mono[-1] >= n):
                raise DimensionError(f"monomial {mono} out of range for n={n}")
            acc[mono] = (acc.get(mono, 0) + c) % p
        self.n = n
        self.field = field
        self._terms = {m: c for m, c in sorted(acc.items(), key=_term_key) if c}
        self._hash = None

    @classmethod
    def _raw(cls, n, terms, field):
        # terms already canonical, reduced and zero-free
        obj = cls.__new__(cls)
        obj.n = n
        obj.field = field
        obj._terms = dict(sorted(terms.items(), key=_term_key))
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n, field=DEFAULT_FIELD):
        return cls._raw(n, {}, field)

    @classmethod
    def constant(cls, n, c, field=DEFAULT_FIELD):
        c %= field.p
        return cls._raw(n, {(): c} if c else {}, field)

    @classmethod
    def variable(cls, n, i, field=DEFAULT_FIELD, coeff=1):
        if not 0 <= i < n:
            raise DimensionError(f"variable index {i} out of range for n={n}")
        c = coeff % field.p
        return cls._raw(n, {(i,): c} if c else {}, field)

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    @property
    def sparsity(self) -> int:
        return len(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=-1)

    def constant_term(self) -> int:
        return self._terms.get((), 0)

    def var(self) -> frozenset:
        """Variables with a nonzero formal derivative."""
        out = set()
        for m in self._terms:
            out.update(m)
        return frozenset(out)

    def var_star(self) -> frozenset:
        """Variables of f that do not divide f."""
        out = set()
        for x in self.var():
            # x divides f iff every monomial contains x
            if any(x not in m for m in self._terms):
                out.add(x)
        return frozenset(out)

    def divides(self, x: int) -> bool:
        return bool(self._terms) and all(x in m for m in self._terms)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("polynomials over different fields")
        if self.n != other.n:
            raise DimensionError(f"n mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, int):
            other = SparseMultilinearPoly.constant(self.n, other, self.field)
        self._check(other)
        p = self.field.p
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = (acc.get(m, 0) + c) % p
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return SparseMultilinearPoly._raw(self.n, acc, self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return SparseMultilinearPoly._raw(self.n, {m: -c % p for m, c in self._terms.items()}, self.field)

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, a: int):
        a %= self.field.p
        if not a:
            return SparseMultilinearPoly.zero(self.n, self.field)
        p = self.field.p
        return SparseMultilinearPoly._raw(self.n, {m: c * a % p for m, c in self._terms.items()}, self.field)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        if not self._terms or not other._terms:
            return SparseMultilinearPoly.zero(self.n, self.field)
        shared = self.var() & other.var()
        if shared:
            x = min(shared)
            raise MultilinearityError(f"product not multilinear: both factors contain x{x + 1}")
        p = self.field.p
        acc = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(sorted(m1 + m2))
                acc[m] = (acc.get(m, 0) + c1 * c2) % p
        return SparseMultilinearPoly._raw(self.n, {m: c for m, c in acc.items() if c}, self.field)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            return self == SparseMultilinearPoly.constant(self.n, other, self.field)
        if not isinstance(other, SparseMultilinearPoly):
            return NotImplemented
        return self.n == other.n and self.field == other.field and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.field.p, tuple(self._terms.items())))
        return self._hash

    # -- calculus and substitution ----------------------------------------

    def eval(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        p = self.field.p
        total = 0
        for m, c in self._terms.items():
            v = c
            for i in m:
                v = v * point[i] % p
                if not v:
                    break
            total += v
        return total % p

    __call__ = eval

    def derivative(self, A: Iterable[int]):
        """Formal derivative with respect to every variable in A."""
        A = frozenset(A)
        if not A:
            return self
        out = {}
        for m, c in self._terms.items():
            if A.issubset(m):
                out[tuple(i for i in m if i not in A)] = c
        return SparseMultilinearPoly._raw(self.n, out, self.field)

    def restrict(self, B: Sequence[int], values: Sequence[int] | None = None):
        """Substitute ``values[j]`` for variable ``B[j]``; zeros when values is None."""
        B = list(B)
        if values is None:
            values = [0] * len(B)
        if len(values) != len(B):
            raise DimensionError(f"{len(B)} variables but {len(values)} values")
        if not B:
            return self
        p = self.field.p
        sub = {b: v % p for b, v in zip(B, values)}
        acc = {}
        for m, c in self._terms.items():
            keep = []
            for i in m:
                if i in sub:
                    c = c * sub[i] % p
                    if not c:
                        break
                else:
                    keep.append(i)
            if c:
                key = tuple(keep)
                acc[key] = (acc.get(key, 0) + c) % p
        return SparseMultilinearPoly._raw(self.n, {m: c for m, c in acc.items() if c}, self.field)

    def split(self, x: int):
        """Return (g, h) with self = x*g + h and x in neither g nor h."""
        g, h = {}, {}
        for m, c in self._terms.items():
            if x in m:
                g[tuple(i for i in m if i != x)] = c
            else:
                h[m] = c
        return (SparseMultilinearPoly._raw(self.n, g, self.field),
                SparseMultilinearPoly._raw(self.n, h, self.field))

    def with_n(self, n: int):
        """Same polynomial viewed in an ambient space of ``n`` variables."""
        if n < self.n and any(m and m[-1] >= n for m in self._terms):
            raise DimensionError(f"polynomial uses variables beyond n={n}")
        return SparseMultilinearPoly._raw(n, self._terms, self.field)

    # -- text -------------------------------------------------------------

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms.items():
            c = self.field.signed(c)
            vars_ = "*".join(f"x{i + 1}" for i in m)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(vars_)
            else:
                parts.append(f"{c}*{vars_}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SparseMultilinearPoly(n={self.n}, {self.to_text()!r})"


def _term_key(item):
    m = item[0]
    return (len(m), m)


Poly = SparseMultilinearPoly


def eval_poly(f: SparseMultilinearPoly, point) -> int:
    return f.eval(point)


def derivative(f: SparseMultilinearPoly, A) -> SparseMultilinearPoly:
    return f.derivative(A)


def restrict(f: SparseMultilinearPoly, B, values=None) -> SparseMultilinearPoly:
    return f.restrict(B, values)


def var_star(f: SparseMultilinearPoly) -> frozenset:
    return f.var_star()
