"""k-wise independent hash families [n] -> [m] from low-degree polynomials.

A member is the coefficient vector (c_0, ..., c_{k-1}) of a polynomial of
degree < k over F_q.  It sends x in 1..n to ((poly(x) mod q) mod m) + 1.
Members are enumerated lexicographically by coefficient vector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .algebra import next_prime


class HashExhaustedError(RuntimeError):
    """No member of the family satisfies the hash conditions."""


def ceil_tol(x: float) -> int:
    # ceil that ignores floating noise such as 3.0000000000000004
    return math.ceil(x - 1e-9)


def construction_k_raw(n: int, delta: float) -> float:
    """k = n^delta + 2 log2 n before rounding."""
    return n ** delta + 2 * math.log2(n)


def construction_m_raw(n: int, eps: float, delta: float) -> float:
    """m = 10 n^(1 - (eps + delta)/2) before rounding."""
    return 10 * n ** (1 - (eps + delta) / 2)


def clamp(v: int, lo: int, hi: int) -> int:
    return max(lo, min(hi, v))


def construction_k(n: int, delta: float) -> int:
    return clamp(ceil_tol(construction_k_raw(n, delta)), 1, n)


def construction_m(n: int, eps: float, delta: float) -> int:
    return clamp(ceil_tol(construction_m_raw(n, eps, delta)), 1, n)


class HashFn(NamedTuple):
    coeffs: tuple
    q: int
    m: int

    @property
    def k(self) -> int:
        return len(self.coeffs)

    def raw(self, x: int) -> int:
        """poly(x) in F_q, before the bucket reduction."""
        v = 0
        for c in reversed(self.coeffs):
            v = (v * x + c) % self.q
        return v

    def __call__(self, x: int) -> int:
        return self.raw(x) % self.m + 1

    def buckets(self, n: int):
        """Variable sets T_1..T_m (0-based indices, bucket j at position j-1)."""
        out = [[] for _ in range(self.m)]
        for v in range(n):
            out[self(v + 1) - 1].append(v)
        return tuple(tuple(b) for b in out)


def hash_eval(h: HashFn, x: int) -> int:
    return h(x)


class HashFamily:
    """All polynomials of degree < k over F_q, viewed as maps [n] -> [m]."""

    def __init__(self, n: int, m: int, k: int, q: int | None = None):
        if n < 1 or m < 1 or k < 1:
            raise ValueError(f"need n, m, k >= 1, got n={n} m={m} k={k}")
        if q is None:
            q = next_prime(max(n, m, 2))
        elif q < max(n, m):
            raise ValueError(f"q={q} is smaller than max(n, m)={max(n, m)}")
        self.n, self.m, self.k, self.q = n, m, k, q

    def __len__(self):
        return self.q ** self.k

    def __iter__(self) -> Iterator[HashFn]:
        for coeffs in itertools.product(range(self.q), repeat=self.k):
            yield HashFn(coeffs, self.q, self.m)

    def __repr__(self):
        return f"HashFamily(n={self.n}, m={self.m}, k={self.k}, q={self.q})"

    @property
    def saturated(self) -> bool:
        # k >= n: every map [n] -> F_q is a member, so every map [n] -> [m] is induced
        return self.k >= self.n

    def bucketings(self) -> Iterator[tuple]:
        """Distinct partitions of the variables into buckets, each once.

        Buckets are reported as a tuple of nonempty sorted variable tuples in
        order of their smallest variable; the bucket labels are forgotten
        since the product sets built on them do not depend on the labels.
        """
        if self.saturated:
            yield from set_partitions(self.n, self.m)
            return
        seen = set()
        for h in self:
            key = canonical_partition(h.buckets(self.n))
            if key not in seen:
                seen.add(key)
                yield key


def canonical_partition(buckets) -> tuple:
    return tuple(sorted(tuple(sorted(b)) for b in buckets if b))


def set_partitions(n: int, max_blocks: int) -> Iterator[tuple]:
    """All partitions of range(n) into at most max_blocks blocks."""
    def rec(v, blocks):
        if v == n:
            yield tuple(tuple(b) for b in blocks)
            return
        for b in blocks:
            b.append(v)
            yield from rec(v + 1, blocks)
            b.pop()
        if len(blocks) < max_blocks:
            blocks.append([v])
            yield from rec(v + 1, blocks)
            blocks.pop()
    if n == 0:
        yield ()
        return
    yield from rec(0, [])


@dataclass(frozen=True)
class HashCheck:
    ok: bool
    # (partition index i, bucket j, the offending set A, condition 1 or 2)
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_hash_conditions(h: HashFn, parts: Sequence[Sequence], k: int, n: int | None = None) -> HashCheck:
    """Verify both bucketing conditions for h against every partition.

    (1) each bucket meets every set A in at most k elements;
    (2) per partition and bucket, at most k*log2(n) sets meet the bucket in
        more than one element.
    ``parts`` holds families of pairwise-disjoint 0-based variable sets.
    """
    if n is None:
        n = 1 + max((v for fam in parts for A in fam for v in A), default=0)
    limit = k * math.log2(n) if n > 1 else 0.0
    for i, fam in enumerate(parts):
        heavy = {}
        for A in fam:
            counts = {}
            for v in A:
                j = h(v + 1)
                counts[j] = counts.get(j, 0) + 1
            for j in sorted(counts):
                c = counts[j]
                if c > k:
                    return HashCheck(False, (i, j, tuple(sorted(A)), 1))
                if c > 1:
                    heavy.setdefault(j, []).append(A)
        for j in sorted(heavy):
            if len(heavy[j]) > limit:
                return HashCheck(False, (i, j, tuple(sorted(heavy[j][-1])), 2))
    return HashCheck(True)


def find_good_hash(parts, k: int, m: int, n: int | None = None, q: int | None = None,
                   limit: int | None = None) -> HashFn:
    """First family member, in enumeration order, passing both conditions."""
    if m < 1 or k < 1:
        raise ValueError(f"need m, k >= 1, got m={m} k={k}")
    if n is None:
        n = 1 + max((v for fam in parts for A in fam for v in A), default=0)
    fam = HashFamily(n, m, k, q)
    for idx, h in enumerate(fam):
        if limit is not None and idx >= limit:
            break
        if check_hash_conditions(h, parts, k, n):
            return h
    raise HashExhaustedError(f"no member of {fam} satisfies the hash conditions")
