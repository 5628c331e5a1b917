"""Hitting-set constructions and the black-box PIT driver.

Every set here is assembled from per-bucket ROABP hitting sets.  The only
built-in ROABP backend is the exhaustive grid {0..d}^T, which is exact.
With d = 1 the product of bucket grids is {0,1}^n whatever the hash, so at
small n the depth-3/4/regular sets coincide with the Boolean cube.  The
construction still runs every stage (hash parameters, lifts, unions) so
that a sharper backend can be dropped in through ``register_backend``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .algebra import DEFAULT_FIELD, DimensionError, Field
from .hashing import HashFamily, ceil_tol, clamp, construction_k, construction_m

DEFAULT_POINT_BUDGET = 1 << 22


class BudgetError(RuntimeError):
    """A construction would exceed its point budget."""


class ParameterError(ValueError):
    """Parameters fall outside the regime a construction is valid for."""


class HittingSet:
    """Deduplicated point set, stored in lexicographic order, plus provenance."""

    __slots__ = ("n", "points", "field", "construction", "params")

    def __init__(self, n: int, points: Iterable[Sequence[int]], field: Field = DEFAULT_FIELD,
                 construction: str = "explicit", params: dict | None = None):
        p = field.p
        pts = set()
        for pt in points:
            if len(pt) != n:
                raise DimensionError(f"point {tuple(pt)} has length {len(pt)}, expected {n}")
            pts.add(tuple(v % p for v in pt))
        self.n = n
        self.points = tuple(sorted(pts))
        self.field = field
        self.construction = construction
        self.params = dict(params or {})

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, pt):
        pt = tuple(pt)
        lo, hi = 0, len(self.points)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.points[mid] < pt:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.points) and self.points[lo] == pt

    def __eq__(self, other):
        return isinstance(other, HittingSet) and self.n == other.n and self.points == other.points

    def __hash__(self):
        return hash((self.n, self.points))

    def __repr__(self):
        return f"HittingSet(n={self.n}, size={len(self)}, construction={self.construction!r})"

    def is_boolean(self) -> bool:
        return all(v in (0, 1) for pt in self.points for v in pt)

    def with_meta(self, construction, params):
        out = HittingSet.__new__(HittingSet)
        out.n, out.points, out.field = self.n, self.points, self.field
        out.construction, out.params = construction, dict(params)
        return out


def union(n: int, sets: Iterable[HittingSet], field=DEFAULT_FIELD, construction="union", params=None):
    pts = set()
    for H in sets:
        if H.n != n:
            raise DimensionError(f"cannot union a set over {H.n} variables into {n}")
        pts.update(H.points)
    return HittingSet(n, pts, field, construction, params)


# ---------------------------------------------------------------------------
# point-set files


def write_points(H: HittingSet, path_or_file, provenance: str | None = None):
    lines = [f"n={H.n} p={H.field.p} construction={H.construction}"]
    if H.params:
        lines.append("# params " + " ".join(f"{k}={_fmt(v)}" for k, v in sorted(H.params.items())))
    if provenance:
        lines.extend("# " + ln for ln in provenance.splitlines())
    lines.extend(",".join(map(str, pt)) for pt in H.points)
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v).replace(" ", "")


def read_points(path_or_text, is_text=False) -> HittingSet:
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty point file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        n = int(header["n"])
        p = int(header["p"])
    except KeyError as e:
        raise ValueError(f"point file header lacks {e.args[0]}=") from None
    pts = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        pts.append(tuple(int(v) for v in ln.split(",")) if ln != "()" else ())
    return HittingSet(n, pts, Field(p), header.get("construction", "file"))


# ---------------------------------------------------------------------------
# ROABP backends


@dataclass(frozen=True)
class RoabpGeneratorSpec:
    n: int
    w: int
    d: int = 1
    backend: str = "grid"


def _grid_backend(spec: RoabpGeneratorSpec, field: Field, budget: int) -> HittingSet:
    size = (spec.d + 1) ** spec.n
    if size > budget:
        raise BudgetError(f"grid over {spec.n} variables needs {size} points, budget is {budget}; "
                          "use smaller buckets or raise the budget")
    values = range(spec.d + 1)
    return HittingSet(spec.n, itertools.product(values, repeat=spec.n), field, "roabp-grid",
                      {"n": spec.n, "w": spec.w, "d": spec.d})


_BACKENDS: dict = {"grid": _grid_backend}


def register_backend(name: str, fn: Callable):
    """Install an ROABP hitting-set backend ``fn(spec, field, budget) -> HittingSet``.

    The backend must hit every nonzero ROABP of width spec.w and individual
    degree spec.d over spec.n variables read in increasing index order.
    """
    _BACKENDS[name] = fn


def roabp_hitting_set(spec: RoabpGeneratorSpec, field: Field = DEFAULT_FIELD,
                      budget: int = DEFAULT_POINT_BUDGET) -> HittingSet:
    try:
        fn = _BACKENDS[spec.backend]
    except KeyError:
        raise ParameterError(f"ROABP backend {spec.backend!r} is not available "
                             f"(known: {sorted(_BACKENDS)})") from None
    return fn(spec, field, budget)


# ---------------------------------------------------------------------------
# bucketed product sets


def build_Ih(n: int, buckets: Sequence[Sequence[int]], bucket_sets: Sequence[HittingSet],
             field: Field = DEFAULT_FIELD, budget: int = DEFAULT_POINT_BUDGET) -> HittingSet:
    """Product of the bucket sets, bucket j's set placed on the variables T_j."""
    if len(buckets) != len(bucket_sets):
        raise DimensionError(f"{len(buckets)} buckets but {len(bucket_sets)} sets")
    covered = sorted(v for b in buckets for v in b)
    if covered != list(range(n)):
        raise DimensionError("buckets do not partition the variables")
    size = 1
    for T, H in zip(buckets, bucket_sets):
        if H.n != len(T):
            raise DimensionError(f"bucket of {len(T)} variables got a set over {H.n}")
        size *= len(H)
    if size > budget:
        raise BudgetError(f"I_h would have {size} points, budget is {budget}")
    cols = [tuple(sorted(T)) for T in buckets]
    pts = []
    for combo in itertools.product(*(H.points for H in bucket_sets)):
        pt = [0] * n
        for T, part in zip(cols, combo):
            for v, val in zip(T, part):
                pt[v] = val
        pts.append(pt)
    return HittingSet(n, pts, field, "I_h")


def bucket_width(M: int, s: int, k: int, n: int) -> int:
    """Width M * s^(k log n) for the per-bucket ROABPs."""
    t = ceil_tol(k * math.log2(n)) if n > 1 else 0
    return M * s ** t


@dataclass(frozen=True)
class SmallSupportParams:
    n: int
    delta: float
    eps: float
    M: int
    k: int
    m: int
    s: int
    w: int


def small_support_params(cls: str, n: int, delta: float, eps: float, M: int,
                         overrides: dict | None = None) -> SmallSupportParams:
    """k, m from the construction (clamped to [1, n]); ``overrides`` may fix k and m."""
    overrides = overrides or {}
    k = clamp(overrides["k"], 1, n) if overrides.get("k") else construction_k(n, delta)
    m = clamp(overrides["m"], 1, n) if overrides.get("m") else construction_m(n, eps, delta)
    if cls in ("depth3", "d3"):
        s = k + 1
    elif cls in ("depth4", "d4"):
        s = 2 ** k
    else:
        raise ParameterError(f"unknown class {cls!r}")
    return SmallSupportParams(n, delta, eps, M, k, m, s, bucket_width(M, s, k, n))


def small_support_hs(cls: str, n: int, delta: float, eps: float, M: int, *,
                     field: Field = DEFAULT_FIELD, backend: str = "grid", exhaustive: bool = False,
                     budget: int = DEFAULT_POINT_BUDGET, overrides: dict | None = None) -> HittingSet:
    """Union over the hash family of the bucketed product sets I_h.

    Only the partition induced by h matters, so each distinct bucketing is
    built once.  For the grid backend every I_h is the same cube, and unless
    ``exhaustive`` is set a single bucketing is built.
    """
    if n == 0:
        # nothing left to hit: the single empty point
        return HittingSet(0, [()], field, "small-support", {"class": cls, "n": 0})
    prm = small_support_params(cls, n, delta, eps, M, overrides)
    meta = {"class": cls, "n": n, "delta": delta, "eps": eps, "M": M, "k": prm.k, "m": prm.m,
            "s": prm.s, "log2_w": round(math.log2(prm.w), 6) if prm.w else 0}
    q = (overrides or {}).get("q")
    fam = HashFamily(n, prm.m, prm.k, q if q and q >= max(n, prm.m) else None)
    cache = {}

    def bucket_set(size):
        if size not in cache:
            cache[size] = roabp_hitting_set(RoabpGeneratorSpec(size, prm.w, 1, backend), field, budget)
        return cache[size]

    pts = set()
    used = 0
    for part in fam.bucketings():
        I_h = build_Ih(n, part, [bucket_set(len(T)) for T in part], field, budget)
        pts.update(I_h.points)
        used += 1
        if len(pts) > budget:
            raise BudgetError(f"small-support set exceeds budget {budget}")
        if not exhaustive and backend == "grid":
            break
    meta["bucketings"] = used
    return HittingSet(n, pts, field, "small-support", meta)


# ---------------------------------------------------------------------------
# lifts


def lift(H: HittingSet, A: Iterable[int], B: Iterable[int], n: int) -> HittingSet:
    """{0,1} on A, 0 on B, and H on the remaining variables in increasing order."""
    A = tuple(sorted(set(A)))
    B = tuple(sorted(set(B)))
    if set(A) & set(B):
        raise ValueError(f"A and B intersect in {sorted(set(A) & set(B))}")
    if any(not 0 <= v < n for v in A + B):
        raise DimensionError(f"A or B out of range for n={n}")
    rest = [v for v in range(n) if v not in set(A) | set(B)]
    if H.n != len(rest):
        raise DimensionError(f"set over {H.n} variables cannot fill {len(rest)} free positions")
    pts = []
    for bits in itertools.product((0, 1), repeat=len(A)):
        for hp in H.points:
            pt = [0] * n
            for v, b in zip(A, bits):
                pt[v] = b
            for v, val in zip(rest, hp):
                pt[v] = val
            pts.append(pt)
    return HittingSet(n, pts, H.field, "lift", {"A": A, "B": B})


def subsets_colex(n: int, max_size: int):
    """Subsets of range(n) by size, colexicographic within a size."""
    for size in range(0, min(max_size, n) + 1):
        combos = list(itertools.combinations(range(n), size))
        combos.sort(key=lambda c: tuple(reversed(c)))
        yield from combos


def _lift_union(n, pairs, component, field, budget, construction, meta):
    """Union of lift(component(|A|+|B|), A, B) over the (A, B) pairs.

    Once the union is the whole Boolean cube, Boolean components cannot add
    anything and are skipped.
    """
    cube = 2 ** n
    pts = set()
    boolean = True
    lifts = 0
    skipped = 0
    for A, B in pairs:
        H = component(len(A) + len(B))
        if boolean and len(pts) == cube and H.is_boolean():
            skipped += 1
            continue
        L = lift(H, A, B, n)
        boolean = boolean and H.is_boolean()
        pts.update(L.points)
        lifts += 1
        if len(pts) > budget:
            raise BudgetError(f"{construction} set exceeds budget {budget}")
    meta = dict(meta, lifts=lifts, skipped_lifts=skipped)
    return HittingSet(n, pts, field, construction, meta)


# ---------------------------------------------------------------------------
# depth-3


@dataclass(frozen=True)
class Depth3Params:
    n: int
    delta: float
    eps: float
    M: int
    r: int


def depth3_eps(delta):
    """eps = 2/3 - delta/3; exact for Fraction input."""
    return Fraction(2, 3) - delta / 3 if isinstance(delta, Fraction) else 2 / 3 - delta / 3


def depth3_params(n: int, delta: float) -> Depth3Params:
    if not 0 < delta < 0.5:
        raise ParameterError(f"depth-3 construction needs 0 < delta < 1/2, got {delta}")
    eps = depth3_eps(delta)
    M = ceil_tol(2 ** (n ** delta))
    r = clamp(ceil_tol(n ** eps * math.log2(M) * math.log2(n)) if n > 1 else 0, 0, n)
    return Depth3Params(n, delta, eps, M, r)


def depth3_hs(n: int, delta: float, *, field: Field = DEFAULT_FIELD, backend: str = "grid",
              exhaustive: bool = False, budget: int = DEFAULT_POINT_BUDGET,
              overrides: dict | None = None) -> HittingSet:
    prm = depth3_params(n, delta)
    cache = {}

    def component(size):
        if size not in cache:
            cache[size] = small_support_hs("depth3", n - size, delta, prm.eps, prm.M, field=field,
                                           backend=backend, exhaustive=exhaustive, budget=budget,
                                           overrides=overrides)
        return cache[size]

    pairs = ((A, ()) for A in subsets_colex(n, prm.r))
    meta = {"n": n, "delta": delta, "eps": prm.eps, "M": prm.M, "r": prm.r,
            "k": construction_k(n, delta), "m": construction_m(n, prm.eps, delta)}
    return _lift_union(n, pairs, component, field, budget, "depth3", meta)


# ---------------------------------------------------------------------------
# depth-4


@dataclass(frozen=True)
class Depth4Params:
    n: int
    M: int
    S: int
    delta: float
    n_eps: float
    eps: float
    r: int
    hypothesis: float  # (log M)^3 * log S, must be < n

    @property
    def hypothesis_holds(self) -> bool:
        return self.hypothesis < self.n


def depth4_params(n: int, M: int, S: int) -> Depth4Params:
    if n < 2:
        raise ParameterError("depth-4 construction needs n >= 2")
    logM = math.log2(max(M, 2))
    logS = math.log2(max(S, 2))
    delta = math.log(logM, n)
    n_eps = n ** (2 / 3) * logM / logS ** (2 / 3)
    eps = math.log(n_eps, n)
    r = clamp(ceil_tol(2 * n_eps * logS), 0, n)
    return Depth4Params(n, M, S, delta, n_eps, eps, r, logM ** 3 * logS)


def depth4_hs(n: int, M: int, S: int, *, strict: bool = True, field: Field = DEFAULT_FIELD,
              backend: str = "grid", exhaustive: bool = False,
              budget: int = DEFAULT_POINT_BUDGET, overrides: dict | None = None) -> HittingSet:
    prm = depth4_params(n, M, S)
    if strict and not prm.hypothesis_holds:
        raise ParameterError(f"(log2 M)^3 * log2 S = {prm.hypothesis:.4g} is not < n = {n}")
    cache = {}

    def component(size):
        if size not in cache:
            cache[size] = small_support_hs("depth4", n - size, prm.delta, prm.eps, M, field=field,
                                           backend=backend, exhaustive=exhaustive, budget=budget,
                                           overrides=overrides)
        return cache[size]

    def pairs():
        for A in subsets_colex(n, prm.r):
            rest = [v for v in range(n) if v not in A]
            for Bi in subsets_colex(len(rest), prm.r):
                yield A, tuple(rest[i] for i in Bi)

    meta = {"n": n, "M": M, "S": S, "delta": prm.delta, "eps": prm.eps, "r": prm.r,
            "hypothesis": prm.hypothesis}
    return _lift_union(n, pairs(), component, field, budget, "depth4", meta)


# ---------------------------------------------------------------------------
# regular


def regular_delta_bound(d: int) -> float:
    return 1 / 5 ** (d + 1)


def regular_cases(n: int, d: int, delta: float, c: int = 5, S: int | None = None):
    """(label, M, S) for the depth-4 classes the regular reduction lands in.

    The regular formulas have size at most 2^(n^delta), or at most S when S
    is given.
    """
    if n < 2:
        raise ParameterError("regular construction needs n >= 2")
    logn = math.log2(n)
    logS = n ** delta if S is None else math.log2(max(S, 2))
    out = []
    # Case 1: M = S, |Phi| ~ S * n^(n^(1 - (1/c)^d))
    logM = logS
    logPhi = logM + n ** (1 - (1 / c) ** d) * logn
    out.append(("case1", _pow2(logM), _pow2(logPhi)))
    for t in range(1, d):
        alpha = (1 / (c - 1)) * (1 / c) ** (d - t)
        # M = S^(n^alpha)
        logM = logS * n ** alpha
        # |Phi| <= 2 M n * n^(n^(1 - (c-1) alpha))
        logPhi = 1 + logM + logn + n ** (1 - (c - 1) * alpha) * logn
        out.append((f"case2_t{t}", _pow2(logM), _pow2(logPhi)))
    return out


def _pow2(x: float) -> int:
    return 2 ** ceil_tol(x)


def regular_hs(n: int, d: int, delta: float | None = None, *, S: int | None = None,
               field: Field = DEFAULT_FIELD,
               backend: str = "grid", exhaustive: bool = False,
               budget: int = DEFAULT_POINT_BUDGET, overrides: dict | None = None) -> HittingSet:
    """Union of the depth-4 sets for each case of the regular depth reduction.

    The depth-4 hypothesis (log M)^3 log S < n fails for every case at desk
    scale, so the depth-4 sets are built without that check.
    """
    if d < 2:
        raise ParameterError(f"regular construction needs d >= 2, got {d}")
    bound = regular_delta_bound(d)
    if delta is None:
        delta = bound
    if not 0 < delta <= bound:
        raise ParameterError(f"delta must lie in (0, 1/5^(d+1)] = (0, {bound}], got {delta}")
    parts = []
    cases = regular_cases(n, d, delta, S=S)
    for _label, M, S_case in cases:
        parts.append(depth4_hs(n, M, S_case, strict=False, field=field, backend=backend,
                               exhaustive=exhaustive, budget=budget, overrides=overrides))
    meta = {"n": n, "d": d, "delta": delta, "cases": len(cases)}
    if S is not None:
        meta["S"] = S
    return union(n, parts, field, "regular", meta)


# ---------------------------------------------------------------------------
# black-box PIT


@dataclass
class PitResult:
    zero: bool
    witness: tuple | None
    evals: int
    value: int = 0

    @property
    def verdict(self) -> str:
        return "zero-on-H" if self.zero else "nonzero"


def pit_blackbox(f: Callable[[tuple], int], H: HittingSet, jobs: int = 1, chunk: int = 256) -> PitResult:
    """Evaluate f over H in lexicographic order and report the first nonzero point.

    With ``jobs > 1`` chunks are evaluated concurrently; the reported witness
    and eval count are those of the sequential run.
    """
    p = H.field.p
    pts = H.points
    if jobs <= 1:
        for i, pt in enumerate(pts):
            v = f(pt) % p
            if v:
                return PitResult(False, pt, i + 1, v)
        return PitResult(True, None, len(pts))

    def scan(start):
        for i in range(start, min(start + chunk, len(pts))):
            v = f(pts[i]) % p
            if v:
                return i, v
        return None

    with ThreadPoolExecutor(max_workers=jobs) as ex:
        starts = range(0, len(pts), chunk)
        for hit in ex.map(scan, starts):
            # map yields in submission order, so the first hit is the smallest index
            if hit is not None:
                i, v = hit
                return PitResult(False, pts[i], i + 1, v)
    return PitResult(True, None, len(pts))
