"""The ten acceptance checks, shared by the test suite and ``mlpit selftest``.

Each check returns a :class:`CheckResult`.  ``quick=True`` shrinks corpus
sizes for the CLI self-test; the test suite runs the full sizes.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .formula import delta_far, make_simple
from .hashing import (HashFamily, HashFn, check_hash_conditions, construction_k, construction_k_raw,
                      construction_m, construction_m_raw)
from .hitting import (HittingSet, build_Ih, depth3_eps, depth3_hs, depth3_params, depth4_hs, lift,
                      pit_blackbox, regular_hs)
from .lowerbound import vanishing_multilinear, verify_certificate
from .oracle import build_corpus, gen_depth4, grid_pit
from .reduce import depth4_support_bound, reduce_depth3, reduce_depth4, regular_to_depth4
from .roabp import from_sparse_products, sparse_product_shape

# depth-3 runs use delta just below 1/2 so that 2^(n^delta) >= 4 for n >= 4
D3_DELTA = 0.49
D4_M_MAX = 2
D4_SPARSITY = 4
REGULAR_PROFILE = (2, 2, 2, 2, 1)
REGULAR_N = 8


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0
    skipped: bool = False

    @property
    def status(self) -> str:
        return "SKIP" if self.skipped else ("PASS" if self.ok else "FAIL")

    def line(self) -> str:
        return f"{self.status} [{self.number}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


class _Skip(Exception):
    pass


def _timed(number, name):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                ok, detail = fn(*args, **kwargs)
            except _Skip as e:
                return CheckResult(number, name, True, str(e), time.perf_counter() - t0, skipped=True)
            return CheckResult(number, name, ok, detail, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _sizes(ns, n_max):
    out = [n for n in ns if n_max is None or n <= n_max]
    if not out:
        raise _Skip(f"no instance size within n-max={n_max}")
    return out


def d3_corpus(n, count, seed):
    return build_corpus("d3", {"n": n, "M_max": 4, "nonzero_only": True}, count, seed)


def d4_corpus(n, count, seed):
    # sizes stay below 2^n so that (log M)^3 log S < n holds for M <= 2
    params = {"n": n, "M_max": D4_M_MAX, "s": D4_SPARSITY, "max_size": 2 ** n - 1, "nonzero_only": True}
    return build_corpus("d4", params, count, seed)


def regular_corpus(count, seed):
    return build_corpus("regular", {"n": REGULAR_N, "profile": REGULAR_PROFILE}, count, seed)


def _hits(H, items, n):
    """(failures, oracle disagreements) of pit over H against the grid oracle."""
    fails = mismatch = 0
    for it in items:
        res = pit_blackbox(it.formula.eval, H)
        ora = grid_pit(it.formula.eval, n, 1)
        if ora.zero == it.nonzero:
            mismatch += 1
        if it.nonzero and (res.zero or it.formula.eval(res.witness) == 0):
            fails += 1
    return fails, mismatch


@_timed(1, "hitting completeness, depth-3")
def check_depth3(quick=False, seed=101, n_max=None):
    count = 40 if quick else 300
    total = fails = mism = 0
    for n in _sizes((4, 5, 6), n_max):
        corpus = d3_corpus(n, count, seed + n)
        H = depth3_hs(n, D3_DELTA)
        if max(it.formula.top_fan_in for it in corpus) > depth3_params(n, D3_DELTA).M:
            return False, f"corpus top fan-in exceeds the class bound at n={n}"
        items = corpus.nonzero_items()
        total += len(items)
        f, m = _hits(H, items, n)
        fails += f
        mism += m
    return fails == 0 and mism == 0, f"{total} nonzero formulas, {fails} missed, {mism} oracle disagreements"


@_timed(2, "hitting completeness, depth-4")
def check_depth4(quick=False, seed=202, n_max=None):
    count = 40 if quick else 300
    total = fails = mism = 0
    for n in _sizes((4, 5, 6), n_max):
        corpus = d4_corpus(n, count, seed + n)
        S = max(it.formula.size() for it in corpus)
        H = depth4_hs(n, D4_M_MAX, S)
        items = corpus.nonzero_items()
        total += len(items)
        f, m = _hits(H, items, n)
        fails += f
        mism += m
    return fails == 0 and mism == 0, f"{total} nonzero formulas, {fails} missed, {mism} oracle disagreements"


@_timed(3, "hitting completeness, regular")
def check_regular(quick=False, seed=303, n_max=None):
    count = 30 if quick else 200
    _sizes((REGULAR_N,), n_max)
    corpus = regular_corpus(count, seed)
    H = regular_hs(REGULAR_N, len(REGULAR_PROFILE) // 2, S=math.prod(REGULAR_PROFILE))
    items = corpus.nonzero_items()
    fails, mism = _hits(H, items, REGULAR_N)
    bad_red = 0
    for it in corpus:
        red = regular_to_depth4(it.formula)
        if red.formula.expand() != it.poly:
            bad_red += 1
    ok = fails == 0 and mism == 0 and bad_red == 0
    return ok, (f"{len(items)} nonzero of {len(corpus)}, {fails} missed, {mism} oracle disagreements, "
                f"{bad_red} reduction mismatches")


@_timed(4, "reduction soundness")
def check_reductions(quick=False, seed=404, n_max=None):
    count = 30 if quick else 150
    bad = steps = 0
    for n in _sizes((4, 5, 6), n_max):
        eps = depth3_eps(D3_DELTA)
        for it in d3_corpus(n, count, seed + n).nonzero_items():
            A, out, tr = reduce_depth3(it.formula, eps=eps)
            if out.expand() != it.poly.derivative(A) or not tr.within_bound():
                bad += 1
        for it in d4_corpus(n, count, seed + 10 + n).nonzero_items():
            for tau in (1, 2):
                A, B, out, tr = reduce_depth4(it.formula, tau)
                want = it.poly.derivative(A).restrict(sorted(B))
                ok = out.expand() == want and not want.is_zero() and delta_far(out, tau) == 0
                d0 = delta_far(it.formula, tau)
                for k, st in enumerate(tr.steps, 1):
                    steps += 1
                    if st.after > d0 * (1 - tau / (2 * n)) ** k + 1e-9:
                        ok = False
                ok = ok and tr.support <= depth4_support_bound(n, tau, it.formula.size()) + 1e-9
                bad += not ok
    return bad == 0, f"{bad} failures, {steps} depth-4 steps checked"


@_timed(5, "ROABP correctness")
def check_roabp(quick=False, seed=505, n_max=None):
    count = 20 if quick else 100
    rng = random.Random(seed)
    bad = 0
    ns = _sizes(range(2, 9), n_max)
    for i in range(count):
        n = ns[i % len(ns)]
        phi = gen_depth4(n, rng.randint(1, 3), rng.randrange(1 << 30), s=rng.randint(1, 4))
        P = from_sparse_products(phi)
        f = phi.expand()
        if P.width > sparse_product_shape(phi).width_bound and P.width > 1:
            bad += 1
            continue
        if any(P.eval(pt) != f.eval(pt) for pt in itertools.product(range(3), repeat=n)):
            bad += 1
    return bad == 0, f"{count} instances, {bad} failures"


def preimage_oracle(h, parts, k, n):
    """Direct check of both hash conditions from the preimage sets."""
    pre = {j: {v for v in range(n) if h(v + 1) == j} for j in range(1, h.m + 1)}
    limit = k * math.log2(n) if n > 1 else 0.0
    for fam in parts:
        for j in range(1, h.m + 1):
            sizes = [len(pre[j] & set(A)) for A in fam]
            if any(s > k for s in sizes) or sum(1 for s in sizes if s > 1) > limit:
                return False
    return True


def random_parts(rng, n):
    parts = []
    for _ in range(rng.randint(1, 3)):
        vs = list(range(n))
        rng.shuffle(vs)
        fam, i = [], 0
        while i < n and rng.random() < 0.9:
            size = rng.randint(1, max(1, n // 2))
            fam.append(tuple(sorted(vs[i:i + size])))
            i += size
        parts.append([A for A in fam if A])
    return parts


@_timed(6, "hash verifier equivalence")
def check_hashing(quick=False, seed=606):
    count = 200 if quick else 1000
    rng = random.Random(seed)
    mism = 0
    for _ in range(count):
        n = rng.randint(2, 16)
        m = rng.randint(1, n)
        k = rng.randint(1, 4)
        fam = HashFamily(n, m, k)
        h = HashFn(tuple(rng.randrange(fam.q) for _ in range(k)), fam.q, m)
        parts = random_parts(rng, n)
        if bool(check_hash_conditions(h, parts, k, n)) != preimage_oracle(h, parts, k, n):
            mism += 1
    freq_bad = 0
    for q in (3, 5, 7):
        for k in (1, 2):
            fam = HashFamily(q, q, k, q)
            members = list(fam)
            for xs in itertools.permutations(range(q), k):
                counts = {}
                for h in members:
                    key = tuple(h.raw(x) for x in xs)
                    counts[key] = counts.get(key, 0) + 1
                for ys in itertools.product(range(q), repeat=k):
                    if Fraction(counts.get(ys, 0), len(members)) != Fraction(1, q ** k):
                        freq_bad += 1
    return mism == 0 and freq_bad == 0, f"{count} instances, {mism} disagreements, {freq_bad} frequency errors"


def is_simple(phi) -> bool:
    f = phi.expand()
    for x in f.var() - f.var_star():
        for gate in phi.gates:
            if not any(g.var() == {x} and g.sparsity == 1 and g.terms.get((x,)) == 1 for g in gate):
                return False
    return True


@_timed(7, "simple form")
def check_simple(quick=False, seed=707, n_max=None):
    count = 50 if quick else 200
    bad = divisor_cases = 0
    ns = _sizes((4, 5, 6, 7), n_max)
    per = count // len(ns)
    for i, n in enumerate(ns):
        for cls, params in (("d4", {"n": n, "M_max": 3, "s": 4}), ("d3", {"n": n, "M_max": 3})):
            corpus = build_corpus(cls, params, per // 2, seed + 10 * i + len(cls))
            for it in corpus:
                phi = it.formula
                f = it.poly
                divisor_cases += bool(f.var() - f.var_star())
                psi = make_simple(phi)
                if psi.expand() != f or psi.size() > phi.size() or not is_simple(psi):
                    bad += 1
    return bad == 0 and divisor_cases > 0, f"{bad} failures, {divisor_cases} items with dividing variables"


@_timed(8, "lift and product counting")
def check_counting(quick=False, seed=808):
    rng = random.Random(seed)
    bad = 0
    trials = 50 if quick else 200
    for _ in range(trials):
        n = rng.randint(1, 7)
        vs = list(range(n))
        rng.shuffle(vs)
        a, b = rng.randint(0, n), rng.randint(0, n)
        A = vs[:a]
        B = vs[a:a + b]
        free = n - len(A) - len(B)
        H = HittingSet(free, [tuple(rng.randint(0, 9) for _ in range(free)) for _ in range(rng.randint(1, 6))])
        if len(lift(H, A, B, n)) != 2 ** len(A) * len(H):
            bad += 1
        m = rng.randint(1, n)
        buckets = [[] for _ in range(m)]
        for v in range(n):
            buckets[rng.randrange(m)].append(v)
        sets = [HittingSet(len(T), [tuple(rng.randint(0, 9) for _ in T) for _ in range(rng.randint(1, 4))])
                for T in buckets]
        I_h = build_Ih(n, buckets, sets)
        if len(I_h) != math.prod(len(S) for S in sets):
            bad += 1
        for pt in I_h:
            if any(tuple(pt[v] for v in T) not in S for T, S in zip(buckets, sets)):
                bad += 1
                break
    return bad == 0, f"{trials} instances, {bad} failures"


@_timed(9, "lower-bound extractor")
def check_lowerbound(quick=False, seed=909):
    rng = random.Random(seed)
    bad = 0
    t0 = time.perf_counter()
    for _ in range(10 if quick else 50):
        n = rng.randint(1, 10)
        size = rng.randint(0, min(2 ** n - 1, 400))
        H = HittingSet(n, [tuple(rng.randint(0, 4) for _ in range(n)) for _ in range(size)])
        f = vanishing_multilinear(H)
        if not verify_certificate(f, H) or vanishing_multilinear(H) != f:
            bad += 1
    elapsed = time.perf_counter() - t0
    return bad == 0 and elapsed < 60, f"{bad} failures in {elapsed:.1f}s"


@_timed(10, "parameter arithmetic")
def check_parameters(quick=False):
    errs = []
    # n = 16, delta = 1/2: k = 4 + 2*4 = 12
    if construction_k_raw(16, 0.5) != 12 or construction_k(16, 0.5) != 12:
        errs.append("k(16, 1/2)")
    # n = 16, eps = delta = 1/2: m = 10 * 16^(1/2) = 40, clamped to 16
    if construction_m_raw(16, 0.5, 0.5) != 40 or construction_m(16, 0.5, 0.5) != 16:
        errs.append("m(16, 1/2, 1/2)")
    # n = 256, eps = 1/2, delta = 1/4: m = 10 * 256^(5/8) = 320 -> 256
    if construction_m_raw(256, 0.5, 0.25) != 320 or construction_m(256, 0.5, 0.25) != 256:
        errs.append("m(256, 1/2, 1/4)")
    # n = 2^20, eps + delta = 1: m = 10 * 2^10
    if construction_m_raw(2 ** 20, 0.75, 0.25) != 10240:
        errs.append("m(2^20, 3/4, 1/4)")
    if depth3_eps(Fraction(1, 4)) != Fraction(7, 12) or depth3_eps(Fraction(0)) != Fraction(2, 3):
        errs.append("eps(delta)")
    if construction_k(4, 0.5) != 4:  # 2 + 4 = 6 clamped to n = 4
        errs.append("k clamp")
    return not errs, "all exact" if not errs else "wrong: " + ", ".join(errs)


CHECKS = (check_depth3, check_depth4, check_regular, check_reductions, check_roabp, check_hashing,
          check_simple, check_counting, check_lowerbound, check_parameters)


_SIZED = {check_depth3, check_depth4, check_regular, check_reductions, check_roabp, check_simple}


def run_all(quick=False, only=None, seed=None, n_max=None):
    """Run the chosen checks (1-based numbers); ``seed`` shifts every check's default seed."""
    out = []
    for i, chk in enumerate(CHECKS, 1):
        if only is not None and i not in only:
            continue
        kw = {"quick": quick}
        if seed is not None and chk is not check_parameters:
            kw["seed"] = seed * 1000 + i
        if chk in _SIZED:
            kw["n_max"] = n_max
        out.append(chk(**kw))
    return out
