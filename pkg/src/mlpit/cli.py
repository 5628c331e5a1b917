"""Command-line front end: ``mlpit <command> ...``.

Exit status is 0 on success, 1 on a domain error (the message names the
violated precondition) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field as dc_field

from . import __version__
from .acceptance import run_all
from .algebra import DEFAULT_PRIME, Field, is_prime
from .formula import Depth3Formula, RegularFormula, parse, to_text
from .hitting import (DEFAULT_POINT_BUDGET, depth3_hs, depth4_hs, pit_blackbox, read_points,
                      regular_hs, write_points)
from .lowerbound import vanishing_multilinear, verify_certificate
from .oracle import build_corpus
from .reduce import reduce_depth3, reduce_depth4, regular_to_depth4
from .roabp import from_sparse_products

CLASSES = ("d3", "d4", "regular")


class UsageError(Exception):
    """Bad flag combination; reported with exit status 2."""


@dataclass
class RunConfig:
    command: str
    p: int = DEFAULT_PRIME
    cls: str | None = None
    params: dict = dc_field(default_factory=dict)
    overrides: dict = dc_field(default_factory=dict)
    max_points: int = DEFAULT_POINT_BUDGET
    jobs: int = 1
    seed: int | None = None
    inputs: dict = dc_field(default_factory=dict)
    output: str | None = None

    def validate(self):
        if not (self.p > 2 and is_prime(self.p)):
            raise UsageError(f"--p must be an odd prime, got {self.p}")
        if self.max_points < 1:
            raise UsageError(f"--max-points must be positive, got {self.max_points}")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be positive, got {self.jobs}")
        for key in ("k", "m"):
            v = self.overrides.get(key)
            if v is not None and v < 1:
                raise UsageError(f"--{key} must be at least 1, got {v}")
        q = self.overrides.get("q")
        if q is not None:
            if not is_prime(q):
                raise UsageError(f"--q must be prime, got {q}")
            n = self.params.get("n", 0)
            m = self.overrides.get("m") or 0
            if q < max(n, m):
                raise UsageError(f"--q={q} is below max(n, m)={max(n, m)}")
        return self

    def provenance(self) -> str:
        """Deterministic header text: no timestamps, no absolute paths."""
        parts = [f"mlpit {__version__} {self.command}"]
        if self.cls:
            parts.append(f"class={self.cls}")
        for key, v in sorted(self.params.items()):
            if v is not None:
                parts.append(f"{key}={v}")
        for key, v in sorted(self.overrides.items()):
            if v is not None:
                parts.append(f"override.{key}={v}")
        for key, v in sorted(self.inputs.items()):
            parts.append(f"{key}={os.path.basename(v)}")
        parts.append(f"p={self.p}")
        return " ".join(parts)

    @property
    def field(self) -> Field:
        return Field(self.p)


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _comment(text: str) -> str:
    return "".join(f"# {ln}\n" for ln in text.splitlines())


# ---------------------------------------------------------------------------
# commands


def cmd_gen_hs(a) -> int:
    cfg = RunConfig("gen-hs", a.p, a.cls, max_points=a.max_points, output=a.out,
                    overrides={"k": a.k, "m": a.m, "q": a.q})
    common = dict(backend=a.backend, exhaustive=a.exhaustive, budget=a.max_points)
    if a.cls == "d3":
        if a.delta is None:
            raise UsageError("--class d3 needs --delta")
        cfg.params = {"n": a.n, "delta": a.delta}
        cfg.validate()
        H = depth3_hs(a.n, a.delta, field=cfg.field, overrides=cfg.overrides, **common)
    elif a.cls == "d4":
        if a.M is None or a.S is None:
            raise UsageError("--class d4 needs --M and --S")
        cfg.params = {"n": a.n, "M": a.M, "S": a.S, "strict": not a.lenient}
        cfg.validate()
        H = depth4_hs(a.n, a.M, a.S, strict=not a.lenient, field=cfg.field, overrides=cfg.overrides, **common)
    else:
        if a.d is None:
            raise UsageError("--class regular needs --d")
        cfg.params = {"n": a.n, "d": a.d, "delta": a.delta, "S": a.S}
        cfg.validate()
        H = regular_hs(a.n, a.d, a.delta, S=a.S, field=cfg.field, overrides=cfg.overrides, **common)
    if a.out in (None, "-"):
        write_points(H, sys.stdout, cfg.provenance())
    else:
        write_points(H, a.out, cfg.provenance())
        print(f"wrote {len(H)} points over {H.n} variables to {a.out}")
    return 0


def cmd_pit(a) -> int:
    H = read_points(a.hs)
    cfg = RunConfig("pit", H.field.p, jobs=a.jobs).validate()
    phi = parse(_read(a.formula), H.n, H.field)
    if phi.n != H.n:
        raise ValueError(f"formula has n={phi.n} but the point set has n={H.n}")
    res = pit_blackbox(phi.eval, H, jobs=cfg.jobs)
    if res.zero:
        print("zero-on-H")
    else:
        print("nonzero witness=" + ",".join(map(str, res.witness)) + f" value={H.field.signed(res.value)}")
    print(f"evals={res.evals} of {len(H)}")
    return 0


def cmd_reduce(a) -> int:
    cfg = RunConfig("reduce", a.p, a.cls, params={"tau": a.tau, "epsilon": a.epsilon, "c": a.c},
                    inputs={"formula": a.formula}).validate()
    phi = parse(_read(a.formula), field=cfg.field, kind=a.cls)
    out = [_comment(cfg.provenance())]
    if a.cls == "d3":
        if (a.tau is None) == (a.epsilon is None):
            raise UsageError("--class d3 needs exactly one of --tau and --epsilon")
        A, red, tr = reduce_depth3(phi, eps=a.epsilon, tau=a.tau)
        out += [to_text(red) + "\n", _comment(tr.to_text())]
    elif a.cls == "d4":
        if a.tau is None:
            raise UsageError("--class d4 needs --tau")
        if isinstance(phi, Depth3Formula):
            phi = phi.as_depth4()
        A, B, red, tr = reduce_depth4(phi, a.tau)
        out += [to_text(red) + "\n", _comment(tr.to_text())]
    else:
        if not isinstance(phi, RegularFormula):
            raise ValueError("input is not a regular formula")
        r = regular_to_depth4(phi, c=a.c)
        out += [to_text(r.formula) + "\n",
                _comment(f"case={r.case} tag={r.tag} t={r.t} M={r.M} S={r.S} "
                         f"fan_in_bound={'ok' if r.fan_in_bound_holds() else 'violated'}")]
    _emit("".join(out), a.out)
    return 0


def cmd_roabp(a) -> int:
    cfg = RunConfig("roabp", a.p, inputs={"formula": a.formula}).validate()
    phi = parse(_read(a.formula), field=cfg.field)
    if isinstance(phi, RegularFormula):
        raise ValueError("roabp needs a depth-3 or depth-4 formula, got a regular formula")
    order = None
    if a.order:
        try:
            order = [int(v) - 1 for v in a.order.split(",")]
        except ValueError:
            raise UsageError(f"--order must be comma-separated variable indices, got {a.order!r}") from None
    P = from_sparse_products(phi, order=order)
    _emit(P.dump() + "\n", a.out)
    return 0


def cmd_lowerbound(a) -> int:
    H = read_points(a.hs)
    cfg = RunConfig("lowerbound", H.field.p, inputs={"hs": a.hs}).validate()
    f = vanishing_multilinear(H, engine=a.engine, max_rows=a.max_rows)
    if not verify_certificate(f, H):
        raise RuntimeError("extracted polynomial does not vanish on H")
    text = f"{_comment(cfg.provenance())}# n={H.n} |H|={len(H)} sparsity={f.sparsity}\n{f.to_text()}\n"
    _emit(text, a.out)
    return 0


def cmd_selftest(a) -> int:
    only = None
    if a.only:
        only = {int(v) for v in a.only.split(",")}
    results = run_all(quick=a.quick, only=only, seed=a.seed, n_max=a.n_max)
    for r in results:
        print(r.line())
    failed = sum(not r.ok for r in results)
    skipped = sum(r.skipped for r in results)
    print(f"{len(results) - failed - skipped} passed, {failed} failed, {skipped} skipped")
    return 1 if failed else 0


def cmd_bench(a) -> int:
    """Wall-clock timings; the only command whose output is not reproducible."""
    field = Field(a.p)
    rows = []

    def timed(label, fn):
        best = None
        for _ in range(a.repeat):
            t0 = time.perf_counter()
            val = fn()
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        rows.append((label, best, val))

    n = a.n
    timed(f"depth3_hs n={n} delta=0.49", lambda: len(depth3_hs(n, 0.49, field=field)))
    H = depth3_hs(n, 0.49, field=field)
    corpus = build_corpus("d3", {"n": n, "M_max": 4, "nonzero_only": True}, a.count, a.seed, field=field)
    timed(f"pit over {len(corpus)} depth-3 formulas", lambda: sum(
        not pit_blackbox(it.formula.eval, H, jobs=a.jobs).zero for it in corpus))
    timed(f"reduce_depth4 tau=1 on {len(corpus)} formulas", lambda: sum(
        len(reduce_depth4(it.formula.as_depth4(), 1)[2].gates) for it in corpus.nonzero_items()))
    half = read_points("\n".join([f"n={n} p={field.p}"] + [",".join(map(str, pt)) for pt in H.points[: len(H) // 2]]),
                       is_text=True)
    timed(f"vanishing_multilinear |H|={len(half)}", lambda: vanishing_multilinear(half).sparsity)
    for label, dt, val in rows:
        print(f"{label:<44} {dt * 1000:10.2f} ms  (result {val})")
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mlpit", description="Hitting sets and PIT for multilinear formulas.")
    ap.add_argument("--version", action="version", version=f"mlpit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def field_arg(p):
        p.add_argument("--p", type=int, default=DEFAULT_PRIME, help="field modulus (prime)")

    g = sub.add_parser("gen-hs", help="build a hitting set and write it as a point file")
    g.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", type=float)
    g.add_argument("--M", type=int, help="top fan-in (d4)")
    g.add_argument("--S", type=int, help="formula size bound (d4, regular)")
    g.add_argument("--d", type=int, help="product depth (regular)")
    g.add_argument("--lenient", action="store_true", help="d4: build even if (log M)^3 log S >= n")
    g.add_argument("--backend", default="grid")
    g.add_argument("--exhaustive", action="store_true", help="build every bucketing of the hash family")
    g.add_argument("--max-points", type=int, default=DEFAULT_POINT_BUDGET)
    g.add_argument("--k", type=int, help="override the hash degree bound")
    g.add_argument("--m", type=int, help="override the bucket count")
    g.add_argument("--q", type=int, help="override the hash field size")
    g.add_argument("--out")
    field_arg(g)
    g.set_defaults(func=cmd_gen_hs)

    p = sub.add_parser("pit", help="evaluate a formula on a point file")
    p.add_argument("--formula", required=True)
    p.add_argument("--hs", required=True)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_pit)

    r = sub.add_parser("reduce", help="white-box support reduction")
    r.add_argument("--formula", required=True)
    r.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    r.add_argument("--tau", type=float)
    r.add_argument("--epsilon", type=float)
    r.add_argument("--c", type=float, default=5)
    r.add_argument("--out")
    field_arg(r)
    r.set_defaults(func=cmd_reduce)

    o = sub.add_parser("roabp", help="print the ROABP of a sum of sparse products")
    o.add_argument("--formula", required=True)
    o.add_argument("--order", help="comma-separated 1-based variable order")
    o.add_argument("--out")
    field_arg(o)
    o.set_defaults(func=cmd_roabp)

    lb = sub.add_parser("lowerbound", help="nonzero multilinear polynomial vanishing on a point file")
    lb.add_argument("--hs", required=True)
    lb.add_argument("--engine", choices=("flint", "python"), default="flint")
    lb.add_argument("--max-rows", type=int, default=4096)
    lb.add_argument("--out")
    lb.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("selftest", help="run the acceptance criteria")
    s.add_argument("--seed", type=int)
    s.add_argument("--n-max", type=int)
    s.add_argument("--quick", action="store_true")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_selftest)

    b = sub.add_parser("bench", help="micro-benchmarks")
    b.add_argument("--n", type=int, default=6)
    b.add_argument("--count", type=int, default=50)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--jobs", type=int, default=1)
    field_arg(b)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"mlpit: usage error: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError, ArithmeticError) as e:
        print(f"mlpit: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
