"""Command line entry point: ``bstriangle <command> ...``.

Numbers in JSON output are decimal strings, since exponents quickly outgrow
native integer types.  Exit codes for ``decide``: 0 developable, 1 not
developable, 2 unknown.  Usage and parse errors exit with 3.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .arith import default_guard, is_overflow
from .coset.enumerate import EnumLimits
from .decide import (
    DEVELOPABLE,
    NOT_DEVELOPABLE,
    analyze_Q,
    analyze_Qp,
    build_Q,
    decide,
    decide_with_reduction_search,
    enumerate_finite,
    affine_report,
    normalize_for_Q,
)
from .structure import AbelianInvariants, abelianization
from .triangle import (
    ParamsSyntaxError,
    PreconditionViolated,
    TriangleParams,
    canonicalize,
    coprime_reduce,
    killer_relation,
    order_bounds,
    order_exponents,
    orbit,
    power_reduce,
    presentation,
)
from .words import Word

SCHEMA_VERSION = "1"

EXIT_USAGE = 3
EXIT_OVERFLOW = 4
EXIT_REFUSED = 5

VERDICT_EXIT = {DEVELOPABLE: 0, NOT_DEVELOPABLE: 1}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage, which would collide with 'unknown'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def jsonable(obj):
    """Convert a result into plain JSON types, with every number as a decimal string."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int) or hasattr(obj, "dtype"):
        return str(int(obj))
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, (TriangleParams, Word)):
        return str(obj)
    if isinstance(obj, AbelianInvariants):
        return [str(v) for v in obj.invariant_factors]
    if is_overflow(obj):
        return "overflow"
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


def report_file(command: str, given: dict, payload, seconds: float, limits: EnumLimits | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "input": given,
           "result": jsonable(payload), "timing": {"seconds": f"{seconds:.3f}"}}
    if limits is not None:
        doc["limits"] = {"max_cosets": str(limits.max_cosets), "max_seconds": repr(limits.max_seconds)}
    return doc


def _params(text: str) -> TriangleParams:
    try:
        return TriangleParams.parse(text)
    except ParamsSyntaxError as exc:
        raise UsageError(str(exc)) from exc


def _limits(args) -> EnumLimits:
    return EnumLimits(args.limits_cosets, args.limits_seconds)


def _emit(args, doc: dict, lines: list[str]):
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------- commands


def cmd_decide(args) -> int:
    p = _params(args.params)
    t0 = time.perf_counter()
    if args.depth:
        v = decide_with_reduction_search(p, args.depth)
    else:
        v = decide(p)
    doc = report_file("decide", {"params": str(p), "depth": str(args.depth)}, v.to_dict(),
                      time.perf_counter() - t0)
    lines = [f"{p}: {v.outcome}" + (f" ({v.family})" if v.family else "")]
    for s in v.evidence:
        lines.append(f"  [{s.rule}] {s.detail}" + (f" -> {s.params_after}" if s.params_after else ""))
    lines += [f"  note: {a}" for a in v.annotations]
    _emit(args, doc, lines)
    return VERDICT_EXIT.get(v.outcome, 2)


def _refusal(args, command: str, p, exc: Exception) -> int:
    doc = report_file(command, {"params": str(p)}, {"refused": str(exc)}, 0.0)
    _emit(args, doc, [f"{p}: refused: {exc}"])
    return EXIT_REFUSED


def quotient_payload(rep) -> dict:
    return jsonable(rep)


def cmd_quotient(args) -> int:
    p = _params(args.params)
    limits = _limits(args)
    try:
        normalize_for_Q(p)
    except PreconditionViolated as exc:
        return _refusal(args, "quotient", p, exc)
    t0 = time.perf_counter()
    if args.prime:
        pr, rep = analyze_Qp(p, args.prime, limits, args.recipe, args.strategy)
        payload = {"prime_report": pr, "structure": rep}
        lines = [f"Q_{pr.prime}({p}): order {pr.order if pr.order is not None else 'unknown'}",
                 f"  recipe {pr.recipe}, order relators exponents {pr.exponents}",
                 f"  derived subgroup abelian: {pr.derived_abelian} "
                 f"(abelian forced by differences: {pr.criterion_expected})"]
        if rep is not None:
            lines += [f"  derived series orders {rep.derived_series_orders}",
                      f"  nilpotency class of derived subgroup {rep.nilpotency_class_of_derived}"]
        if pr.note:
            lines.append(f"  {pr.note}")
        done = pr.order is not None
    else:
        rep = analyze_Q(p, limits, args.strategy, with_primes=not args.no_primes)
        payload = rep
        lines = _quotient_lines(rep)
        done = rep.complete
    doc = report_file("quotient", {"params": str(p), "prime": str(args.prime or "")}, payload,
                      time.perf_counter() - t0, limits)
    _emit(args, doc, lines)
    return 0 if done else EXIT_OVERFLOW


def _quotient_lines(rep) -> list[str]:
    lines = [f"Q({rep.normalized}): {rep.status}" + (f", order {rep.order}" if rep.order else "")]
    if rep.moves != "(none)":
        lines.append(f"  normalized from {rep.params} by {rep.moves}")
    lines.append(f"  abelianization {rep.abelian_invariants}")
    if not rep.complete:
        lines += [f"  {entry}" for entry in rep.log]
        return lines
    lines.append(f"  method {rep.method}, element orders {rep.element_orders}")
    b = rep.bound_check
    lines.append(f"  L={b['L']} M={b['M']} |Q|/L={b['quotient_ratio']} divides M: {b['ratio_divides_M']}")
    d = rep.derived_report
    if d is not None:
        lines.append(f"  derived series orders {d.derived_series_orders}, "
                     f"class of derived subgroup {d.nilpotency_class_of_derived}")
    else:
        lines.append(f"  structure {rep.derived_note}")
    for pr in rep.per_prime:
        lines.append(f"  Q_{pr.prime}: order {pr.order}, derived abelian {pr.derived_abelian}")
    bad = rep.violations
    lines.append("  all relation checks hold" if not bad else f"  VIOLATED: {', '.join(bad)}")
    return lines


def cmd_killer(args) -> int:
    p = _params(args.params)
    try:
        k = killer_relation(p, args.R, args.S, args.T, default_guard())
    except PreconditionViolated as exc:
        return _refusal(args, "killer", p, exc)
    if is_overflow(k):
        doc = report_file("killer", {"params": str(p)}, {"relation": "overflow"}, 0.0)
        _emit(args, doc, [f"{p}: exponents exceed the size guard"])
        return EXIT_OVERFLOW
    verified, note = None, ""
    try:
        fq, log = enumerate_finite(build_Q(p), _limits(args))
        if fq is None:
            note = "; ".join(log)
        else:
            orders = {g: fq.element_order(Word.gen(g)) for g in "xyz"}
            verified = fq.is_trivial(k.reduced_relator(orders))
            note = f"in Q of order {fq.order}"
    except PreconditionViolated as exc:
        note = f"Q not defined: {exc}"
    payload = {"relation": str(k), "lhs": k.lhs, "rhs": k.rhs, "verified": verified, "note": note}
    doc = report_file("killer", {"params": str(p), "R": str(args.R), "S": str(args.S), "T": str(args.T)},
                      payload, 0.0)
    status = {True: "verified", False: "FAILED", None: "not verified"}[verified]
    _emit(args, doc, [str(k), f"  {status} {note}".rstrip()])
    return 0 if verified is not False else 1


def cmd_canon(args) -> int:
    p = _params(args.params)
    c, moves = canonicalize(p)
    n = len(orbit(p))
    doc = report_file("canon", {"params": str(p)}, {"canonical": c, "moves": str(moves), "orbit_size": n}, 0.0)
    _emit(args, doc, [f"{c}  (moves: {moves}; orbit size {n})"])
    return 0


def cmd_abelianize(args) -> int:
    p = _params(args.params)
    if args.quotient:
        try:
            pres = build_Q(p)
        except PreconditionViolated as exc:
            return _refusal(args, "abelianize", p, exc)
    else:
        pres = presentation(p)
    ab = abelianization(pres)
    doc = report_file("abelianize", {"params": str(p), "quotient": args.quotient},
                      {"invariants": ab, "order": ab.order}, 0.0)
    _emit(args, doc, [f"{ab}" + (f"  order {ab.order}" if ab.finite else "  infinite")])
    return 0


def cmd_bounds(args) -> int:
    p = _params(args.params)
    try:
        q, _ = normalize_for_Q(p)
        b, n = order_bounds(q), order_exponents(q)
    except PreconditionViolated as exc:
        return _refusal(args, "bounds", p, exc)
    doc = report_file("bounds", {"params": str(p)}, {"normalized": q, "L": b.L, "M": b.M, "N": n}, 0.0)
    _emit(args, doc, [f"{q}: L={b.L} M={b.M}  order exponents x:{n[0]} y:{n[1]} z:{n[2]}"])
    return 0


def cmd_reduce(args) -> int:
    p = _params(args.params)
    if args.pair is not None:
        try:
            r = power_reduce(p, args.pair, args.by)
        except (PreconditionViolated, ValueError) as exc:
            return _refusal(args, "reduce", p, exc)
        payload, line = {"reduced": r}, f"{r}"
    else:
        cr = coprime_reduce(p)
        payload = {"l": cr.l, "m": cr.m, "n": cr.n, "reduced": cr.reduced}
        line = "overflow" if cr.overflow else f"{cr.reduced}  (l,m,n = {cr.l},{cr.m},{cr.n})"
    doc = report_file("reduce", {"params": str(p)}, payload, 0.0)
    _emit(args, doc, [line])
    return 0


def cmd_affine_check(args) -> int:
    r = affine_report()
    ok = all(r["relations"].values()) and r["squares_are_translations"] and r["rank"] == 3
    doc = report_file("affine-check", {}, {"ok": ok, **r}, 0.0)
    lines = [f"  {rel}: {'holds' if v else 'FAILS'}" for rel, v in r["relations"].items()]
    lines.append(f"  squares translate by {list(r['translations'].values())}, rank {r['rank']}")
    _emit(args, doc, ["affine model: " + ("ok" if ok else "FAILED")] + lines)
    return 0 if ok else 1


# ---------------------------------------------------------------- sweep


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    ranges: tuple[tuple[int, int], ...]
    coprime_only: bool = False
    normalized_only: bool = False
    limits: EnumLimits = dataclasses.field(default_factory=EnumLimits)
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        rng = d.get("ranges", {})
        ranges = []
        for name in "abcdef":
            if name not in rng:
                raise UsageError(f"missing range for {name}")
            lo, hi = (int(v) for v in rng[name])
            if lo > hi or (lo == hi == 0):
                raise UsageError(f"empty range for {name}: [{lo},{hi}]")
            ranges.append((lo, hi))
        filt = d.get("filters", {})
        lim = d.get("limits", {})
        workers = int(d.get("workers", 1))
        if workers < 1:
            raise UsageError("workers must be at least 1")
        limits = EnumLimits(int(lim.get("max_cosets", EnumLimits().max_cosets)),
                            float(lim.get("max_seconds", EnumLimits().max_seconds)))
        return cls(tuple(ranges), bool(filt.get("coprime_only", False)),
                   bool(filt.get("sign_normalized_only", False)), limits, workers)

    def tuples(self) -> list[TriangleParams]:
        axes = [[v for v in range(lo, hi + 1) if v != 0] for lo, hi in self.ranges]
        if any(not ax for ax in axes):
            raise UsageError("a range contains only zero")
        out = []
        for vals in itertools.product(*axes):
            p = TriangleParams(*vals)
            if self.coprime_only and any(_gcd(u, v) != 1 for u, v in p.pairs):
                continue
            if self.normalized_only and not (p.a < p.b and p.c < p.d and p.e < p.f):
                continue
            out.append(p)
        return out


def _gcd(u, v):
    from math import gcd
    return gcd(u, v)


def sweep_instance(p: TriangleParams, limits: EnumLimits, strategy: str = "hlt") -> dict:
    t0 = time.perf_counter()
    v = decide(p)
    entry = {"params": str(p), "verdict": v.outcome, "status": "refused", "order": None,
             "ratio": None, "bound_ok": None, "violations": []}
    try:
        rep = analyze_Q(p, limits, strategy)
    except PreconditionViolated as exc:
        entry["refusal"] = str(exc)
        rep = None
    if rep is not None:
        entry["status"] = rep.status
        entry["order"] = rep.order
        entry["report"] = rep
        entry["violations"] = rep.violations
        if rep.complete:
            entry["ratio"] = rep.bound_check["quotient_ratio"]
            entry["bound_ok"] = rep.bound_check["ratio_divides_M"]
            bad_primes = [pr.prime for pr in rep.per_prime
                          if pr.criterion_expected and pr.derived_abelian is False]
            entry["prime_criterion_violations"] = bad_primes
    entry["verdict_evidence"] = v.to_dict()
    entry["seconds"] = time.perf_counter() - t0
    return entry


def _sweep_worker(job):
    p, limits, strategy = job
    return sweep_instance(p, limits, strategy)


def run_sweep(spec: SweepSpec, out_dir: Path | None = None, strategy: str = "hlt") -> list[dict]:
    """Analyze every tuple of the sweep; writes ``reports.jsonl`` and ``summary.csv`` when ``out_dir`` is given."""
    jobs = [(p, spec.limits, strategy) for p in spec.tuples()]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "reports.jsonl", "w") as fh:
            for r in results:
                doc = report_file("sweep", {"params": r["params"]}, r, r["seconds"], spec.limits)
                fh.write(json.dumps(doc, sort_keys=True) + "\n")
        with open(out_dir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["params", "verdict", "order", "ratio", "bound_ok"])
            for r in results:
                w.writerow([r["params"], r["verdict"], _cell(r["order"]), _cell(r["ratio"]),
                            _cell(r["bound_ok"])])
    return results


def _cell(v):
    return "" if v is None else str(v)


def sweep_summary(results: list[dict]) -> dict:
    counts = {}
    for r in results:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    status = {}
    for r in results:
        status[r["status"]] = status.get(r["status"], 0) + 1
    return {"instances": len(results), "verdicts": counts, "status": status,
            "bound_failures": sum(r["bound_ok"] is False for r in results),
            "relation_failures": sum(bool(r["violations"]) for r in results)}


def cmd_sweep(args) -> int:
    try:
        raw = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep spec: {exc}") from exc
    spec = SweepSpec.from_dict(raw)
    if args.workers:
        spec = dataclasses.replace(spec, workers=args.workers)
    results = run_sweep(spec, Path(args.out_dir), args.strategy)
    summary = sweep_summary(results)
    doc = report_file("sweep", {"spec": raw}, summary, sum(r["seconds"] for r in results), spec.limits)
    (Path(args.out_dir) / "summary.json").write_text(json.dumps(jsonable(summary), indent=2, sort_keys=True) + "\n")
    lines = [f"{summary['instances']} instances: " + ", ".join(f"{k} {n}" for k, n in sorted(summary["verdicts"].items())),
             "status: " + ", ".join(f"{k} {n}" for k, n in sorted(summary["status"].items())),
             f"bound-check failures: {summary['bound_failures']}",
             f"relation-check failures: {summary['relation_failures']}",
             f"reports in {args.out_dir}"]
    _emit(args, doc, lines)
    return 0 if summary["bound_failures"] == 0 and summary["relation_failures"] == 0 else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = Parser(prog="bstriangle", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(sp, enum=False):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        if enum:
            sp.add_argument("--limits-cosets", type=int, default=EnumLimits().max_cosets)
            sp.add_argument("--limits-seconds", type=float, default=EnumLimits().max_seconds)
            sp.add_argument("--strategy", choices=("hlt", "felsch"), default="hlt")

    sp = sub.add_parser("decide", help="developability verdict")
    sp.add_argument("params", help="a,b;c,d;e,f (use -- before a leading minus sign)")
    sp.add_argument("--depth", type=int, default=0, help="reduction search depth")
    common(sp)
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("quotient", help="analyze the finite quotient Q or Q_p")
    sp.add_argument("params")
    sp.add_argument("--prime", type=int, default=None)
    sp.add_argument("--recipe", choices=("derived", "exponent"), default="derived",
                    help="order relators used for Q_p")
    sp.add_argument("--no-primes", action="store_true", help="skip the per-prime quotients")
    common(sp, enum=True)
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("sweep", help="analyze a grid of tuples")
    sp.add_argument("spec", help="JSON sweep specification")
    sp.add_argument("out_dir")
    sp.add_argument("--workers", type=int, default=None)
    common(sp)
    sp.add_argument("--strategy", choices=("hlt", "felsch"), default="hlt")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("killer", help="print the killer relation and check it in Q")
    sp.add_argument("params")
    for name in "RST":
        sp.add_argument(name, type=int, nargs="?", default=1)
    common(sp, enum=True)
    sp.set_defaults(func=cmd_killer)

    sp = sub.add_parser("canon", help="canonical form under trivial moves")
    sp.add_argument("params")
    common(sp)
    sp.set_defaults(func=cmd_canon)

    sp = sub.add_parser("abelianize", help="abelian invariants of G, or of Q with --quotient")
    sp.add_argument("params")
    sp.add_argument("--quotient", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_abelianize)

    sp = sub.add_parser("bounds", help="order exponents and the bounds L, M")
    sp.add_argument("params")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("reduce", help="coprime reduction, or a power reduction with --pair")
    sp.add_argument("params")
    sp.add_argument("--pair", type=int, choices=(0, 1, 2), default=None)
    sp.add_argument("--by", type=int, default=None, help="common divisor to remove from the pair")
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("affine-check", help="verify the affine model of G(1,-1;1,-1;1,-1)")
    common(sp)
    sp.set_defaults(func=cmd_affine_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "pair", None) is not None and args.by is None:
        ap.error("--pair needs --by")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bstriangle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
