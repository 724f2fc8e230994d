"""Time the numba kernels against the pure Python fallback.

Each backend runs in its own interpreter, since the choice is fixed at import.

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --cases q-small q-tracked --repeat 3
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

CASES = {
    # name: (description, callable source run inside the worker)
    "q-small": "Q(1,2;1,3;1,4), regular table",
    "q-2048": "Q(1,3;1,3;1,3), regular table",
    "q-tracked": "Q(1,3;1,4;1,4), cosets of <x> with tracking",
    "structure": "derived series of Q_3(1,4;1,4;1,4)",
}


def _run_case(name: str):
    from bstriangle.coset.enumerate import enumerate_cosets, enumerate_tracked
    from bstriangle.decide import build_Q, build_Qp
    from bstriangle.structure import regular_group, structure_report
    from bstriangle.triangle import TriangleParams

    if name == "q-small":
        return enumerate_cosets(build_Q(TriangleParams.parse("1,2;1,3;1,4")), ()).coset_count
    if name == "q-2048":
        return enumerate_cosets(build_Q(TriangleParams.parse("1,3;1,3;1,3")), ()).coset_count
    if name == "q-tracked":
        return enumerate_tracked(build_Q(TriangleParams.parse("1,3;1,4;1,4")), "x").order
    if name == "structure":
        t = enumerate_cosets(build_Qp(TriangleParams.parse("1,4;1,4;1,4"), 3), ())
        g, _ = regular_group(t)
        return structure_report(g).derived_series_orders
    raise KeyError(name)


def worker(cases: list[str], repeat: int):
    from bstriangle._jit import backend

    out = {"backend": backend(), "cases": {}}
    for name in cases:
        t0 = time.perf_counter()
        result = _run_case(name)  # first call includes jit compilation
        first = time.perf_counter() - t0
        best = first
        for _ in range(repeat - 1):
            t0 = time.perf_counter()
            _run_case(name)
            best = min(best, time.perf_counter() - t0)
        out["cases"][name] = {"result": str(result), "first": first, "best": best}
    print(json.dumps(out))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", nargs="*", choices=sorted(CASES), default=list(CASES))
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.cases, args.repeat)
        return 0

    results = {}
    for label, flag in (("numba", "0"), ("python", "1")):
        env = dict(os.environ, BS_TRIANGLE_DISABLE_NUMBA=flag)
        cmd = [sys.executable, __file__, "--worker", "--repeat", str(args.repeat), "--cases", *args.cases]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])

    print(f"{'case':<11} {'description':<44} {'numba':>9} {'python':>9} {'speedup':>8}")
    for name in args.cases:
        nb, py = results["numba"]["cases"][name], results["python"]["cases"][name]
        if nb["result"] != py["result"]:
            print(f"{name}: backends disagree ({nb['result']} vs {py['result']})")
            return 1
        print(f"{name:<11} {CASES[name]:<44} {nb['best']:9.3f} {py['best']:9.3f} "
              f"{py['best'] / max(nb['best'], 1e-9):7.1f}x")
    print(f"(best of {args.repeat}; numba first-call times include compilation: "
          + ", ".join(f"{n} {results['numba']['cases'][n]['first']:.2f}s" for n in args.cases) + ")")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
