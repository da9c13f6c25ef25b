"""Compare the numba-compiled DPLL kernel with the pure-Python fallback.

Each backend runs in its own interpreter because ``ARROWLAB_NO_JIT`` is
read at import time.  Usage::

    python3 benchmarks/bench_solver.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKLOADS = [
    # (label, voters, with non-dictatorship, mode)
    ("decide n=2 (UNSAT)", 2, True, "decide"),
    ("decide n=3 (UNSAT)", 3, True, "decide"),
    ("all-SAT n=2 minus nondict", 2, False, "enumerate"),
]

CHILD = r"""
import json, sys, time
from arrowlab._accel import USE_JIT
from arrowlab.cnf import export_cnf, solve_cnf
from arrowlab.core import Config
repeat = int(sys.argv[1])
out = {"jit": USE_JIT, "rows": []}
for label, n, nd, mode in json.loads(sys.argv[2]):
    doc, _ = export_cnf(Config(n, 3), non_dict=nd)
    t = time.perf_counter()
    first = solve_cnf(doc, mode=mode)
    warm = time.perf_counter() - t
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        res = solve_cnf(doc, mode=mode)
        best = min(best, time.perf_counter() - t)
    assert res.status == first.status and len(res.models) == len(first.models)
    out["rows"].append([label, res.status, len(res.models), warm, best])
print(json.dumps(out))
"""


def run_backend(no_jit: bool, repeat: int) -> dict:
    env = dict(os.environ, ARROWLAB_NO_JIT="1" if no_jit else "0")
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, str(repeat), json.dumps(WORKLOADS)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    jit = run_backend(False, args.repeat)
    pure = run_backend(True, args.repeat)
    if not jit["jit"]:
        print("numba unavailable: both columns use the fallback")
    print(f"{'workload':30s} {'result':>12s} {'numba s':>9s} {'python s':>9s} {'speedup':>8s}")
    for (label, status, nmod, _, tj), (_, status2, nmod2, _, tp) in zip(jit["rows"], pure["rows"]):
        assert (status, nmod) == (status2, nmod2), "backends disagree"
        res = status if status == "UNSAT" else f"{nmod} models"
        print(f"{label:30s} {res:>12s} {tj:9.4f} {tp:9.4f} {tp / tj:7.1f}x")
    print(f"first-call overhead incl. compile: numba {sum(r[3] for r in jit['rows']):.2f}s")
    print(f"total wall {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
