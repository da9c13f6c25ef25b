"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line (shown even when
pytest captures output) and then asserts.  Run directly with
``python3 tests/test_acceptance.py`` for just the summary lines.
"""
import contextlib
import io
import itertools
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest

from arrowlab.axioms import ConflictKind, build_constraints, initial_assignment, propagate_to_fixpoint
from arrowlab.cli import run
from arrowlab.cnf import export_cnf, solve_cnf
from arrowlab.core import Config, alt_index, reference_order_remap, profile_id
from arrowlab.mutate import mutants
from arrowlab.search import enumerate_models, pattern_profiles, refute
from arrowlab.trace import emit_trace, parse_trace


def cli(argv):
    """Run the CLI in-process; return (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(argv)
    return code, out.getvalue(), err.getvalue()


def brute_weak_orders(m):
    offdiag = [(x, y) for x in range(m) for y in range(m) if x != y]
    count = 0
    for bits in itertools.product((0, 1), repeat=len(offdiag)):
        rel = {(x, x): True for x in range(m)}
        rel.update({p: bool(b) for p, b in zip(offdiag, bits)})
        if all(rel[x, y] or rel[y, x] for x in range(m) for y in range(m)) and all(
            not (rel[x, y] and rel[y, z]) or rel[x, z]
            for x in range(m) for y in range(m) for z in range(m)
        ):
            count += 1
    return count


def criterion_1():
    t = time.perf_counter()
    code, out, _ = cli(["orders", "-m", "3"])
    listed = {3: len(out.splitlines())}
    for m in (1, 2, 4):
        listed[m] = len(cli(["orders", "-m", str(m)])[1].splitlines())
    elapsed = time.perf_counter() - t
    oracle = {m: brute_weak_orders(m) for m in (1, 2, 3, 4)}
    ok = code == 0 and listed == oracle and listed[3] == 13 and oracle == {1: 1, 2: 3, 3: 13, 4: 75} and elapsed < 1
    return ok, f"weak orders m=1..4: {[listed[m] for m in (1, 2, 3, 4)]} (oracle {[oracle[m] for m in (1, 2, 3, 4)]}) in {elapsed:.2f}s"


def criterion_2():
    t = time.perf_counter()
    a = cli(["profiles", "-n", "2", "-m", "3", "--count"])
    b = cli(["profiles", "-n", "3", "-m", "3", "--count"])
    elapsed = time.perf_counter() - t
    ok = a[:2] == (0, "169\n") and b[:2] == (0, "2197\n") and elapsed < 1
    return ok, f"profiles (2,3)={a[1].strip()} (3,3)={b[1].strip()} in {elapsed:.2f}s"


def criterion_3():
    t = time.perf_counter()
    with tempfile.TemporaryDirectory() as d:
        code, out, _ = cli(["prove", "-n", "2", "-m", "3", "-o", str(Path(d) / "two_voters.apf")])
    elapsed = time.perf_counter() - t
    ref = refute(Config(2, 3))
    got = []
    for path, branch in ref.top_cases():
        c = branch.conflict
        label = None if c is None else (c.kind.value if c.voter < 0 else f"dict({'pq'[c.voter]})")
        got.append(("".join("T" if v else "F" for _, v in path), label))
    want = [("TT", ConflictKind.TRANSITIVITY.value), ("TF", "dict(p)"), ("FT", "dict(q)"),
            ("FF", ConflictKind.COMPLETENESS.value)]
    ok = code == 0 and "4 top-level cases closed" in out and got == want and elapsed < 10
    return ok, f"(2,3) root cases {got} in {elapsed:.2f}s"


def criterion_4():
    t = time.perf_counter()
    with tempfile.TemporaryDirectory() as d:
        path = str(Path(d) / "theorem.apf")
        code, _, _ = cli(["prove", "-n", "3", "-m", "3", "-o", path])
        check_code, _, _ = cli(["check", path])
    elapsed = time.perf_counter() - t
    ref = refute(Config(3, 3))
    cons = build_constraints(Config(3, 3))
    pats = set(pattern_profiles(3, 3))
    b, c = alt_index("b"), alt_index("c")
    nodict_leaves = []
    for path, leaf in ref.leaves():
        seen = {cons.cell_parts(cell): v for cell, v in path}
        # every R_k cased with the lone voter overruled: society puts c over b
        if all(seen.get((p, b, c)) is False and seen.get((p, c, b)) is True for p in pats):
            nodict_leaves.append(leaf.conflict.kind)
    ok = (code == 0 and check_code == 0 and elapsed < 300
          and ConflictKind.TRANSITIVITY in nodict_leaves)
    return ok, (f"(3,3) proved and validated in {elapsed:.1f}s; leaves with no lone voter deciding "
                f"R_p,R_q,R_r: {[k.value for k in nodict_leaves]}")


def criterion_5():
    traces = {nm: emit_trace(refute(Config(nm, 3))) for nm in (2, 3)}
    t = time.perf_counter()
    valid, rejected, total = [], 0, 0
    with tempfile.TemporaryDirectory() as d:
        for n, tr in traces.items():
            path = Path(d) / f"t{n}.apf"
            path.write_text(tr.render())
            valid.append(cli(["check", str(path)])[0] == 0)
            parsed = parse_trace(path.read_text())
            for k, (mt, _) in enumerate(mutants(parsed, 100, seed=n)):
                mpath = Path(d) / f"m{n}_{k}.apf"
                mpath.write_text(mt.render())
                total += 1
                rejected += cli(["check", str(mpath)])[0] == 2
                mpath.unlink()
    elapsed = time.perf_counter() - t
    ok = all(valid) and rejected == total == 200 and elapsed < 60
    return ok, f"traces valid={valid}; {rejected}/{total} mutants exit 2 in {elapsed:.1f}s"


def criterion_6():
    rows, ok = [], True
    with tempfile.TemporaryDirectory() as d:
        for n, budget in ((2, 60), (3, 600)):
            for nondict, want in ((True, 20), (False, 10)):
                path = str(Path(d) / f"{n}{int(nondict)}.cnf")
                t = time.perf_counter()
                argv = ["cnf", "-n", str(n), "-m", "3", "-o", path] + ([] if nondict else ["--no-nondict"])
                c1 = cli(argv)[0]
                c2 = cli(["solve", path])[0]
                dt = time.perf_counter() - t
                ok &= c1 == 0 and c2 == want and dt < budget
                rows.append(f"({n},3){'' if nondict else '-nd'}:exit {c2} {dt:.1f}s")
    return ok, "; ".join(rows)


def criterion_7():
    cfg = Config(2, 3)
    t = time.perf_counter()
    models = enumerate_models(cfg)
    doc, vm = export_cnf(cfg, non_dict=False)
    res = solve_cnf(doc, mode="enumerate")
    elapsed = time.perf_counter() - t
    single = all(len(md.dictators) == 1 for md in models)
    same = {tuple(md.states) for md in models} == {tuple(vm.states_from_model(x)) for x in res.models}
    ok = single and res.complete and len(models) == len(res.models) and same
    return ok, (f"enumerate_models={len(models)} all-SAT={len(res.models)} "
                f"single-dictator={single} same-set={same} in {elapsed:.1f}s")


def criterion_8():
    cfg = Config(2, 3)
    cons = build_constraints(cfg)
    remap = reference_order_remap()
    r12 = profile_id((remap[1], remap[2]), 3)
    r4x = [profile_id((remap[4], remap[q]), 3) for q in (5, 6, 8)]
    a_, b, c = (alt_index(x) for x in "abc")

    def start():
        st = initial_assignment(cons)
        st.decide(cons.cell(r12, b, c), True)
        st.decide(cons.cell(r12, c, b), False)
        return st

    base, _, _ = propagate_to_fixpoint(start(), cons)
    same = True
    for seed in range(20):
        st, _, _ = propagate_to_fixpoint(start(), cons, rng=random.Random(seed))
        same &= st.states == base.states
    expect = {(b, c): 1, (c, b): 0, (a_, b): 0, (b, a_): 1}
    diffused = all(base.states[cons.cell(p, x, y)] == v for p in r4x for (x, y), v in expect.items())
    determined = sum(s != -1 for s in base.states)
    ok = same and diffused and r12 == pattern_profiles(2, 3)[0]
    return ok, (f"20 orders identical={same}; {determined}/{cons.ncells} cells determined; "
                f"R4-x profiles {r4x} get b>c and b>a={diffused}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def report(i, ok, detail, stream=None):
    stream = stream or sys.stdout
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {i}: {detail}", file=stream, flush=True)


@pytest.mark.parametrize("i", range(1, len(CRITERIA) + 1))
def test_criterion(i, capsys):
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print()
        report(i, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        report(i, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
