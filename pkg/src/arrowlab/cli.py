"""Command-line entry point: ``arrowlab <subcommand> ...``.

Human-readable summaries go to stdout, machine artifacts to the files named
with ``-o``/``--map``, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .core import Config, ParameterError, enumerate_weak_orders, orders_json, orders_text, profile_count, profiles_json, profiles_text, voter_name

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_USAGE = 64
EXIT_GUARD = 65
EXIT_FALSIFIED = 3
SUBCOMMANDS = ("orders", "profiles", "prove", "check", "models", "cnf", "solve", "stats")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunSpec:
    subcommand: str
    voters: int = 2
    alternatives: int = 3
    output: str | None = None
    map_path: str | None = None
    input: str | None = None
    as_json: bool = False
    seed: int = 0
    options: dict = field(default_factory=dict)

    def config(self) -> Config:
        return Config(self.voters, self.alternatives)


def _society(p):
    p.add_argument("-n", "--voters", type=int, default=2)
    p.add_argument("-m", "--alternatives", type=int, default=3)


def build_parser() -> _Parser:
    ap = _Parser(prog="arrowlab", description="Finite Arrow's-theorem workbench.")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized runs (default 0)")
    sub = ap.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("orders", help="list the weak orders over m alternatives")
    p.add_argument("-m", "--alternatives", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("profiles", help="list or count preference profiles")
    _society(p)
    p.add_argument("--count", action="store_true", help="print only the number of profiles")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("prove", help="refute non-dictatorship and write a proof trace")
    _society(p)
    p.add_argument("-o", "--output", help="write the .apf trace here")
    p.add_argument("--omit-unanimity", action="store_true", help="drop the unanimity premise")

    p = sub.add_parser("check", help="validate a .apf proof trace")
    p.add_argument("input")
    p.add_argument("--stats", action="store_true", help="print the verdict statistics as JSON")
    p.add_argument("--mutants", type=int, default=0, help="also check K single-field mutants (uses --seed)")

    p = sub.add_parser("models", help="enumerate welfare functions satisfying the axioms minus non-dictatorship")
    _society(p)
    p.add_argument("--limit", type=int)
    p.add_argument("-o", "--output", help="write the models as JSON here")

    p = sub.add_parser("cnf", help="export the ground instance as DIMACS")
    _society(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--map", dest="map_path", help="write the variable map JSON here")
    p.add_argument("--no-nondict", action="store_true", help="omit the non-dictatorship clauses")

    p = sub.add_parser("solve", help="decide a DIMACS file (exit 10 SAT, 20 UNSAT)")
    p.add_argument("input")
    p.add_argument("--all", action="store_true", help="enumerate every model")
    p.add_argument("--limit", type=int)
    p.add_argument("-o", "--output", help="write the model(s) as JSON here")

    p = sub.add_parser("stats", help="constraint statistics as JSON")
    _society(p)
    p.add_argument("--no-nondict", action="store_true")
    p.add_argument("-o", "--output")
    return ap


def parse_runspec(argv) -> RunSpec:
    ns = build_parser().parse_args(argv)
    if ns.subcommand is None:
        raise UsageError("arrowlab: a subcommand is required (" + ", ".join(SUBCOMMANDS) + ")")
    known = {"subcommand", "seed", "voters", "alternatives", "output", "map_path", "input", "json"}
    spec = RunSpec(
        ns.subcommand,
        voters=getattr(ns, "voters", 2),
        alternatives=getattr(ns, "alternatives", 3),
        output=getattr(ns, "output", None),
        map_path=getattr(ns, "map_path", None),
        input=getattr(ns, "input", None),
        as_json=getattr(ns, "json", False),
        seed=ns.seed,
        options={k: v for k, v in vars(ns).items() if k not in known},
    )
    for key in ("limit", "mutants"):
        val = spec.options.get(key)
        if val is not None and val < 0:
            raise UsageError(f"arrowlab: --{key} must be non-negative")
    return spec


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="ascii", newline="\n")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"arrowlab: cannot read {path}: {exc}") from None


def cmd_orders(spec: RunSpec) -> int:
    m = spec.alternatives
    enumerate_weak_orders(m)  # guard check
    _emit(orders_json(m) if spec.as_json else orders_text(m), spec.output)
    return EXIT_OK


def cmd_profiles(spec: RunSpec) -> int:
    cfg = spec.config()
    if spec.options["count"]:
        print(profile_count(cfg))
        return EXIT_OK
    _emit(profiles_json(cfg) if spec.as_json else profiles_text(cfg), spec.output)
    return EXIT_OK


def _case_label(path, branch, cons) -> str:
    vals = ",".join("T" if v else "F" for _, v in path)
    cells = " ".join(cons.cell_name(c) for c, _ in path)
    if branch.conflict is not None and branch.conflict.voter >= 0:
        what = f"{branch.conflict.kind.value}({voter_name(branch.conflict.voter)})"
    elif branch.conflict is not None:
        what = branch.conflict.label()
    else:
        what = f"closed below ({len(list(branch.leaves()))} leaves)"
    return f"case ({vals}) {cells}: {what}"


def cmd_prove(spec: RunSpec) -> int:
    from .axioms import build_constraints
    from .search import TheoremFalsified, refute
    from .trace import emit_trace

    cfg = spec.config()
    unanimity = not spec.options["omit_unanimity"]
    cons = build_constraints(cfg, non_dict=True, unanimity=unanimity)
    try:
        ref = refute(cfg, unanimity=unanimity, cons=cons)
    except TheoremFalsified as exc:
        print(f"arrowlab: no refutation: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    tops = ref.top_cases()
    print(f"refutation of non-dictatorship at n={cfg.n}, m={cfg.m}: "
          f"{ref.root.count()} nodes, {len(ref.leaves())} leaves")
    for path, branch in tops:
        print("  " + _case_label(path, branch, cons))
    print(f"{len(tops)} top-level cases closed")
    if spec.output:
        trace = emit_trace(ref, cons)
        _emit(trace.render(), spec.output)
        print(f"wrote {len(trace.lines)} lines to {spec.output}")
    return EXIT_OK


def cmd_check(spec: RunSpec) -> int:
    from .checker import check_text
    from .mutate import mutants
    from .trace import TraceError, parse_trace

    text = _read(spec.input)
    verdict = check_text(text)
    if spec.options["stats"]:
        print(json.dumps(verdict.stats_json(), sort_keys=True))
    if not verdict.valid:
        print(f"{spec.input}: Invalid at line {verdict.line}: {verdict.violation}", file=sys.stderr)
        return EXIT_INVALID
    if not spec.options["stats"]:
        print("Valid")
    k = spec.options["mutants"]
    if k:
        try:
            trace = parse_trace(text)
        except TraceError as exc:  # unreachable after a Valid verdict
            print(f"arrowlab: {exc}", file=sys.stderr)
            return EXIT_INVALID
        accepted = [desc for mt, desc in mutants(trace, k, seed=spec.seed) if check_text(mt.render()).valid]
        print(f"{k - len(accepted)}/{k} mutants rejected (seed {spec.seed})")
        for desc in accepted:
            print(f"accepted mutant: {desc}", file=sys.stderr)
        if accepted:
            return 1
    return EXIT_OK


def cmd_models(spec: RunSpec) -> int:
    from .search import enumerate_models

    cfg = spec.config()
    models = enumerate_models(cfg, limit=spec.options["limit"])
    tally: dict[str, int] = {}
    for md in models:
        key = ",".join(voter_name(k) for k in sorted(md.dictators)) or "none"
        tally[key] = tally.get(key, 0) + 1
    print(f"{len(models)} models at n={cfg.n}, m={cfg.m}")
    for key in sorted(tally):
        print(f"  dictator {key}: {tally[key]}")
    if spec.output:
        data = [{"dictators": sorted(md.dictators), "states": "".join(map(str, md.states))} for md in models]
        _emit(json.dumps(data) + "\n", spec.output)
    return EXIT_OK


def cmd_cnf(spec: RunSpec) -> int:
    from .cnf import export_cnf

    cfg = spec.config()
    doc, vm = export_cnf(cfg, non_dict=not spec.options["no_nondict"])
    _emit(doc.to_dimacs(), spec.output)
    if spec.map_path:
        _emit(vm.to_json(), spec.map_path)
    fam = " ".join(f"{k}={v}" for k, v in doc.families.items())
    print(f"{doc.nvars} variables, {len(doc.clauses)} clauses ({fam})")
    return EXIT_OK


def cmd_solve(spec: RunSpec) -> int:
    from .cnf import DimacsError, parse_dimacs, solve_cnf

    try:
        doc = parse_dimacs(_read(spec.input))
    except DimacsError as exc:
        raise UsageError(f"arrowlab: {spec.input}: {exc}") from None
    mode = "enumerate" if spec.options["all"] else "decide"
    res = solve_cnf(doc, mode=mode, limit=spec.options["limit"])
    print("s SATISFIABLE" if res.status == "SAT" else "s UNSATISFIABLE")
    if mode == "enumerate":
        note = "" if res.complete else " (limit reached)"
        print(f"{len(res.models)} models{note}")
    if spec.output:
        _emit(json.dumps({"status": res.status, "models": res.models}) + "\n", spec.output)
    return res.exit_code


def cmd_stats(spec: RunSpec) -> int:
    from .axioms import build_constraints

    cons = build_constraints(spec.config(), non_dict=not spec.options["no_nondict"])
    _emit(json.dumps(cons.stats(), indent=2) + "\n", spec.output)
    return EXIT_OK


COMMANDS = {
    "orders": cmd_orders,
    "profiles": cmd_profiles,
    "prove": cmd_prove,
    "check": cmd_check,
    "models": cmd_models,
    "cnf": cmd_cnf,
    "solve": cmd_solve,
    "stats": cmd_stats,
}


def run(argv=None) -> int:
    try:
        spec = parse_runspec(sys.argv[1:] if argv is None else list(argv))
        random.seed(spec.seed)
        return COMMANDS[spec.subcommand](spec)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"arrowlab: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
