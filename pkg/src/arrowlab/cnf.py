"""DIMACS export of the ground instance and a small independent solver."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._dpll import SAT, UNSAT, dpll
from .axioms import Constraints, build_constraints
from .core import Config


class DimacsError(ValueError):
    pass


@dataclass
class VarMap:
    """Cell <-> DIMACS variable; variable = cell + 1."""

    cons: Constraints

    def var(self, cell: int) -> int:
        return cell + 1

    def cell(self, var: int) -> int:
        if not 1 <= var <= self.cons.ncells:
            raise KeyError(var)
        return var - 1

    def lit(self, cell: int, value: bool) -> int:
        return self.var(cell) if value else -self.var(cell)

    def to_json(self) -> str:
        data = {self.cons.cell_name(c): c + 1 for c in range(self.cons.ncells)}
        return json.dumps(data, indent=0) + "\n"

    def states_from_model(self, model) -> list[int]:
        """Model as a signed-literal list or 0/1 array over variables -> cell states."""
        arr = np.asarray(model)
        if arr.shape[0] == self.cons.ncells and set(np.unique(arr).tolist()) <= {0, 1}:
            return arr.astype(int).tolist()
        out = [0] * self.cons.ncells
        for lit in arr.tolist():
            out[abs(lit) - 1] = int(lit > 0)
        return out


@dataclass
class CnfDoc:
    nvars: int
    clauses: list[list[int]]
    comments: list[str] = field(default_factory=list)
    families: dict[str, int] = field(default_factory=dict)

    def to_dimacs(self) -> str:
        lines = [f"c {c}" for c in self.comments]
        lines.append(f"p cnf {self.nvars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Kernel arrays: literal codes and clause start offsets."""
        starts = np.zeros(len(self.clauses) + 1, dtype=np.int64)
        np.cumsum([len(cl) for cl in self.clauses], out=starts[1:])
        lits = np.fromiter(
            (2 * (abs(l) - 1) + (l < 0) for cl in self.clauses for l in cl),
            dtype=np.int64,
            count=int(starts[-1]),
        )
        return lits, starts


def export_cnf(cfg: Config, non_dict: bool = True, cons: Constraints | None = None) -> tuple[CnfDoc, VarMap]:
    """Clause families in order: completeness, transitivity, unanimity, IIA,
    non-dictatorship.  No auxiliary variables."""
    if cons is None:
        cons = build_constraints(cfg, non_dict=non_dict)
    vm = VarMap(cons)
    clauses: list[list[int]] = []
    fam: dict[str, int] = {}

    def add(name, cls):
        before = len(clauses)
        clauses.extend(cls)
        fam[name] = len(clauses) - before

    add("completeness", ([vm.lit(c, v) for c, v in cl.lits] for cl in cons.completeness))
    add("transitivity", ([vm.lit(c, v) for c, v in cl.lits] for cl in cons.transitivity))
    add("unanimity", ([vm.lit(c, v)] for c, v in cons.units))
    iia = []
    for head, other in cons.iia_links():
        iia.append([-vm.var(head), vm.var(other)])
        iia.append([vm.var(head), -vm.var(other)])
    add("iia", iia)
    if non_dict:
        add("nondict", ([vm.lit(c, v) for c, v in cl.lits] for cl in cons.nondict))
    comments = [
        f"arrowlab n={cfg.n} m={cfg.m} nondict={int(non_dict)}",
        "families " + " ".join(f"{k}={v}" for k, v in fam.items()),
    ]
    return CnfDoc(cons.ncells, clauses, comments, fam), vm


def parse_dimacs(text: str) -> CnfDoc:
    nvars = nclauses = None
    comments: list[str] = []
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            parts = line.split()
            if nvars is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: bad header {line!r}") from None
            if nvars < 0 or nclauses < 0:
                raise DimacsError(f"line {lineno}: negative counts")
            continue
        if nvars is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > nvars:
                raise DimacsError(f"line {lineno}: variable {abs(lit)} exceeds {nvars}")
            else:
                current.append(lit)
    if nvars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != nclauses:
        raise DimacsError(f"header declares {nclauses} clauses, body has {len(clauses)}")
    fam = {}
    for c in comments:
        if c.startswith("families "):
            for kv in c.split()[1:]:
                k, v = kv.split("=")
                fam[k] = int(v)
    return CnfDoc(nvars, clauses, comments, fam)


@dataclass
class SolveResult:
    status: str  # "SAT" or "UNSAT"
    models: list[list[int]]
    complete: bool = True  # False when a limit cut enumeration short
    decisions: int = 0

    @property
    def exit_code(self) -> int:
        return SAT if self.status == "SAT" else UNSAT


def _branch_order(doc: CnfDoc) -> np.ndarray:
    # occurrences in short clauses first (Jeroslow-Wang style weights)
    weight = np.zeros(doc.nvars)
    for cl in doc.clauses:
        if len(cl) > 1:
            w = 2.0 ** -len(cl)
            for lit in cl:
                weight[abs(lit) - 1] += w
    return np.argsort(-weight, kind="stable").astype(np.int64)


def solve_cnf(doc: CnfDoc, mode: str = "decide", limit: int | None = None) -> SolveResult:
    """``decide``: one model or UNSAT.  ``enumerate``: all models, each found
    model blocked by a clause over its decision literals before re-solving."""
    if mode not in ("decide", "enumerate"):
        raise ValueError(f"unknown mode {mode!r}")
    if limit is not None and limit <= 0:
        return SolveResult("SAT" if mode == "enumerate" else "UNSAT", [], complete=False)
    order = _branch_order(doc)
    clauses = list(doc.clauses)
    models: list[list[int]] = []
    decisions = 0
    while True:
        work = CnfDoc(doc.nvars, clauses)
        lits, starts = work.flat()
        nodes = np.zeros(1, dtype=np.int64)
        status, val, dec = dpll(doc.nvars, lits, starts, order, nodes)
        decisions += int(nodes[0])
        if status == UNSAT:
            break
        val = np.where(val < 0, 1, val)  # variables in no clause
        model = [(v + 1) if val[v] else -(v + 1) for v in range(doc.nvars)]
        models.append(model)
        if mode == "decide":
            break
        if limit is not None and len(models) >= limit:
            return SolveResult("SAT", models, complete=False, decisions=decisions)
        if len(dec) == 0:
            break  # the model is forced outright
        clauses.append([-(c // 2 + 1) if c % 2 == 0 else (c // 2 + 1) for c in dec.tolist()])
    return SolveResult("SAT" if models else "UNSAT", models, True, decisions)


def check_model(doc: CnfDoc, model: list[int]) -> bool:
    true = {l for l in model}
    return all(any(l in true for l in cl) for cl in doc.clauses)
