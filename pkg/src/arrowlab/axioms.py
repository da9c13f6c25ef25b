"""Ground constraints over society's cells and a unit-propagation engine.

A *cell* is the atom R_P(s, x, y) for profile P and ordered pair (x, y),
x != y.  Cells are numbered profile-major, pair-minor::

    cell = pid * m * (m - 1) + pair_index(x, y)

Voter cells are constants fixed by the profile, so only society's cells are
unknowns.  Constraint families:

* completeness: R(x,y) | R(y,x) per unordered pair
* transitivity: ~R(x,y) | ~R(y,z) | R(x,z) per ordered triple
* unanimity: unit literals where every voter strictly prefers x to y
* IIA: equality between same-pair cells of pair-agreeing profiles; stored as
  equivalence classes and applied eagerly, so a class is always uniformly
  assigned
* non-dictatorship: one flat clause per voter, used for conflict detection
"""
from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Config,
    alt_name,
    order_tensor,
    ordered_pairs,
    profile_table,
    unordered_pairs,
)

UNKNOWN = -1


class Rule(enum.Enum):
    DECISION = "Decision"
    UNANIMITY = "Unanimity"
    TRANSITIVITY = "Transitivity"
    COMPLETENESS = "Completeness"
    IIA = "IIA"
    NONDICT = "NonDictClause"


class ConflictKind(enum.Enum):
    TRANSITIVITY = "TransitivityViolation"
    COMPLETENESS = "CompletenessViolation"
    DICTATORSHIP = "DictatorshipViolation"


class StateError(RuntimeError):
    pass


@dataclass(frozen=True)
class Reason:
    rule: Rule
    antecedents: tuple[int, ...] = ()


@dataclass(frozen=True)
class Step:
    cell: int
    value: bool
    reason: Reason


@dataclass(frozen=True)
class Clause:
    """Disjunction of (cell, value) literals; satisfied if any cell has its value."""

    family: str
    profile: int
    lits: tuple[tuple[int, bool], ...]
    voter: int = -1


@dataclass(frozen=True)
class Conflict:
    kind: ConflictKind
    witness: Clause
    voter: int = -1

    def label(self) -> str:
        if self.kind is ConflictKind.DICTATORSHIP:
            return f"{self.kind.value}({self.voter})"
        return self.kind.value


class Constraints:
    """Immutable ground instance for one Config."""

    def __init__(self, cfg: Config, non_dict: bool = True, unanimity: bool = True):
        self.cfg = cfg
        self.non_dict = non_dict
        self.unanimity = unanimity
        n, m = cfg.n, cfg.m
        self.pairs = ordered_pairs(m)
        self.npairs = len(self.pairs)
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        table = profile_table(n, m)
        rels = order_tensor(m)
        self.table = table
        self.nprofiles = len(table)
        self.ncells = self.nprofiles * self.npairs

        # voter_rel[P, k, x, y]
        voter_rel = rels[table]
        xs = np.array([p[0] for p in self.pairs])
        ys = np.array([p[1] for p in self.pairs])
        fwd = voter_rel[:, :, xs, ys]  # (P, n, pairs)
        bwd = voter_rel[:, :, ys, xs]
        strict = fwd & ~bwd
        # strict_cells[k] -> bool mask over cells: voter k strictly prefers x to y
        self.strict_mask = strict.transpose(1, 0, 2).reshape(n, -1)
        self.unanimous_mask = strict.all(axis=1).reshape(-1)

        self.completeness: list[Clause] = []
        self.transitivity: list[Clause] = []
        for pid in range(self.nprofiles):
            for x, y in unordered_pairs(m):
                self.completeness.append(
                    Clause("completeness", pid, ((self.cell(pid, x, y), True), (self.cell(pid, y, x), True)))
                )
            for x in range(m):
                for y in range(m):
                    for z in range(m):
                        if len({x, y, z}) < 3:
                            continue
                        self.transitivity.append(
                            Clause(
                                "transitivity",
                                pid,
                                (
                                    (self.cell(pid, x, y), False),
                                    (self.cell(pid, y, z), False),
                                    (self.cell(pid, x, z), True),
                                ),
                            )
                        )

        self.units: list[tuple[int, bool]] = []
        if unanimity:
            for c in np.flatnonzero(self.unanimous_mask):
                c = int(c)
                pid, k = divmod(c, self.npairs)
                x, y = self.pairs[k]
                self.units.append((c, True))
                self.units.append((self.cell(pid, y, x), False))

        # IIA classes: profiles grouped by every voter's state on the pair
        pair_states = fwd.astype(np.int8) * 2 + bwd.astype(np.int8)  # (P, n, pairs)
        self.iia_class = np.empty(self.ncells, dtype=np.int64)
        self.iia_members: list[np.ndarray] = []
        for k in range(self.npairs):
            keys = pair_states[:, :, k]
            _, inverse = np.unique(keys, axis=0, return_inverse=True)
            inverse = inverse.reshape(-1)
            base = len(self.iia_members)
            cells = np.arange(self.nprofiles) * self.npairs + k
            order = np.argsort(inverse, kind="stable")
            bounds = np.flatnonzero(np.diff(inverse[order])) + 1
            for grp in np.split(order, bounds):
                self.iia_members.append(cells[grp])
            self.iia_class[cells] = base + inverse
        # np.unique sorts keys, so class ids follow sorted keys; members were split
        # in the same sorted order, keeping class id and member list aligned

        self.nondict: list[Clause] = []
        if non_dict:
            for d in range(n):
                lits = []
                for c in np.flatnonzero(self.strict_mask[d]):
                    c = int(c)
                    pid, k = divmod(c, self.npairs)
                    x, y = self.pairs[k]
                    lits.append((c, False))
                    lits.append((self.cell(pid, y, x), True))
                self.nondict.append(Clause("nondict", -1, tuple(lits), voter=d))

        self.clauses_of: list[list[Clause]] = [[] for _ in range(self.ncells)]
        for cl in self.completeness + self.transitivity:
            for c, _ in cl.lits:
                self.clauses_of[c].append(cl)

    def cell(self, pid: int, x: int, y: int) -> int:
        return pid * self.npairs + self.pair_index[(x, y)]

    def cell_parts(self, c: int) -> tuple[int, int, int]:
        pid, k = divmod(c, self.npairs)
        x, y = self.pairs[k]
        return pid, x, y

    def mirror(self, c: int) -> int:
        pid, x, y = self.cell_parts(c)
        return self.cell(pid, y, x)

    def cell_name(self, c: int) -> str:
        pid, x, y = self.cell_parts(c)
        return f"R[{pid}](s,{alt_name(x)},{alt_name(y)})"

    def iia_links(self):
        """Biconditional links as (cell, cell) pairs, each member to its class head."""
        for members in self.iia_members:
            head = int(members[0])
            for other in members[1:]:
                yield head, int(other)

    def stats(self) -> dict:
        return {
            "voters": self.cfg.n,
            "alternatives": self.cfg.m,
            "profiles": self.nprofiles,
            "cells": self.ncells,
            "completeness": len(self.completeness),
            "transitivity": len(self.transitivity),
            "unanimity_units": len(self.units),
            "iia_classes": len(self.iia_members),
            "iia_links": sum(len(g) - 1 for g in self.iia_members),
            "nondict": len(self.nondict),
            "nondict_lengths": [len(cl.lits) for cl in self.nondict],
        }


def build_constraints(cfg: Config, non_dict: bool = True, unanimity: bool = True) -> Constraints:
    return Constraints(cfg, non_dict=non_dict, unanimity=unanimity)


@dataclass
class CellAssignment:
    states: list[int]
    trail: list[Step] = field(default_factory=list)
    propagated: int = 0  # trail prefix already closed under propagation

    @classmethod
    def empty(cls, ncells: int) -> "CellAssignment":
        return cls([UNKNOWN] * ncells)

    def copy(self) -> "CellAssignment":
        return CellAssignment(list(self.states), list(self.trail), self.propagated)

    def value(self, c: int) -> int:
        return self.states[c]

    def set(self, c: int, value: bool, reason: Reason) -> None:
        if self.states[c] != UNKNOWN:
            raise StateError(f"cell {c} assigned twice")
        self.states[c] = int(value)
        self.trail.append(Step(c, value, reason))

    def decide(self, c: int, value: bool) -> None:
        self.set(c, value, Reason(Rule.DECISION))

    def truncate(self, length: int) -> None:
        """Undo assignments back to a trail length."""
        while len(self.trail) > length:
            st = self.trail.pop()
            self.states[st.cell] = UNKNOWN
        self.propagated = min(self.propagated, length)

    def unknown_count(self) -> int:
        return self.states.count(UNKNOWN)

    def is_complete(self) -> bool:
        return UNKNOWN not in self.states


def seed_unanimity(a: CellAssignment, cons: Constraints) -> None:
    for c, v in cons.units:
        if a.states[c] == UNKNOWN:
            a.set(c, v, Reason(Rule.UNANIMITY))


def initial_assignment(cons: Constraints) -> CellAssignment:
    a = CellAssignment.empty(cons.ncells)
    seed_unanimity(a, cons)
    return a


def _clause_status(cl: Clause, states: list[int]):
    """Return ('sat'|'false'|'unit'|'open', free literal or None)."""
    free = None
    nfree = 0
    for c, v in cl.lits:
        s = states[c]
        if s == UNKNOWN:
            nfree += 1
            free = (c, v)
        elif s == v:
            return "sat", None
    if nfree == 0:
        return "false", None
    if nfree == 1:
        return "unit", free
    return "open", None


_FAMILY_RULE = {"transitivity": Rule.TRANSITIVITY, "completeness": Rule.COMPLETENESS}
_FAMILY_KIND = {"transitivity": ConflictKind.TRANSITIVITY, "completeness": ConflictKind.COMPLETENESS}


def _conflict_key(cl: Clause):
    return (cl.profile, tuple(sorted(c for c, _ in cl.lits)))


def propagate_to_fixpoint(
    a: CellAssignment, cons: Constraints, rng: random.Random | None = None
) -> tuple[CellAssignment, list[Step], Conflict | None]:
    """Close ``a`` under unit consequence, in place.

    Trail entries past ``a.propagated`` are the pending (undigested) ones.
    Returns the assignment, the propagated steps, and a conflict if some
    constraint is falsified.  ``rng`` shuffles the work queue (the fixpoint
    does not depend on it).
    """
    states = a.states
    start = len(a.trail)
    queue: deque[int] = deque()
    falsified: list[Clause] = []

    def diffuse(c: int) -> None:
        v = states[c]
        for d in cons.iia_members[cons.iia_class[c]]:
            d = int(d)
            s = states[d]
            if s == UNKNOWN:
                a.set(d, bool(v), Reason(Rule.IIA, (c,)))
                queue.append(d)
            elif s != v:
                raise StateError("IIA class assigned inconsistently by decisions")

    for st in list(a.trail[a.propagated:]):
        queue.append(st.cell)
        diffuse(st.cell)

    while queue:
        if rng is not None and len(queue) > 1:
            i = rng.randrange(len(queue))
            queue.rotate(-i)
            c = queue.popleft()
            queue.rotate(i)
        else:
            c = queue.popleft()
        clauses = cons.clauses_of[c]
        if rng is not None:
            clauses = list(clauses)
            rng.shuffle(clauses)
        for cl in clauses:
            status, free = _clause_status(cl, states)
            if status == "false":
                falsified.append(cl)
            elif status == "unit":
                fc, fv = free
                ante = tuple(x for x, _ in cl.lits if x != fc)
                a.set(fc, fv, Reason(_FAMILY_RULE[cl.family], ante))
                queue.append(fc)
                diffuse(fc)
        if falsified:
            break

    a.propagated = len(a.trail)
    steps = a.trail[start:]
    if falsified:
        cl = min(falsified, key=_conflict_key)
        return a, steps, Conflict(_FAMILY_KIND[cl.family], cl)
    for cl in cons.nondict:
        if all(states[c] == int(not v) for c, v in cl.lits):
            return a, steps, Conflict(ConflictKind.DICTATORSHIP, cl, voter=cl.voter)
    return a, steps, None


def falsified_constraints(states: list[int], cons: Constraints) -> list[Conflict]:
    """Every falsified constraint instance under ``states`` (slow, for checks)."""
    out = []
    for cl in cons.completeness + cons.transitivity:
        if all(states[c] == int(not v) for c, v in cl.lits):
            out.append(Conflict(_FAMILY_KIND[cl.family], cl))
    for cl in cons.nondict:
        if all(states[c] == int(not v) for c, v in cl.lits):
            out.append(Conflict(ConflictKind.DICTATORSHIP, cl, voter=cl.voter))
    return out


def satisfies_axioms(states, cons: Constraints) -> bool:
    """Complete assignment satisfies completeness, transitivity, unanimity and IIA."""
    s = np.asarray(states)
    if (s == UNKNOWN).any():
        raise StateError("assignment is incomplete")
    if falsified_constraints(list(s), _without_nondict(cons)):
        return False
    for c, v in cons.units:
        if s[c] != int(v):
            return False
    for members in cons.iia_members:
        if len(set(s[members].tolist())) > 1:
            return False
    return True


def _without_nondict(cons: Constraints) -> Constraints:
    if not cons.nondict:
        return cons
    clone = object.__new__(Constraints)
    clone.__dict__.update(cons.__dict__)
    clone.nondict = []
    return clone


def detect_dictators(a, cons: Constraints) -> set[int]:
    """Voters whose every strict preference is reproduced strictly by society."""
    states = np.asarray(a.states if isinstance(a, CellAssignment) else a)
    if (states == UNKNOWN).any():
        raise StateError("detect_dictators needs a complete assignment")
    fwd = states.reshape(cons.nprofiles, cons.npairs)
    mirror_idx = np.array([cons.pair_index[(y, x)] for x, y in cons.pairs])
    social_strict = ((fwd == 1) & (fwd[:, mirror_idx] == 0)).reshape(-1)
    out = set()
    for d in range(cons.cfg.n):
        mask = cons.strict_mask[d]
        if social_strict[mask].all():
            out.add(d)
    return out
