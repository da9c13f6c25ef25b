"""Independent replay of ``.apf`` traces.

Nothing here uses the propagation engine or its constraint tables.  The
checker rebuilds what it needs from the Config through the core model
(voter orders per profile) and evaluates each cited constraint instance
directly.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import (
    Config,
    ParameterError,
    enumerate_weak_orders,
    fingerprint,
    order_tensor,
    profile_count,
    profile_orders,
    profile_table,
    strict_prefers,
)
from .trace import ProofTrace, TraceLine, parse_trace

Cell = tuple[int, int, int]
_uids = itertools.count(1)


@dataclass
class Verdict:
    valid: bool
    line: int | None = None
    violation: str = ""
    stats: Counter = field(default_factory=Counter)

    @property
    def status(self) -> str:
        return "Valid" if self.valid else f"Invalid({self.line}, {self.violation})"

    def stats_json(self) -> dict:
        return {"status": "Valid" if self.valid else "Invalid", "line": self.line,
                "violation": self.violation or None, "checked": dict(sorted(self.stats.items()))}


class _Reject(Exception):
    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg


@dataclass
class _Scope:
    depth: int
    opener: int  # line number of the Case / AssumeNonDict line
    case_lit: tuple | None
    cells: list[Cell] = field(default_factory=list)
    bottom: int | None = None
    discharged: list[tuple[Cell, bool, int]] = field(default_factory=list)
    closed_pair: bool = False
    firsts: list[tuple] = field(default_factory=list)
    uid: int = field(default_factory=lambda: next(_uids))


class _World:
    """Voter preferences for one society, tabulated per ordered pair."""

    def __init__(self, cfg: Config):
        self.cfg = cfg
        self.orders = enumerate_weak_orders(cfg.m, override=True)
        self.nprofiles = profile_count(cfg)
        m, n = cfg.m, cfg.n
        rel = order_tensor(m)
        table = profile_table(n, m)
        weights = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self._key: dict[tuple[int, int], list[int]] = {}
        self._unan: dict[tuple[int, int], list[bool]] = {}
        for x in range(m):
            for y in range(m):
                if x == y:
                    continue
                code = 2 * rel[:, x, y].astype(np.int64) + rel[:, y, x]
                # voters' joint state on {x, y}: equal ids = agreeing profiles
                self._key[(x, y)] = (code[table] @ weights).tolist()
                self._unan[(x, y)] = (code[table] == 2).all(axis=1).tolist()

    @lru_cache(maxsize=None)
    def voters(self, pid: int):
        return tuple(self.orders[o] for o in profile_orders(pid, self.cfg))

    def unanimous(self, pid: int, x: int, y: int) -> bool:
        return self._unan[(x, y)][pid]

    def pair_key(self, pid: int, x: int, y: int) -> tuple:
        return (x, y, self._key[(x, y)][pid])

    def agree(self, p1: int, p2: int, x: int, y: int) -> bool:
        k = self._key[(x, y)]
        return k[p1] == k[p2]

    @lru_cache(maxsize=None)
    def dictator_witness(self, k: int) -> frozenset:
        """Literals that together say voter k's strict preferences all prevail."""
        out = set()
        m = self.cfg.m
        for pid in range(self.nprofiles):
            o = self.voters(pid)[k]
            for x in range(m):
                for y in range(m):
                    if x != y and strict_prefers(o, x, y):
                        out.add((pid, x, y, True))
                        out.add((pid, y, x, False))
        return frozenset(out)


@lru_cache(maxsize=8)
def _world(n: int, m: int) -> _World:
    return _World(Config(n, m, override_guard=True))


def _transitivity_clauses(m: int):
    # ~R(x,y) | ~R(y,z) | R(x,z) as literal triples ((x,y),sat_value) ...
    for x, y, z in itertools.permutations(range(m), 3):
        yield (((x, y), False), ((y, z), False), ((x, z), True))


def check_trace(t: ProofTrace) -> Verdict:
    stats: Counter = Counter()
    try:
        cfg = Config(t.voters, t.alternatives, override_guard=True)
    except ParameterError as exc:
        return Verdict(False, 0, f"bad header: {exc}", stats)
    if t.fingerprint != fingerprint(cfg.m):
        return Verdict(False, 0, "fingerprint does not match this build's order enumeration", stats)
    world = _world(cfg.n, cfg.m)
    m = cfg.m
    lines = t.lines
    by_number = [None] + list(lines)  # numbering is contiguous after parsing
    scopes: list[_Scope] = []
    line_scope: dict[int, int] = {}  # line -> uid of the scope that owns it
    open_ids: set[int] = set()
    known: dict[Cell, tuple[bool, int]] = {}
    # first visible literal line per IIA class; IIA lines must cite it
    class_first: dict[tuple, int] = {}
    premises_line = nodict_line = None
    concluded = False

    def visible(r: int) -> TraceLine:
        owner = line_scope.get(r)
        if owner is None or owner not in open_ids:
            raise _Reject(f"ref {r} is not visible here")
        return by_number[r]

    def lit_of(r: int) -> tuple:
        ln = visible(r)
        if ln.kind not in ("Case", "Prop"):
            raise _Reject(f"ref {r} is a {ln.kind} line, not a literal")
        return ln.literal

    def check_cell(pid, x, y):
        if not 0 <= pid < world.nprofiles or x >= m or y >= m:
            raise _Reject(f"literal R[{pid}](s,{x},{y}) is out of range")

    def assign(ln: TraceLine, scope: _Scope):
        pid, x, y, v = ln.literal
        check_cell(pid, x, y)
        cell = (pid, x, y)
        if cell in known:
            raise _Reject(f"cell already assigned at line {known[cell][1]}")
        known[cell] = (v, ln.number)
        scope.cells.append(cell)
        key = world.pair_key(pid, x, y)
        if key not in class_first:
            class_first[key] = ln.number
            scope.firsts.append(key)

    def own(ln: TraceLine, scope: _Scope | None):
        line_scope[ln.number] = scope.uid if scope is not None else 0

    open_ids.add(0)  # the premises level, never closed before Conclude

    def spt_ok(derived, cited) -> bool:
        pid = derived[0]
        if any(c[0] != pid for c in cited):
            return False
        for clause in _transitivity_clauses(m):
            for i, (pair, sat) in enumerate(clause):
                if (derived[1], derived[2]) != pair or derived[3] != sat:
                    continue
                rest = {(pid, *p, not s) for j, (p, s) in enumerate(clause) if j != i}
                if rest == set(cited):
                    return True
        return False

    def falsifies_transitivity(cited) -> bool:
        pid = cited[0][0]
        if any(c[0] != pid for c in cited):
            return False
        for clause in _transitivity_clauses(m):
            if {(pid, *p, not s) for p, s in clause} == set(cited):
                return True
        return False

    for ln in lines:
        try:
            scope = scopes[-1] if scopes else None
            if concluded:
                raise _Reject("lines after Conclude")
            if by_number[ln.number if 0 < ln.number < len(by_number) else 0] is not ln:
                raise _Reject("lines are not numbered consecutively from 1")
            if scope is not None and scope.bottom is not None and ln.kind not in ("Discharge", "Conclude"):
                raise _Reject("scope already closed by a contradiction")
            kind = ln.kind
            if kind == "Premises":
                if premises_line is not None or ln.number != 1:
                    raise _Reject("premises may only open the trace")
                premises_line = ln.number
                own(ln, None)
            elif kind == "AssumeNonDict":
                if nodict_line is not None or premises_line is None or scopes:
                    raise _Reject("non-dictatorship is assumed once, right under the premises")
                nodict_line = ln.number
                new = _Scope(ln.depth, ln.number, None)
                scopes.append(new)
                open_ids.add(new.uid)
                own(ln, new)
            elif kind == "Case":
                if scope is None:
                    raise _Reject("case outside the non-dictatorship scope")
                new = _Scope(ln.depth, ln.number, ln.literal)
                scopes.append(new)
                open_ids.add(new.uid)
                own(ln, new)
                assign(ln, new)
            elif kind == "Prop":
                if scope is None:
                    raise _Reject("derivation outside the non-dictatorship scope")
                pid, x, y, v = ln.literal
                check_cell(pid, x, y)
                rule = ln.rule
                if rule == "SPU":
                    if ln.refs != (premises_line,):
                        raise _Reject("unanimity cites exactly the premises line")
                    ok = (v and world.unanimous(pid, x, y)) or (not v and world.unanimous(pid, y, x))
                    if not ok:
                        raise _Reject("not a unanimity consequence")
                elif rule == "IIA":
                    if len(ln.refs) != 1:
                        raise _Reject("IIA cites exactly one literal")
                    spid, sx, sy, sv = lit_of(ln.refs[0])
                    if (sx, sy, sv) != (x, y, v) or spid == pid or not world.agree(spid, pid, x, y):
                        raise _Reject("not an IIA consequence of the cited literal")
                    if class_first.get(world.pair_key(pid, x, y)) != ln.refs[0]:
                        raise _Reject("IIA must cite the first literal established for its class")
                elif rule == "COMP":
                    if len(ln.refs) != 1:
                        raise _Reject("completeness cites exactly one literal")
                    if lit_of(ln.refs[0]) != (pid, y, x, False) or not v:
                        raise _Reject("not a completeness consequence of the cited literal")
                elif rule == "SPT":
                    if len(ln.refs) != 2 or ln.refs[0] == ln.refs[1]:
                        raise _Reject("transitivity cites exactly two literals")
                    cited = [lit_of(r) for r in ln.refs]
                    if not spt_ok(ln.literal, cited):
                        raise _Reject("not a transitivity consequence of the cited literals")
                for r in ln.refs:
                    if r != premises_line:
                        c = by_number[r].literal
                        if known.get(c[:3]) != (c[3], r):
                            raise _Reject(f"ref {r} no longer holds")
                own(ln, scope)
                assign(ln, scope)
            elif kind == "Conflict":
                if scope is None:
                    raise _Reject("conflict outside any scope")
                cited = [lit_of(r) for r in ln.refs]
                if len(set(ln.refs)) != len(ln.refs):
                    raise _Reject("duplicate refs")
                for r, c in zip(ln.refs, cited):
                    if known.get(c[:3]) != (c[3], r):
                        raise _Reject(f"ref {r} no longer holds")
                if ln.rule == "CONF-TRANS":
                    if len(cited) != 3 or not falsifies_transitivity(cited):
                        raise _Reject("cited literals do not falsify a transitivity instance")
                elif ln.rule == "CONF-COMP":
                    if len(cited) != 2:
                        raise _Reject("completeness conflict cites two literals")
                    (p1, x1, y1, v1), (p2, x2, y2, v2) = cited
                    if not (p1 == p2 and (x1, y1) == (y2, x2) and not v1 and not v2):
                        raise _Reject("cited literals do not falsify a completeness instance")
                else:
                    k = int(ln.rule.split(":", 1)[1])
                    if k >= cfg.n:
                        raise _Reject(f"no voter {k}")
                    if nodict_line is None:
                        raise _Reject("dictatorship conflict without the non-dictatorship assumption")
                    if set(cited) != world.dictator_witness(k):
                        raise _Reject(f"cited literals do not establish voter {k} as dictator")
                own(ln, scope)
                scope.bottom = ln.number
            elif kind == "Discharge":
                if scope is None or scope.case_lit is None:
                    raise _Reject("nothing to discharge")
                if scope.bottom is None:
                    raise _Reject("case discharged before reaching a contradiction")
                if ln.literal != scope.case_lit:
                    raise _Reject("discharged literal differs from the case assumption")
                if ln.refs != (scope.opener, scope.bottom):
                    raise _Reject("discharge cites the case line and its contradiction")
                if ln.depth != scope.depth - 1:
                    raise _Reject("discharge at the wrong depth")
                scopes.pop()
                open_ids.discard(scope.uid)
                for c in scope.cells:
                    del known[c]
                for key in scope.firsts:
                    del class_first[key]
                parent = scopes[-1] if scopes else None
                if parent is None:
                    raise _Reject("discharge escaped the non-dictatorship scope")
                if parent.closed_pair:
                    raise _Reject("a second split in a scope already closed")
                cell = scope.case_lit[:3]
                if parent.discharged and (parent.discharged[0][0] != cell or len(parent.discharged) > 1):
                    raise _Reject("sibling cases split different cells")
                parent.discharged.append((cell, scope.case_lit[3], ln.number))
                own(ln, parent)
            elif kind == "CaseClose":
                if scope is None or len(scope.discharged) != 2:
                    raise _Reject("case coverage is incomplete")
                (c1, v1, l1), (c2, v2, l2) = scope.discharged
                if c1 != c2 or {v1, v2} != {True, False}:
                    raise _Reject("case coverage is incomplete")
                if ln.refs != (l1, l2):
                    raise _Reject("case close cites both discharged cases")
                scope.closed_pair = True
                own(ln, scope)
                scope.bottom = ln.number
            elif kind == "Conclude":
                if scope is None or scope.opener != nodict_line or len(scopes) != 1:
                    raise _Reject("conclusion with cases still open")
                if scope.bottom is None:
                    raise _Reject("case coverage is incomplete")
                if ln.refs != (nodict_line, scope.bottom):
                    raise _Reject("conclusion cites the assumption and its contradiction")
                scopes.pop()
                concluded = True
            stats[ln.rule.split(":", 1)[0]] += 1
        except _Reject as exc:
            return Verdict(False, ln.number, exc.msg, stats)
    if not concluded:
        return Verdict(False, lines[-1].number if lines else 0, "trace does not conclude", stats)
    return Verdict(True, None, "", stats)


def check_text(text: str) -> Verdict:
    """Parse then check; parse errors become Invalid verdicts."""
    from .trace import TraceError

    try:
        t = parse_trace(text)
    except TraceError as exc:
        return Verdict(False, exc.line, f"parse: {exc.msg}")
    return check_trace(t)
