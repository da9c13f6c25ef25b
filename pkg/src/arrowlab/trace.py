"""The ``.apf`` proof-trace language.

Header lines start with ``#``; every other line is::

    N|D|KIND|BODY|RULE|REFS

``BODY`` is ``-`` or a literal ``R[pid](s,x,y)=T`` / ``=F``; ``REFS`` is a
comma-separated list of earlier line numbers or ``-``.  Depth bookkeeping:
``AssumeNonDict`` and ``Case`` lines sit one level deeper than the line
before them (they open a scope), ``Discharge`` and ``Conclude`` one level
shallower (they close one), every other line keeps the previous depth.
``CaseClose`` is the bottom obtained from the two discharged sibling cases
and sits at the depth of those discharges.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .axioms import Conflict, ConflictKind, Constraints, Rule, build_constraints
from .core import Config, alt_index, alt_name
from .search import Branch, Refutation

FORMAT_TAG = "arrowlab proof trace v1"

KINDS = ("Premises", "AssumeNonDict", "Case", "Prop", "Conflict", "Discharge", "CaseClose", "Conclude")
PROP_RULES = ("SPU", "SPT", "IIA", "COMP")
PLAIN_RULES = ("PREM", "NODICT", "CASE", *PROP_RULES, "CONF-TRANS", "CONF-COMP", "DISCH", "CONCL")

KIND_RULES = {
    "Premises": ("PREM",),
    "AssumeNonDict": ("NODICT",),
    "Case": ("CASE",),
    "Prop": PROP_RULES,
    "Conflict": ("CONF-TRANS", "CONF-COMP", "CONF-DICT"),
    "Discharge": ("DISCH",),
    "CaseClose": ("DISCH",),
    "Conclude": ("CONCL",),
}
DEPTH_STEP = {"AssumeNonDict": 1, "Case": 1, "Discharge": -1, "Conclude": -1}

_RULE_TAG = {
    Rule.UNANIMITY: "SPU",
    Rule.TRANSITIVITY: "SPT",
    Rule.IIA: "IIA",
    Rule.COMPLETENESS: "COMP",
}
_LIT_RE = re.compile(r"R\[(\d+)\]\(s,([a-h]),([a-h])\)=([TF])\Z")

Literal = tuple[int, int, int, bool]  # (pid, x, y, value)


class TraceError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line} col {col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


class LineNumberError(TraceError):
    pass


class DanglingRefError(TraceError):
    pass


class DepthError(TraceError):
    pass


class UnknownRuleError(TraceError):
    pass


class StructureError(TraceError):
    pass


@dataclass(frozen=True)
class TraceLine:
    number: int
    depth: int
    kind: str
    literal: Literal | None
    rule: str
    refs: tuple[int, ...] = ()

    def render(self) -> str:
        body = "-" if self.literal is None else format_literal(self.literal)
        refs = ",".join(map(str, self.refs)) if self.refs else "-"
        return f"{self.number}|{self.depth}|{self.kind}|{body}|{self.rule}|{refs}"


@dataclass
class ProofTrace:
    voters: int
    alternatives: int
    fingerprint: str
    lines: list[TraceLine] = field(default_factory=list)

    def render(self) -> str:
        head = [
            f"# {FORMAT_TAG}",
            f"# voters {self.voters}",
            f"# alternatives {self.alternatives}",
            f"# fingerprint {self.fingerprint}",
        ]
        return "\n".join(head + [ln.render() for ln in self.lines]) + "\n"


def format_literal(lit: Literal) -> str:
    pid, x, y, v = lit
    return f"R[{pid}](s,{alt_name(x)},{alt_name(y)})={'T' if v else 'F'}"


@lru_cache(maxsize=1 << 16)
def parse_literal(text: str) -> Literal | None:
    m = _LIT_RE.match(text)
    if not m:
        return None
    x, y = alt_index(m.group(2)), alt_index(m.group(3))
    if x == y:
        return None
    return (int(m.group(1)), x, y, m.group(4) == "T")


def conflict_tag(conflict: Conflict) -> str:
    if conflict.kind is ConflictKind.TRANSITIVITY:
        return "CONF-TRANS"
    if conflict.kind is ConflictKind.COMPLETENESS:
        return "CONF-COMP"
    return f"CONF-DICT:{conflict.voter}"


def emit_trace(ref: Refutation, cons: Constraints | None = None) -> ProofTrace:
    cfg = ref.cfg
    if cons is None:
        cons = build_constraints(cfg, non_dict=True, unanimity=ref.unanimity)
    trace = ProofTrace(cfg.n, cfg.m, ref.fingerprint)
    lines = trace.lines
    where: dict[int, int] = {}  # cell -> line asserting it, current scope chain only

    def lit(c: int, v: bool) -> Literal:
        pid, x, y = cons.cell_parts(c)
        return (pid, x, y, bool(v))

    def add(depth, kind, literal, rule, refs=()) -> int:
        lines.append(TraceLine(len(lines) + 1, depth, kind, literal, rule, tuple(refs)))
        return len(lines)

    def emit_steps(steps, depth, added: list[int]) -> None:
        for st in steps:
            rule = st.reason.rule
            if rule is Rule.UNANIMITY:
                refs = (premises,)
            else:
                refs = tuple(where[c] for c in st.reason.antecedents)
            where[st.cell] = add(depth, "Prop", lit(st.cell, st.value), _RULE_TAG[rule], refs)
            added.append(st.cell)

    def emit_split(children: list[Branch], depth: int) -> int:
        discharges = []
        for ch in children:
            d = depth + 1
            case_line = add(d, "Case", lit(ch.cell, ch.value), "CASE")
            where[ch.cell] = case_line
            added = [ch.cell]
            emit_steps(ch.steps, d, added)
            if ch.conflict is not None:
                refs = [where[c] for c, _ in ch.conflict.witness.lits]
                bottom = add(d, "Conflict", None, conflict_tag(ch.conflict), refs)
            elif ch.children:
                bottom = emit_split(ch.children, d)
            else:
                raise StructureError(len(lines), 1, "refutation has an open leaf")
            for c in added:
                del where[c]
            discharges.append(add(depth, "Discharge", lit(ch.cell, ch.value), "DISCH", (case_line, bottom)))
        if len(discharges) == 2:
            return add(depth, "CaseClose", None, "DISCH", discharges)
        return discharges[-1]

    premises = add(0, "Premises", None, "PREM")
    nodict = add(1, "AssumeNonDict", None, "NODICT")
    root = ref.root
    emit_steps(root.steps, 1, [])
    if root.conflict is not None:
        refs = [where[c] for c, _ in root.conflict.witness.lits]
        bottom = add(1, "Conflict", None, conflict_tag(root.conflict), refs)
    elif root.children:
        bottom = emit_split(root.children, 1)
    else:
        raise StructureError(len(lines), 1, "refutation has an open leaf")
    add(0, "Conclude", None, "CONCL", (nodict, bottom))
    return trace


def _col(raw: str, field_no: int) -> int:
    """1-based column where field ``field_no`` starts."""
    col = 1
    for _ in range(field_no):
        col = raw.index("|", col - 1) + 2
    return col


class _LineError(Exception):
    def __init__(self, cls, field_no: int, msg: str):
        self.cls, self.field_no, self.msg = cls, field_no, msg


@lru_cache(maxsize=1 << 18)
def _parse_line(raw: str) -> TraceLine:
    """Context-free parse of one body line (memoized; traces repeat lines)."""
    fields = raw.split("|")
    if len(fields) != 6:
        raise _LineError(StructureError, 0, f"expected 6 fields, got {len(fields)}")
    num_s, depth_s, kind, body, rule, refs_s = fields
    if not num_s.isdigit():
        raise _LineError(LineNumberError, 0, f"bad line number {num_s!r}")
    number = int(num_s)
    if not depth_s.isdigit():
        raise _LineError(DepthError, 1, f"bad depth {depth_s!r}")
    if kind not in KINDS:
        raise _LineError(StructureError, 2, f"unknown line kind {kind!r}")
    if rule.startswith("CONF-DICT:"):
        base_rule = "CONF-DICT"
        if not rule[10:].isdigit():
            raise _LineError(UnknownRuleError, 4, f"unknown rule tag {rule!r}")
    elif rule in PLAIN_RULES:
        base_rule = rule
    else:
        raise _LineError(UnknownRuleError, 4, f"unknown rule tag {rule!r}")
    if base_rule not in KIND_RULES[kind]:
        raise _LineError(StructureError, 4, f"rule {rule} does not fit a {kind} line")
    if body == "-":
        literal = None
    else:
        literal = parse_literal(body)
        if literal is None:
            raise _LineError(StructureError, 3, f"bad literal {body!r}")
    needs_lit = kind in ("Case", "Prop", "Discharge")
    if needs_lit != (literal is not None):
        raise _LineError(StructureError, 3, f"{kind} line {'needs' if needs_lit else 'takes no'} literal")
    if refs_s == "-":
        refs: tuple[int, ...] = ()
    else:
        items = refs_s.split(",")
        if not all(x.isdigit() for x in items):
            raise _LineError(StructureError, 5, f"bad refs {refs_s!r}")
        refs = tuple(map(int, items))
        for r in refs:
            if r < 1 or r >= number:
                raise _LineError(DanglingRefError, 5, f"ref {r} does not point to an earlier line")
    return TraceLine(number, int(depth_s), kind, literal, rule, refs)


def parse_trace(text: str) -> ProofTrace:
    header: dict[str, str] = {}
    lines: list[TraceLine] = []
    prev_depth = 0
    for lineno, raw in enumerate(text.split("\n"), 1):
        if raw.endswith("\r"):
            raise StructureError(lineno, len(raw), "CR line ending")
        if not raw:
            continue
        if raw.startswith("#"):
            if lines:
                raise StructureError(lineno, 1, "header line after body")
            parts = raw[1:].strip().split(None, 1)
            if parts:
                header[parts[0]] = parts[1] if len(parts) > 1 else ""
            continue
        try:
            ln = _parse_line(raw)
        except _LineError as exc:
            raise exc.cls(lineno, _col(raw, exc.field_no), exc.msg) from None
        if ln.number != len(lines) + 1:
            raise LineNumberError(lineno, 1, f"expected line number {len(lines) + 1}, got {ln.number}")
        if ln.number == 1:
            if ln.kind != "Premises" or ln.depth != 0:
                raise StructureError(lineno, _col(raw, 2), "line 1 must be Premises at depth 0")
        else:
            want = prev_depth + DEPTH_STEP.get(ln.kind, 0)
            if want < 0:
                raise DepthError(lineno, _col(raw, 1), "depth underflow")
            if ln.depth != want:
                raise DepthError(lineno, _col(raw, 1), f"{ln.kind} line should be at depth {want}, found {ln.depth}")
        prev_depth = ln.depth
        lines.append(ln)

    try:
        voters = int(header["voters"])
        alternatives = int(header["alternatives"])
        fp = header["fingerprint"].strip()
    except (KeyError, ValueError):
        raise StructureError(1, 1, "header must give voters, alternatives and fingerprint") from None
    if not lines:
        raise StructureError(1, 1, "empty trace")
    last = lines[-1]
    if last.kind != "Conclude":
        raise StructureError(last.number, 1, "final line must be Conclude")
    if last.depth != 0:
        raise DepthError(last.number, 1, "trace must end at depth 0")
    return ProofTrace(voters, alternatives, fp, lines)
