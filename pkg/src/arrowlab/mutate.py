"""Single-field trace mutations for exercising the checker."""
from __future__ import annotations

import random
from dataclasses import replace

from .trace import KIND_RULES, PLAIN_RULES, ProofTrace, TraceLine

MUTATION_CLASSES = ("literal_flip", "ref_swap", "rule_swap", "delete_discharge")


def _flip(t: ProofTrace, rng: random.Random) -> tuple[ProofTrace, str]:
    idx = rng.choice([i for i, ln in enumerate(t.lines) if ln.literal is not None])
    ln = t.lines[idx]
    pid, x, y, v = ln.literal
    lines = list(t.lines)
    lines[idx] = replace(ln, literal=(pid, x, y, not v))
    return ProofTrace(t.voters, t.alternatives, t.fingerprint, lines), f"literal_flip@{ln.number}"


def _ref_swap(t: ProofTrace, rng: random.Random) -> tuple[ProofTrace, str]:
    by_depth: dict[int, list[int]] = {}
    for ln in t.lines:
        by_depth.setdefault(ln.depth, []).append(ln.number)
    for _ in range(1000):
        ln = rng.choice([x for x in t.lines if x.refs])
        j = rng.randrange(len(ln.refs))
        old = ln.refs[j]
        pool = [n for n in by_depth[t.lines[old - 1].depth] if n < ln.number and n != old]
        if not pool:
            continue
        new = rng.choice(pool)
        refs = list(ln.refs)
        refs[j] = new
        lines = list(t.lines)
        lines[ln.number - 1] = replace(ln, refs=tuple(refs))
        return ProofTrace(t.voters, t.alternatives, t.fingerprint, lines), f"ref_swap@{ln.number}:{old}->{new}"
    raise ValueError("no swappable reference")


def _rule_swap(t: ProofTrace, rng: random.Random) -> tuple[ProofTrace, str]:
    ln = rng.choice(t.lines)
    family = KIND_RULES[ln.kind]
    pool = [r for r in family if r != ln.rule.split(":")[0]]
    if ln.rule.startswith("CONF-DICT:"):
        k = int(ln.rule.split(":")[1])
        pool += [f"CONF-DICT:{j}" for j in range(t.voters) if j != k]
    pool = [r if r != "CONF-DICT" else f"CONF-DICT:{rng.randrange(t.voters)}" for r in pool]
    if not pool:
        pool = [r for r in PLAIN_RULES if r != ln.rule]
    new = rng.choice(pool)
    lines = list(t.lines)
    lines[ln.number - 1] = replace(ln, rule=new)
    return ProofTrace(t.voters, t.alternatives, t.fingerprint, lines), f"rule_swap@{ln.number}:{ln.rule}->{new}"


def _delete_discharge(t: ProofTrace, rng: random.Random) -> tuple[ProofTrace, str]:
    """Drop a Discharge line and renumber everything after it consistently."""
    gone = rng.choice([ln.number for ln in t.lines if ln.kind == "Discharge"])

    def renum(n: int) -> int:
        return n - 1 if n > gone else n

    lines: list[TraceLine] = []
    for ln in t.lines:
        if ln.number == gone:
            continue
        refs = tuple(renum(r) for r in ln.refs if r != gone)
        lines.append(replace(ln, number=renum(ln.number), refs=refs))
    return ProofTrace(t.voters, t.alternatives, t.fingerprint, lines), f"delete_discharge@{gone}"


_MUTATORS = {
    "literal_flip": _flip,
    "ref_swap": _ref_swap,
    "rule_swap": _rule_swap,
    "delete_discharge": _delete_discharge,
}


def mutate(t: ProofTrace, rng: random.Random, kind: str | None = None) -> tuple[ProofTrace, str]:
    kind = kind or rng.choice(MUTATION_CLASSES)
    return _MUTATORS[kind](t, rng)


def mutants(t: ProofTrace, count: int, seed: int = 0):
    """``count`` mutants cycling through every mutation class."""
    rng = random.Random(seed)
    for i in range(count):
        yield mutate(t, rng, MUTATION_CLASSES[i % len(MUTATION_CLASSES)])
