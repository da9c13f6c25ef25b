import random
from dataclasses import replace

import pytest

from arrowlab.checker import check_text, check_trace
from arrowlab.mutate import MUTATION_CLASSES, mutants, mutate
from arrowlab.trace import ProofTrace, TraceLine

from test_trace import SIX, header


def test_generated_traces_validate(trace23, trace33):
    for t in (trace23, trace33):
        v = check_trace(t)
        assert v.valid, v.status
        assert v.stats["CONCL"] == 1 and v.stats["CASE"] == sum(ln.kind == "Case" for ln in t.lines)


def test_text_and_object_paths_agree(trace23):
    assert check_text(trace23.render()).valid


def test_hundred_mutants_rejected_two_voters(trace23):
    accepted = [desc for mt, desc in mutants(trace23, 100, seed=11) if check_text(mt.render()).valid]
    assert accepted == []


@pytest.mark.parametrize("kind", MUTATION_CLASSES)
def test_each_mutation_class_is_rejected(trace23, kind):
    rng = random.Random(kind)
    for _ in range(10):
        mt, desc = mutate(trace23, rng, kind)
        v = check_trace(mt)
        assert not v.valid, desc
        assert v.line is not None


def renumbered(t: ProofTrace, drop: set[int]) -> ProofTrace:
    """Delete lines and shift later numbers/refs down (refs into the gap vanish)."""
    new_no = {}
    for ln in t.lines:
        if ln.number not in drop:
            new_no[ln.number] = len(new_no) + 1
    lines = [
        replace(ln, number=new_no[ln.number], refs=tuple(new_no[r] for r in ln.refs if r in new_no))
        for ln in t.lines
        if ln.number not in drop
    ]
    return ProofTrace(t.voters, t.alternatives, t.fingerprint, lines)


def test_missing_case_is_rejected(trace23):
    # drop the last case subtree (its Case line through its Discharge)
    cases = [ln.number for ln in trace23.lines if ln.kind == "Case"]
    start = cases[-1]
    end = next(ln.number for ln in trace23.lines[start:] if ln.kind == "Discharge" and ln.refs[0] == start)
    v = check_trace(renumbered(trace23, set(range(start, end + 1))))
    assert not v.valid
    assert "coverage" in v.violation or "cites both" in v.violation


def test_leaked_literal_is_rejected(trace23):
    """A literal from a discharged sibling may not be cited later."""
    lines = trace23.lines
    first_case = next(ln for ln in lines if ln.kind == "Case")
    disch = next(ln for ln in lines if ln.kind == "Discharge" and ln.refs[0] == first_case.number)
    inside = [ln for ln in lines[first_case.number:disch.number] if ln.kind == "Prop" and ln.rule == "SPT"]
    target = next(ln for ln in lines[disch.number:] if ln.kind == "Prop" and ln.rule == "IIA")
    leak = inside[0]
    bad = list(lines)
    bad[target.number - 1] = replace(target, refs=(leak.number,))
    v = check_trace(ProofTrace(trace23.voters, trace23.alternatives, trace23.fingerprint, bad))
    assert not v.valid and v.line == target.number
    assert "not visible" in v.violation


def test_fingerprint_and_header_mismatch(trace23):
    v = check_trace(replace(trace23, fingerprint="0" * 64))
    assert not v.valid and "fingerprint" in v.violation
    v = check_trace(replace(trace23, voters=3))
    assert not v.valid


def test_six_line_trace_is_semantically_rejected():
    v = check_text(header() + SIX)
    # profile 0 is unanimous on (a, b) but no constraint is falsified by a
    # consistent pair of literals
    assert not v.valid and v.line == 5


def test_garbage_text_is_invalid():
    v = check_text("hello\n")
    assert not v.valid and v.violation.startswith("parse:")


def test_out_of_order_numbers_rejected(trace23):
    lines = list(trace23.lines)
    lines[5] = replace(lines[5], number=99)
    v = check_trace(ProofTrace(2, 3, trace23.fingerprint, lines))
    assert not v.valid and v.line == 99


def test_extra_line_after_conclude(trace23):
    extra = TraceLine(len(trace23.lines) + 1, 0, "Premises", None, "PREM")
    v = check_trace(replace(trace23, lines=trace23.lines + [extra]))
    assert not v.valid
