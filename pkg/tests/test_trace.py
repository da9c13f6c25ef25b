import pytest

from arrowlab.core import fingerprint
from arrowlab.trace import (
    DanglingRefError,
    DepthError,
    LineNumberError,
    StructureError,
    TraceError,
    UnknownRuleError,
    emit_trace,
    format_literal,
    parse_literal,
    parse_trace,
)


def header(n=2, m=3):
    return (f"# arrowlab proof trace v1\n# voters {n}\n# alternatives {m}\n"
            f"# fingerprint {fingerprint(m)}\n")


SIX = (
    "1|0|Premises|-|PREM|-\n"
    "2|1|AssumeNonDict|-|NODICT|-\n"
    "3|1|Prop|R[0](s,a,b)=T|SPU|1\n"
    "4|1|Prop|R[0](s,b,a)=F|SPU|1\n"
    "5|1|Conflict|-|CONF-COMP|3,4\n"
    "6|0|Conclude|-|CONCL|2,5\n"
)


def test_roundtrip(trace23):
    text = trace23.render()
    again = parse_trace(text)
    assert again.lines == trace23.lines
    assert again.render() == text
    assert (again.voters, again.alternatives, again.fingerprint) == (2, 3, fingerprint(3))


def test_emit_is_byte_stable(ref23, cons23, trace23):
    assert emit_trace(ref23, cons23).render() == trace23.render()


def test_trace_shape(trace23):
    lines = trace23.lines
    assert lines[0].kind == "Premises" and lines[1].kind == "AssumeNonDict"
    assert lines[-1].kind == "Conclude" and lines[-1].refs == (2, lines[-2].number)
    assert sum(ln.kind == "Case" for ln in lines) == 6
    assert sum(ln.kind == "Conflict" for ln in lines) == 4
    assert len(lines) == 1614


def test_literal_syntax():
    assert parse_literal("R[12](s,a,c)=F") == (12, 0, 2, False)
    assert format_literal((12, 0, 2, False)) == "R[12](s,a,c)=F"
    for bad in ("R[1](s,a,a)=T", "R[1](p,a,b)=T", "R[x](s,a,b)=T", "R[1](s,a,b)=1"):
        assert parse_literal(bad) is None


def test_six_line_trace_parses():
    t = parse_trace(header() + SIX)
    assert [ln.depth for ln in t.lines] == [0, 1, 1, 1, 1, 0]
    assert t.render() == header() + SIX


@pytest.mark.parametrize(
    "old,new,exc,line",
    [
        ("4|1|Prop", "5|1|Prop", LineNumberError, 8),
        ("5|1|Conflict|-|CONF-COMP|3,4", "5|1|Conflict|-|CONF-COMP|3,7", DanglingRefError, 9),
        ("3|1|Prop", "3|2|Prop", DepthError, 7),
        ("SPU|1\n4", "SPX|1\n4", UnknownRuleError, 7),
        ("CONF-COMP|3,4", "CONF-DICT:x|3,4", UnknownRuleError, 9),
        ("3|1|Prop|R[0](s,a,b)=T|SPU", "3|1|Prop|-|SPU", StructureError, 7),
        ("3|1|Prop", "3|1|Lemma", StructureError, 7),
        ("|SPU|1\n4", "|CASE|1\n4", StructureError, 7),
        ("6|0|Conclude|-|CONCL|2,5\n", "", StructureError, 5),
    ],
)
def test_parse_errors(old, new, exc, line):
    text = header() + SIX.replace(old, new, 1)
    with pytest.raises(exc) as info:
        parse_trace(text)
    assert info.value.line == line
    assert info.value.col >= 1


def test_error_column_points_at_field():
    text = header() + SIX.replace("3|1|Prop", "3|2|Prop")
    with pytest.raises(DepthError) as info:
        parse_trace(text)
    assert info.value.col == 3


def test_header_and_line_endings():
    with pytest.raises(StructureError):
        parse_trace(SIX)
    with pytest.raises(StructureError):
        parse_trace(header() + SIX.replace("\n", "\r\n"))
    with pytest.raises(TraceError):
        parse_trace(header())
