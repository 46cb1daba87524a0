import warnings

import pytest

from cacs.constraints import cumulative
from cacs.generate import XML_KINDS, random_problem
from cacs.model import make_problem
from cacs.xmlio import (
    DcsdpError,
    DcsdpWarning,
    UnsupportedSerializationError,
    dtd_text,
    parse_dcsdp,
    read_dcsdp,
    write_dcsdp,
)

from conftest import FIXTURES


def test_trace_fixture_matches_builder(trace_example):
    p, _ = trace_example
    assert read_dcsdp(FIXTURES / "example3.xml") == p


def test_writer_is_canonical(trace_example):
    p, _ = trace_example
    assert write_dcsdp(p) == (FIXTURES / "example3.xml").read_text()


def test_legacy_caagent_spelling_warns(builder_example):
    p, _ = builder_example
    with pytest.warns(DcsdpWarning, match="caagent"):
        parsed = read_dcsdp(FIXTURES / "example5_listing.xml")
    assert parsed == p


def test_round_trip_is_stable():
    for seed in range(100):
        text = write_dcsdp(random_problem(seed, kinds=XML_KINDS))
        assert write_dcsdp(parse_dcsdp(text)) == text


def test_malformed_fixture_reports_line():
    with pytest.raises(DcsdpError) as info:
        read_dcsdp(FIXTURES / "malformed.xml")
    assert info.value.line == 7
    assert "line 7" in str(info.value)


DOC = """<dcsdp><name>t</name>
<vagent><name>a</name><var><name>x</name><inf>0</inf><sup>{sup}</sup></var></vagent>
<cagent><name>c</name><constraint>{body}</constraint></cagent>
</dcsdp>"""
NE = "<notequal><vid><name>x</name><owner>a</owner></vid><vid><name>{n}</name><owner>{o}</owner></vid></notequal>"


@pytest.mark.parametrize(
    "text, fragment",
    [
        (DOC.format(sup=-1, body=NE.format(n="x", o="a")), "invalid range"),
        (DOC.format(sup=2, body=NE.format(n="y", o="a")), "dangling vid name"),
        (DOC.format(sup=2, body=NE.format(n="x", o="b")), "dangling vid owner"),
        (DOC.format(sup=2, body="<bogus/>"), "unknown constraint element"),
        (DOC.format(sup="two", body=NE.format(n="x", o="a")), "integer"),
        ("<other/>", "root element"),
        ('<!DOCTYPE d [<!ENTITY e "x">]><dcsdp/>', "entity"),
    ],
    ids=["bad-range", "unknown-name", "unknown-owner", "unknown-element", "non-integer",
         "wrong-root", "entity-declaration"],
)
def test_parse_errors(text, fragment):
    with pytest.raises(DcsdpError, match=fragment):
        parse_dcsdp(text)


def test_cumulative_has_no_xml_form():
    p = make_problem("c")
    a = p.make_vagent("a")
    s = p.make_bounded_int_var(a, "s", 0, 3)
    e = p.make_bounded_int_var(a, "e", 0, 3)
    p.post(p.make_cagent("c"), cumulative([s], [e], [1], 1))
    with pytest.raises(UnsupportedSerializationError):
        write_dcsdp(p.seal())


def test_dtd_names_every_constraint_element():
    dtd = dtd_text()
    for tag in ("notequal", "alldiff", "lessorequal", "greaterorequal", "linearless", "aritheq"):
        assert f"<!ELEMENT {tag}" in dtd
