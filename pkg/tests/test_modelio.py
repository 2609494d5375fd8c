"""JSON round-trips, UPPAAL subset import, DOT export."""

import json
from pathlib import Path

import pytest

from tadet.corpus import NAMED_MODELS, coffee_machine
from tadet.determinize import determinize_guard_oriented
from tadet.modelio import (
    ParseError,
    UnsupportedXmlError,
    export_dot,
    import_uppaal_xml,
    parse_model,
    serialize_model,
)
from tadet.silent import remove_all_silent
from tadet.unfold import rename_clocks, unfold

MODELS_DIR = Path(__file__).resolve().parent.parent / "models"


@pytest.mark.parametrize("name", sorted(NAMED_MODELS))
def test_serialize_parse_round_trip(name):
    a = NAMED_MODELS[name]()
    text = serialize_model(a)
    b = parse_model(text)
    assert serialize_model(b) == text
    assert b.locations == a.locations
    assert b.accepting == a.accepting
    assert b.initial == a.initial
    assert len(b.transitions) == len(a.transitions)


@pytest.mark.parametrize("name", sorted(NAMED_MODELS))
def test_bundled_files_match_corpus(name):
    text = (MODELS_DIR / f"{name}.json").read_text()
    assert serialize_model(parse_model(text)) == text


def test_pipeline_output_round_trips():
    d = determinize_guard_oriented(
        remove_all_silent(rename_clocks(unfold(coffee_machine(), 4)))
    )
    text = serialize_model(d.to_automaton())
    assert serialize_model(parse_model(text)) == text
    assert '"any"' in text  # merged guards carry disjunction


def test_missing_field_diagnostic():
    with pytest.raises(ParseError, match=r"missing field: locations"):
        parse_model("{}")


def test_unknown_clock_names_path():
    doc = json.loads(serialize_model(coffee_machine()))
    doc["transitions"][1]["guard"] = [{"left": "z", "rel": "<", "const": 2}]
    with pytest.raises(ParseError, match=r"transitions\[1\].*unknown clock: z"):
        parse_model(json.dumps(doc))


def test_negative_constant_rejected():
    doc = json.loads(serialize_model(coffee_machine()))
    doc["transitions"][1]["guard"] = [{"left": "x", "rel": "<", "const": -1}]
    with pytest.raises(ParseError, match="negative constant"):
        parse_model(json.dumps(doc))


def test_malformed_relation_rejected():
    doc = json.loads(serialize_model(coffee_machine()))
    doc["transitions"][1]["guard"] = [{"left": "x", "rel": "!=", "const": 1}]
    with pytest.raises(ParseError, match="malformed relation"):
        parse_model(json.dumps(doc))


UPPAAL = """<nta>
  <declaration>clock x; chan alpha, tau;</declaration>
  <template>
    <name>m</name>
    <location id="id0"><name>q0</name></location>
    <location id="id1"><name>q1_acc</name></location>
    <init ref="id0"/>
    <transition><source ref="id0"/><target ref="id1"/>
      <label kind="guard">x&gt;1 &amp;&amp; x&lt;=3</label>
      <label kind="synchronisation">alpha!</label>
      <label kind="assignment">x=0</label></transition>
    <transition><source ref="id1"/><target ref="id0"/>
      <label kind="synchronisation">tau?</label></transition>
  </template>
</nta>"""


def test_uppaal_import_subset():
    a = import_uppaal_xml(UPPAAL)
    assert a.locations == frozenset(("q0", "q1_acc"))
    assert a.accepting == frozenset(("q1_acc",))
    silent = [t for t in a.transitions if t.is_silent]
    assert len(silent) == 1
    alpha = next(t for t in a.transitions if t.action == "alpha")
    assert len(alpha.resets) == 1


def test_uppaal_rejects_state_variables():
    with pytest.raises(UnsupportedXmlError, match="int n"):
        import_uppaal_xml(UPPAAL.replace("clock x;", "clock x; int n;"))


def test_uppaal_rejects_two_templates():
    doubled = UPPAAL.replace(
        "</template>", "</template><template><name>n</name>"
        '<location id="id9"><name>p</name></location><init ref="id9"/></template>'
    )
    with pytest.raises(UnsupportedXmlError, match="one template"):
        import_uppaal_xml(doubled)


def test_uppaal_rejects_committed_locations():
    committed = UPPAAL.replace(
        '<location id="id0"><name>q0</name></location>',
        '<location id="id0"><name>q0</name><committed/></location>',
    )
    with pytest.raises(UnsupportedXmlError, match="committed"):
        import_uppaal_xml(committed)


def test_dot_export_structure():
    text = export_dot(coffee_machine())
    assert text.count("doublecircle") == 1
    assert "ε" in text
    assert text.count("->") == 6 + 1  # edges + initial marker
    assert text == export_dot(coffee_machine())  # deterministic


def test_dot_export_shows_disjunction():
    d = determinize_guard_oriented(
        remove_all_silent(rename_clocks(unfold(coffee_machine(), 4)))
    )
    text = export_dot(d.to_automaton())
    assert "∨" in text
