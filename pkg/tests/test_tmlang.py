import json

import pytest
from hypothesis import given, strategies as st

from TM.core_model import ArcKind, Direction, StageKind, StaticModel, isomorphic
from TM.core_model.model import Arc, Stage, Thimac
from TM.errors import InvalidModel, ParseError, SchemaError
from TM.tmlang import (
    FlowStatement,
    TriggerStatement,
    from_json,
    load_model,
    model_to_dict,
    parse,
    serialize,
    to_json,
    tokenize,
)

STAGE_STRINGS = [
    "Flow.Create.release.transfer.output*",
    "Flow.Create.process.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.accept.release.transfer.output*",
    "Flow.Transfer.input.receive.arrive.accept.process.release.transfer.output*",
]

APOLLO_STRINGS = [
    "Flow.Marble.create.release.transfer.Phydias.transfer.receive.transfer.workshop.",
    "Flow.Apollo.image.create.release.transfer.Phydias.transfer.receive.release.transfer.workshop.",
    "Flow.Workshop.transfer.receive.process--> Apollo.temple.statue.create.process.",
]

TRIGGER_STRINGS = ["Rooster.sound.create-->Sun.rising.create.", "Flame.create-->Flame.heat.create.",
                   "Flame.create-->Heat.create."]

FIXTURE_NAMES = ["grass", "equations_a", "equations_b", "equations_y0", "rooster", "flame", "water", "apollo",
                 "apollo_unrepaired", "elevator"]


def kinds(model, thimac_id):
    return [s.keyword for s in model.stages_of(thimac_id)]


def test_anonymous_context_chain():
    _, model = parse("Flow.Create.process.release.transfer.output")
    (context,) = model.sorted_thimacs()
    assert context.name == ""
    assert kinds(model, context.id) == ["create", "process", "release", "transfer.output"]
    assert len(model.sorted_arcs(ArcKind.FLOW)) == 3


def test_rooster_trigger():
    document, model = parse("Rooster.sound.create-->Sun.rising.create.")
    assert isinstance(document.statements[0], TriggerStatement)
    (arc,) = model.sorted_arcs()
    assert arc.kind is ArcKind.TRIGGER
    assert model.stage_path(arc.source) == "Rooster.sound.create"
    assert model.stage_path(arc.target) == "Sun.rising.create"


def test_marble_string():
    _, model = parse(APOLLO_STRINGS[0])
    marble = model.find_thimac("Marble", None)
    phydias = model.find_thimac("Phydias", None)
    workshop = model.find_thimac("workshop", None)
    assert kinds(model, marble) == ["create", "release", "transfer"]
    assert kinds(model, phydias) == ["transfer", "receive"]
    assert kinds(model, workshop) == ["transfer"]
    transfer = model.find_stage(phydias, StageKind.TRANSFER)
    targets = sorted(model.stage_path(a.target) for a in model.outgoing(transfer, ArcKind.FLOW))
    assert targets == ["Phydias.receive", "workshop.transfer"]


def test_apollo_statements_unify():
    _, model = parse("\n".join(APOLLO_STRINGS))
    names = sorted(".".join(model.thimac_path(t.id)) for t in model.sorted_thimacs())
    assert names == ["Apollo", "Apollo.image", "Apollo.temple", "Apollo.temple.statue", "Marble", "Phydias",
                     "workshop"]
    (trigger,) = model.sorted_arcs(ArcKind.TRIGGER)
    assert model.stage_path(trigger.source) == "workshop.process"
    assert model.stage_path(trigger.target) == "Apollo.temple.statue.create"


def test_receive_arrive_is_a_refinement():
    _, model = parse(STAGE_STRINGS[2])
    (context,) = model.sorted_thimacs()
    assert kinds(model, context.id) == ["transfer.input", "arrive", "release", "transfer.output"]


@pytest.mark.parametrize("text", STAGE_STRINGS + APOLLO_STRINGS)
def test_corpus_strings_round_trip(text):
    _, model = parse(text)
    _, again = parse(serialize(model))
    assert isomorphic(model, again)


def test_stage_strings_merge_into_one_machine():
    _, model = parse("\n".join(STAGE_STRINGS))
    (context,) = model.sorted_thimacs()
    assert kinds(model, context.id) == [
        "create", "release", "transfer.output", "process", "transfer.input", "arrive", "accept"]
    _, again = parse(serialize(model))
    assert isomorphic(model, again)


@pytest.mark.parametrize("text", TRIGGER_STRINGS)
def test_trigger_strings_hold_one_trigger_each(text):
    _, model = parse(text)
    assert len(model.sorted_arcs(ArcKind.TRIGGER)) == 1
    assert model.sorted_arcs(ArcKind.FLOW) == []
    assert serialize(model) == text


@pytest.mark.parametrize("text, canonical", [
    (STAGE_STRINGS[0], "Flow.create.release.transfer.output."),
    (STAGE_STRINGS[1], "Flow.create.process.release.transfer.output."),
    (STAGE_STRINGS[2], "Flow.transfer.input.receive.arrive.release.transfer.output."),
    (STAGE_STRINGS[3], "Flow.transfer.input.receive.arrive.accept.release.transfer.output."),
    (STAGE_STRINGS[4], "Flow.transfer.input.receive.arrive.accept.process.release.transfer.output."),
])
def test_stage_strings_serialize_to_their_canonical_spelling(text, canonical):
    assert serialize(parse(text)[1]) == canonical
    assert serialize(parse(canonical)[1]) == canonical


def test_fan_out_breaks_into_one_statement_per_path():
    assert serialize(parse(APOLLO_STRINGS[0])[1]).splitlines() == [
        "Flow.Marble.create.release.transfer.Phydias.transfer.",
        "Flow.Phydias.transfer.receive.transfer.",
        "Flow.Phydias.transfer.workshop.transfer.",
    ]


@pytest.mark.parametrize("text", APOLLO_STRINGS)
def test_apollo_strings_reach_a_fixed_point(text):
    once = serialize(parse(text)[1])
    assert serialize(parse(once)[1]) == once


def test_empty_model():
    assert serialize(StaticModel()) == ""
    assert to_json(StaticModel()) == '{"arcs":[],"stages":[],"thimacs":[]}'
    document, model = parse("# only a comment\n\n")
    assert document.statements == ()
    assert not model.thimacs


def test_stageless_thimacs_survive_serialization():
    _, model = parse("Flow.Apollo.temple.")
    assert serialize(model) == "Flow.Apollo.temple."


def test_serialize_refuses_invalid_models():
    model = StaticModel()
    model.restore(
        thimacs=[Thimac(1, "Water")],
        stages=[Stage(1, 1, StageKind.PROCESS), Stage(2, 1, StageKind.CREATE)],
        arcs=[Arc(1, ArcKind.FLOW, 1, 2)],
    )
    with pytest.raises(InvalidModel) as caught:
        serialize(model)
    assert [d.code for d in caught.value.diagnostics] == ["IllegalFlowPair"]


def test_corrected_rooster_string():
    text = "Rooster.sound.create.release.transfer.sun.transfer.receive.process-->Rising.create."
    _, model = parse(text)
    sun = model.find_thimac("sun", None)
    assert kinds(model, sun) == ["transfer", "receive", "process"]
    (trigger,) = model.sorted_arcs(ArcKind.TRIGGER)
    assert model.stage_path(trigger.target) == "Rising.create"


def test_trigger_chains():
    _, model = parse("A.create-->B.create-->C.create")
    triggers = [(model.stage_path(a.source), model.stage_path(a.target)) for a in model.sorted_arcs()]
    assert triggers == [("A.create", "B.create"), ("B.create", "C.create")]


def test_tokenize_classifies_segments():
    document = tokenize("Flow.Y.transfer.input.receive.")
    (statement,) = document.statements
    assert isinstance(statement, FlowStatement)
    assert [s.role for s in statement.segments] == ["header", "name", "keyword", "marker", "keyword"]
    assert statement.segments[1].span.start == 5
    assert statement.segments[1].span.end == 6


@pytest.mark.parametrize("text, message, start, end", [
    ("Flow.Rain..create.", "dangling dot", 10, 10),
    ("Flow.A.cr eate", "unknown token 'cr eate'", 7, 14),
    ("Flow.Café.create", "unknown token 'Café'", 5, 10),
    ("A.create-->", "empty path side of '-->'", 11, 11),
])
def test_parse_errors_carry_spans(text, message, start, end):
    with pytest.raises(ParseError) as caught:
        parse(text)
    assert caught.value.message == message
    assert (caught.value.span.start, caught.value.span.end) == (start, end)


@pytest.mark.parametrize("text", [
    "Rooster.sound.create.release.transfer.sun.transfer.receive.proc ess-->Rising.create.",
    "Flow.X.create.Flow",
    "A.create-->B",
    "A.process.create",
    "A.input",
    "A.create.Water",
    "A.create.process.transfer",
    "X.receive\nX.receive.arrive",
    "Flow.create.X",
])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse(text)


def test_statement_index_skips_comments():
    with pytest.raises(ParseError) as caught:
        parse("# header\nFlow.A.create.\n\nFlow.B..create")
    assert caught.value.span.statement == 1
    assert "statement 1" in str(caught.value)


TOKENS = ["Flow", "A", "B", "heat", "create", "process", "release", "transfer", "receive", "arrive", "accept",
          "input", "output", "", " ", "*", "Café"]


@given(st.lists(st.lists(st.sampled_from(TOKENS), max_size=8), max_size=4),
       st.lists(st.sampled_from([".", "-->", "\n", ". "]), min_size=1, max_size=3))
def test_parser_is_total_on_token_soup(paths, joins):
    text = ""
    for index, path in enumerate(paths):
        text += ".".join(path) + (joins[index % len(joins)] if index < len(paths) - 1 else "")
    try:
        parse(text)
    except ParseError as exc:
        assert exc.span is not None
        assert 0 <= exc.span.start <= exc.span.end <= len(text.encode("utf-8"))


@given(st.text(max_size=60))
def test_parser_is_total_on_arbitrary_text(text):
    try:
        parse(text)
    except ParseError as exc:
        assert exc.span.start <= exc.span.end


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trips(loaded, name):
    model = loaded(name).model
    _, again = parse(serialize(model))
    assert isomorphic(model, again)
    text = to_json(model)
    restored = from_json(text)
    assert to_json(restored) == text
    assert model_to_dict(restored) == model_to_dict(model)


def test_json_schema_errors():
    document = {"thimacs": [{"id": 1, "name": "A", "parent": None}],
                "stages": [{"id": 1, "owner": 1, "kind": "create", "direction": None}],
                "arcs": [{"id": 1, "kind": "flow", "from": 5, "to": 1}]}
    with pytest.raises(SchemaError) as caught:
        from_json(json.dumps(document))
    assert caught.value.path == "/arcs/0/from"

    document["arcs"] = []
    document["stages"][0]["kind"] = "destroy"
    with pytest.raises(SchemaError) as caught:
        from_json(json.dumps(document))
    assert caught.value.path == "/stages/0/kind"

    with pytest.raises(SchemaError) as caught:
        from_json("{not json")
    assert caught.value.path == ""

    with pytest.raises(SchemaError) as caught:
        from_json('{"thimacs": [], "stages": []}')
    assert caught.value.path == "/arcs"


def test_json_keeps_directions(fixture_file):
    model = load_model(fixture_file("water.tm"))
    directions = {s.direction for s in from_json(to_json(model)).stages.values()}
    assert directions == {None, Direction.INPUT, Direction.OUTPUT}


def test_generic_fixture_matches_the_stage_strings(fixture_file):
    _, expected = parse("\n".join(STAGE_STRINGS))
    assert isomorphic(load_model(fixture_file("generic.tm")), expected)
