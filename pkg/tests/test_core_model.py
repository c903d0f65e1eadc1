import pytest
from hypothesis import given, strategies as st

from TM.core_model import (
    ArcKind,
    Direction,
    StageKind,
    StaticModel,
    add_flow,
    add_stage,
    add_thimac,
    add_trigger,
    canonical_form,
    errors_of,
    isomorphic,
    validate_model,
)
from TM.core_model.model import Arc, Stage, Thimac, flow_rule_violation
from TM.errors import (
    DirectionOnNonTransfer,
    DuplicateName,
    DuplicateStage,
    IllegalFlowPair,
    InvalidName,
    MixedReceiveRefinement,
    TMError,
    UnknownParent,
    UnknownStage,
)

FIXTURE_NAMES = ["grass", "equations_a", "equations_b", "equations_y0", "rooster", "flame", "water", "apollo",
                 "apollo_unrepaired", "elevator"]


def codes(diagnostics):
    return [d.code for d in diagnostics]


def test_first_thimac():
    model = StaticModel()
    add_thimac(model, "Water")
    assert len(model.thimacs) == 1


def test_containment_mirrors_dot_path():
    model = StaticModel()
    flame = add_thimac(model, "Flame")
    heat = add_thimac(model, "heat", flame)
    assert model.thimacs[heat].parent == flame
    assert model.thimac_path(heat) == ["Flame", "heat"]


def test_duplicate_sibling_name():
    model = StaticModel()
    add_thimac(model, "Water")
    with pytest.raises(DuplicateName):
        add_thimac(model, "Water")
    with pytest.raises(DuplicateName):
        add_thimac(model, "water")


def test_same_name_under_different_parents():
    model = StaticModel()
    controller = add_thimac(model, "Controller")
    add_thimac(model, "Floor")
    add_thimac(model, "floor", controller)
    assert len(model.thimacs) == 3


def test_unknown_parent():
    with pytest.raises(UnknownParent):
        add_thimac(StaticModel(), "Water", 7)


@pytest.mark.parametrize("name", ["create", "Transfer", "input", "flow", "two words", "1st"])
def test_unusable_names(name):
    with pytest.raises(InvalidName):
        add_thimac(StaticModel(), name)


def test_stages():
    model = StaticModel()
    water = add_thimac(model, "Water")
    create = add_stage(model, water, StageKind.CREATE)
    assert model.stages[create].kind is StageKind.CREATE
    add_stage(model, water, StageKind.TRANSFER, Direction.INPUT)
    add_stage(model, water, StageKind.TRANSFER, Direction.OUTPUT)
    add_stage(model, water, StageKind.TRANSFER)
    assert [s.keyword for s in model.stages_of(water)] == [
        "create", "transfer.input", "transfer.output", "transfer"]


def test_stage_errors():
    model = StaticModel()
    water = add_thimac(model, "Water")
    add_stage(model, water, StageKind.RECEIVE)
    with pytest.raises(DuplicateStage):
        add_stage(model, water, StageKind.RECEIVE)
    with pytest.raises(MixedReceiveRefinement):
        add_stage(model, water, StageKind.ARRIVE)
    with pytest.raises(DirectionOnNonTransfer):
        add_stage(model, water, StageKind.PROCESS, Direction.INPUT)
    with pytest.raises(UnknownParent):
        add_stage(model, 99, StageKind.CREATE)


def test_arrive_then_receive_is_mixed():
    model = StaticModel()
    water = add_thimac(model, "Water")
    add_stage(model, water, StageKind.ARRIVE)
    add_stage(model, water, StageKind.ACCEPT)
    with pytest.raises(MixedReceiveRefinement):
        add_stage(model, water, StageKind.RECEIVE)


def test_flow_legality():
    model = StaticModel()
    a = add_thimac(model, "A")
    b = add_thimac(model, "B")
    create = add_stage(model, a, StageKind.CREATE)
    release = add_stage(model, a, StageKind.RELEASE)
    out = add_stage(model, a, StageKind.TRANSFER, Direction.OUTPUT)
    into = add_stage(model, b, StageKind.TRANSFER, Direction.INPUT)
    b_create = add_stage(model, b, StageKind.CREATE)

    add_flow(model, create, release)
    add_flow(model, release, out)
    add_flow(model, out, into)
    with pytest.raises(IllegalFlowPair) as caught:
        add_flow(model, release, create)
    assert caught.value.rule
    with pytest.raises(IllegalFlowPair):
        add_flow(model, into, out)
    with pytest.raises(IllegalFlowPair):
        add_flow(model, create, b_create)
    with pytest.raises(UnknownStage):
        add_flow(model, create, 99)
    assert len(model.sorted_arcs(ArcKind.FLOW)) == 3


def test_undirected_transfer_sends_and_accepts():
    phydias = Stage(1, 1, StageKind.TRANSFER)
    receive = Stage(2, 1, StageKind.RECEIVE)
    workshop = Stage(3, 2, StageKind.TRANSFER)
    assert flow_rule_violation(phydias, receive) is None
    assert flow_rule_violation(receive, phydias) is None
    assert flow_rule_violation(phydias, workshop) is None
    assert flow_rule_violation(Stage(4, 1, StageKind.PROCESS), Stage(5, 1, StageKind.CREATE)) is not None


def test_triggers_are_unrestricted():
    model = StaticModel()
    rooster = add_thimac(model, "Rooster")
    sound = add_thimac(model, "sound", rooster)
    sun = add_thimac(model, "Sun")
    rising = add_thimac(model, "rising", sun)
    crow = add_stage(model, sound, StageKind.CREATE)
    rise = add_stage(model, rising, StageKind.CREATE)
    add_trigger(model, crow, rise)
    add_trigger(model, rise, rise)
    assert len(model.sorted_arcs(ArcKind.TRIGGER)) == 2
    diagnostics = validate_model(model)
    assert not errors_of(diagnostics)
    assert "SelfTrigger" in codes(diagnostics)


def test_validate_reports_illegal_flow_and_dangling_ids():
    model = StaticModel()
    model.restore(
        thimacs=[Thimac(1, "Water"), Thimac(2, "Ice", 3)],
        stages=[Stage(1, 1, StageKind.PROCESS), Stage(2, 1, StageKind.CREATE)],
        arcs=[Arc(1, ArcKind.FLOW, 1, 2), Arc(2, ArcKind.TRIGGER, 1, 9)],
    )
    found = codes(errors_of(validate_model(model)))
    assert found.count("IllegalFlowPair") == 1
    assert found.count("DanglingReference") == 2


def test_validate_containment_cycle():
    model = StaticModel()
    model.restore(thimacs=[Thimac(1, "A", 2), Thimac(2, "B", 1)])
    assert "ContainmentCycle" in codes(validate_model(model))
    assert model.thimac_path(1) == ["B", "A"]


def test_validate_warnings():
    model = StaticModel()
    a = add_thimac(model, "A")
    receive = add_stage(model, a, StageKind.RECEIVE)
    out = add_stage(model, a, StageKind.TRANSFER)
    add_flow(model, out, receive)
    add_flow(model, receive, out)
    process = add_stage(model, a, StageKind.PROCESS)
    diagnostics = validate_model(model)
    assert not errors_of(diagnostics)
    assert "IntraMachineFlowCycle" in codes(diagnostics)
    unreachable = [d for d in diagnostics if d.code == "UnreachableStage"]
    assert [d.location for d in unreachable] == ["stage:{}".format(process)]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_have_no_errors(loaded, name):
    model = loaded(name).model
    diagnostics = validate_model(model)
    assert not errors_of(diagnostics)
    assert diagnostics == validate_model(model)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_every_flow_arc_is_legal(loaded, name):
    model = loaded(name).model
    for arc in model.sorted_arcs(ArcKind.FLOW):
        assert flow_rule_violation(model.stages[arc.source], model.stages[arc.target]) is None


def test_canonical_form_ignores_ids_and_first_letter_case():
    left = StaticModel()
    w = add_thimac(left, "Workshop")
    add_stage(left, w, StageKind.PROCESS)

    right = StaticModel()
    add_thimac(right, "Other")
    w2 = add_thimac(right, "workshop")
    add_stage(right, w2, StageKind.PROCESS)
    assert not isomorphic(left, right)
    right.thimacs.pop(1)
    assert isomorphic(left, right)
    assert canonical_form(left)[1] == (("workshop", "process"),)


def test_resolve_stage_path(loaded):
    grass = loaded("grass")
    stage = grass.model.stages[grass.stage("Grass.wet.create")]
    assert stage.kind is StageKind.CREATE
    assert grass.model.stage_path(stage.id) == "Grass.wet.create"
    water = loaded("water")
    assert water.model.stages[water.stage("Water.transfer.input")].direction is Direction.INPUT
    with pytest.raises(UnknownStage):
        grass.stage("Grass.wet.release")
    with pytest.raises(UnknownStage):
        grass.stage("Grass.wet")


BUILD_STEPS = st.one_of(
    st.tuples(st.just("thimac"), st.sampled_from(["Water", "rain", "Heat", "", "create"]), st.integers(0, 6)),
    st.tuples(st.just("stage"), st.integers(0, 6), st.sampled_from(list(StageKind)),
              st.sampled_from([None, Direction.INPUT, Direction.OUTPUT])),
    st.tuples(st.just("flow"), st.integers(0, 30), st.integers(0, 30)),
    st.tuples(st.just("trigger"), st.integers(0, 30), st.integers(0, 30)),
)


def _pick(ids, index):
    ids = sorted(ids)
    return ids[index % len(ids)] if ids else index + 1


@given(st.lists(BUILD_STEPS, max_size=40))
def test_models_built_through_add_calls_have_no_errors(steps):
    model = StaticModel()
    for step in steps:
        try:
            if step[0] == "thimac":
                parent = None if step[2] == 0 else _pick(model.thimacs, step[2])
                add_thimac(model, step[1], parent)
            elif step[0] == "stage":
                add_stage(model, _pick(model.thimacs, step[1]), step[2], step[3])
            elif step[0] == "flow":
                add_flow(model, _pick(model.stages, step[1]), _pick(model.stages, step[2]))
            else:
                add_trigger(model, _pick(model.stages, step[1]), _pick(model.stages, step[2]))
        except TMError:
            pass
    assert not errors_of(validate_model(model))
