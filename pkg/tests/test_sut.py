import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TOY_MODEL
from mlec.sut import (
    Action,
    Bounds,
    ComponentDescriptor,
    InfeasibleActionError,
    ModelParseError,
    ModelSemanticError,
    available_actions,
    branch_distance,
    compare,
    levenshtein,
    load_model,
    to_int,
)

LOGIN = ("LoginDialog[Login]", "JRootPane", "JLayeredPane", "JPanel")
USERNAME = LOGIN + ("JTextField[Username]",)
PASSWORD = LOGIN + ("JPasswordField[Password]",)
LOGIN_BUTTON = LOGIN + ("JPanel[buttons]", "JButton[Login]")
CANCEL_BUTTON = LOGIN + ("JPanel[buttons]", "JButton[Cancel]")
CLOSE = ("MainFrame[ReTest Demo]", "JRootPane", "JLayeredPane", "JPanel", "JButton[Close]")


def act(sut, kind, path, payload=None):
    return Action(kind, sut.current_state().find(path), payload)


def login(sut):
    sut.execute(act(sut, "enter-text", USERNAME, "Max"))
    sut.execute(act(sut, "enter-text", PASSWORD, "ReTest"))
    return sut.execute(act(sut, "click", LOGIN_BUTTON))


class TestLoadModel:
    def test_demo_starts_at_login_window(self, demo_sut):
        state = demo_sut.current_state()
        assert [w.id for w in state.windows] == ["login"]
        assert not state.is_exit
        assert demo_sut.coverage.covered() == set()

    def test_demo_is_big_enough(self, demo_sut):
        assert len(demo_sut.model.branches) >= 30
        assert len(demo_sut.model.procedures) >= 8

    def test_no_windows(self):
        with pytest.raises(ModelSemanticError, match="no initial window"):
            load_model(json.dumps({"windows": [], "procedures": {}}))

    def test_duplicate_path_is_named(self, toy_text):
        doc = json.loads(toy_text)
        doc["windows"][0]["components"].append({"path": ["Frame", "Check"], "category": "label"})
        with pytest.raises(ModelSemanticError, match="Frame/Check"):
            load_model(json.dumps(doc))

    def test_parse_error_has_position(self):
        with pytest.raises(ModelParseError) as info:
            load_model('{"windows": [\n  {"id": "w",]\n}')
        assert info.value.line == 2

    def test_undeclared_variable(self, toy_text):
        doc = json.loads(toy_text)
        doc["procedures"]["check"][0]["if"]["left"] = {"var": "nope"}
        with pytest.raises(ModelSemanticError, match="nope"):
            load_model(json.dumps(doc))

    def test_focus_cycle_must_be_contiguous(self, toy_text):
        doc = json.loads(toy_text)
        doc["windows"][0]["components"][3]["focus_index"] = 5
        with pytest.raises(ModelSemanticError, match="contiguous"):
            load_model(json.dumps(doc))

    def test_focus_index_requires_focusable(self, toy_text):
        doc = json.loads(toy_text)
        doc["windows"][0]["components"][1]["focusable"] = False
        with pytest.raises(ModelSemanticError, match="focus_index"):
            load_model(json.dumps(doc))

    def test_string_ordering_rejected(self, toy_text):
        doc = json.loads(toy_text)
        doc["variables"]["s"] = ""
        doc["procedures"]["check"][0]["if"]["left"] = {"var": "s"}
        with pytest.raises(ModelSemanticError, match="string"):
            load_model(json.dumps(doc))


class TestStates:
    def test_initial_login_components(self, demo_sut):
        state = demo_sut.current_state()
        for path in (USERNAME, PASSWORD, LOGIN_BUTTON, CANCEL_BUTTON):
            assert state.find(path) is not None

    def test_current_state_is_pure(self, demo_sut):
        a = demo_sut.current_state()
        b = demo_sut.current_state()
        assert a == b and a.id == b.id

    def test_login_opens_main_window(self, demo_sut):
        state = login(demo_sut)
        assert [w.id for w in state.windows] == ["main"]

    def test_close_exits(self, demo_sut):
        login(demo_sut)
        state = demo_sut.execute(act(demo_sut, "click", CLOSE))
        assert state.is_exit
        assert available_actions(state) == []

    def test_flattening_visits_each_component_once(self, demo_sut):
        login(demo_sut)
        paths = [c.path for c in demo_sut.current_state().components()]
        assert len(paths) == len(set(paths))

    def test_equal_trees_equal_states(self, demo_sut):
        first = demo_sut.current_state()
        demo_sut.execute(act(demo_sut, "click", LOGIN + ("JLabel[Username: ]",)))
        assert demo_sut.current_state() == first

    def test_state_changes_when_enabled_flag_changes(self, demo_sut):
        first = demo_sut.current_state()
        demo_sut.execute(act(demo_sut, "enter-text", USERNAME, "Max"))
        second = demo_sut.current_state()
        assert second != first
        assert second.find(PASSWORD).enabled and not first.find(PASSWORD).enabled


class TestActions:
    def test_login_state_actions(self, demo_sut):
        demo_sut.execute(act(demo_sut, "enter-text", USERNAME, "Max"))
        demo_sut.execute(act(demo_sut, "enter-text", PASSWORD, "ReTest"))
        sigs = {a.signature for a in demo_sut.available_actions()}
        assert ("click", LOGIN_BUTTON) in sigs
        assert ("enter-text", USERNAME) in sigs
        assert ("enter-text", PASSWORD) in sigs

    def test_disabled_components_offer_nothing(self):
        state_model = {
            "initial_window": "w",
            "windows": [{"id": "w", "components": [
                {"path": ["B"], "category": "button-like", "enabled": False},
            ]}],
        }
        sut = load_model(json.dumps(state_model))
        assert sut.available_actions() == []

    def test_order_is_document_then_kind(self, demo_sut):
        actions = demo_sut.available_actions()
        order = [c.path for c in demo_sut.current_state().components()]
        keys = [(order.index(a.target.path), ("click", "enter-text", "select").index(a.kind)) for a in actions]
        assert keys == sorted(keys)

    def test_payload_rules(self):
        cd = ComponentDescriptor(("X",), "button-like")
        with pytest.raises(ValueError):
            Action("click", cd, "p")
        with pytest.raises(ValueError):
            Action("enter-text", cd)
        with pytest.raises(ValueError):
            Action("drag", cd)

    def test_describe_matches_report_style(self, demo_sut):
        a = act(demo_sut, "enter-text", USERNAME, "Max")
        assert a.describe() == "Entering text 'Max' into JTextField Username"
        assert act(demo_sut, "click", CANCEL_BUTTON).describe() == "Click on JButton [Cancel]"

    def test_absent_target_is_infeasible(self, demo_sut):
        ghost = ComponentDescriptor(("Nowhere",), "button-like")
        with pytest.raises(InfeasibleActionError):
            demo_sut.execute(Action("click", ghost))

    def test_disabled_target_is_infeasible(self, demo_sut):
        with pytest.raises(InfeasibleActionError, match="disabled"):
            demo_sut.execute(act(demo_sut, "click", LOGIN_BUTTON))

    def test_available_actions_are_executable(self, demo_sut):
        login(demo_sut)
        state = demo_sut.current_state()
        for action in available_actions(state):
            if action.kind == "click" and "Close" in action.target.path[-1]:
                continue
            demo_sut.reset()
            login(demo_sut)
            demo_sut.execute(action)


class TestBranchDistance:
    def test_equal_satisfied(self):
        assert branch_distance("==", 5, 5, True) == 0

    def test_less_than_wanting_true(self):
        assert branch_distance("<", 7, 5, True) == 3

    def test_less_than_wanting_false(self):
        assert branch_distance("<", 4, 5, False) == 1

    def test_equality_false_costs_k(self):
        assert branch_distance("==", 3, 3, False) == 1
        assert branch_distance("==", 3, 8, True) == 5

    def test_string_equality_uses_edit_distance(self):
        assert branch_distance("==", "Mux", "Max", True) == 1
        assert levenshtein("kitten", "sitting") == 3

    @given(
        st.sampled_from(["<", "<=", "==", "!=", ">=", ">"]),
        st.integers(-50, 50),
        st.integers(-50, 50),
        st.booleans(),
    )
    def test_zero_iff_outcome_taken(self, op, a, b, outcome):
        d = branch_distance(op, a, b, outcome)
        assert d >= 0
        assert (d == 0) == (compare(op, a, b) == outcome)

    def test_to_int(self):
        assert to_int("42") == 42 and to_int("abc") == -1 and to_int(" -7 ") == -7


class TestCoverage:
    def test_hits_and_distances(self, demo_sut):
        demo_sut.execute(act(demo_sut, "enter-text", USERNAME, "Mux"))
        demo_sut.execute(act(demo_sut, "enter-text", PASSWORD, "ReTest"))
        demo_sut.execute(act(demo_sut, "click", LOGIN_BUTTON))
        rec = demo_sut.coverage.branches["login:0:T"]
        assert rec.hit_count == 0 and rec.min_distance == 1 and rec.times_condition_executed == 1
        assert demo_sut.coverage.branches["login:0:F"].min_distance == 0
        assert demo_sut.coverage.procedures["login"]

    def test_reset_modes(self, demo_sut):
        login(demo_sut)
        covered = demo_sut.coverage.covered()
        demo_sut.reset(cumulative=True)
        assert demo_sut.current_state() == demo_sut.initial_state
        assert demo_sut.coverage.covered() == covered
        demo_sut.reset()
        assert demo_sut.coverage.covered() == set()
        assert all(math.isinf(r.min_distance) for r in demo_sut.coverage.branches.values())

    def test_hit_implies_zero_distance(self, demo_sut):
        login(demo_sut)
        for rec in demo_sut.coverage.branches.values():
            if rec.hit_count:
                assert rec.min_distance == 0

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.sampled_from(["-3", "0", "4", "6", "10"]), min_size=1, max_size=6), st.data())
    def test_determinism(self, words, data):
        buttons = data.draw(st.lists(st.sampled_from(["Check", "Clear"]), min_size=len(words), max_size=len(words)))
        runs = []
        for _ in range(2):
            sut = load_model(json.dumps(TOY_MODEL))
            trace = []
            for w, b in zip(words, buttons):
                sut.execute(Action("enter-text", sut.current_state().find(("Frame", "Field")), w))
                trace.append(sut.execute(Action("click", sut.current_state().find(("Frame", b)))).id)
            runs.append((trace, {k: vars(v) for k, v in sut.coverage.branches.items()}))
        assert runs[0] == runs[1]


def test_bounds_default_is_origin():
    assert Bounds() == Bounds(0, 0, 0, 0)
