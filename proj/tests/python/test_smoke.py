import json
import os
import pathlib

import pytest

import ezbft_lab

SCENARIOS = pathlib.Path(os.environ.get("EZBFT_SOURCE_DIR", pathlib.Path(__file__).parents[2])) / "scenarios"


def test_scenario_names():
    assert set(ezbft_lab.scenario_names()) >= {"safety", "exec-consistency", "liveness", "happy"}


def test_safety_reproduces():
    res = ezbft_lab.run_scenario("safety")
    assert res["matches"]
    assert [r["property"] for r in res["reports"]] == ["agreement"]


def test_trace_matches_golden():
    res = ezbft_lab.run_scenario("liveness")
    assert res["trace"] == (SCENARIOS / "liveness.jsonl").read_text()


def test_schedule_roundtrip():
    schedule = json.loads((SCENARIOS / "exec-consistency.json").read_text())
    trace = ezbft_lab.run_schedule(schedule)
    props = {r["property"] for r in ezbft_lab.check_trace(trace)}
    assert props == {"dependency_inclusion", "execution_consistency"}


def test_honest_explore_small():
    res = ezbft_lab.explore(commands=1, max_owner_changes=0, max_events=40)
    assert res["exhausted"]
    assert res["states_visited"] == 1123
    assert res["violations"] == []


def test_bad_scenario():
    with pytest.raises(ezbft_lab.EzbftError):
        ezbft_lab.run_scenario("nope")
