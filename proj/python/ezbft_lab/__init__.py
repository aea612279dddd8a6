import json

from . import _core
from ._core import EzbftError, scenario_names

__all__ = ["EzbftError", "scenario_names", "run_scenario", "run_schedule", "check_trace", "explore"]


def run_scenario(name):
    return json.loads(_core.run_scenario(name))


def run_schedule(schedule):
    if not isinstance(schedule, str):
        schedule = json.dumps(schedule)
    return _core.run_schedule(schedule)


def check_trace(trace_jsonl, properties="all"):
    if not isinstance(properties, str):
        properties = ",".join(properties)
    return json.loads(_core.check_trace(trace_jsonl, properties))


def explore(**kwargs):
    for key in ("properties", "stop_when_found"):
        if key in kwargs and not isinstance(kwargs[key], str):
            kwargs[key] = ",".join(kwargs[key])
    return json.loads(_core.explore(**kwargs))
