import os

import pytest
from hypothesis import HealthCheck, settings

from TM.behavior import derive_constraints
from TM.dynamics import derive_event_graph, load_events
from TM.tmlang import parse_file

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "TM", "fixtures")

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


class Loaded:
    """A fixture model with its events, event graph and constraints."""

    def __init__(self, name):
        self.name = name
        self.document, self.model = parse_file(os.path.join(FIXTURES, name + ".tm"))
        self.dyn = load_events(os.path.join(FIXTURES, name + ".events.json"), self.model)
        self.graph = derive_event_graph(self.dyn)
        self.cs = derive_constraints(self.graph)

    def stage(self, path):
        return self.model.resolve_stage_path(path)


@pytest.fixture
def fixture_file():
    def path(name):
        return os.path.join(FIXTURES, name)
    return path


@pytest.fixture
def loaded():
    return Loaded
