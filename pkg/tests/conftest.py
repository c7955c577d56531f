import sys
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import settings

from dimseed.graph import Gender, SocialGraph, normalize_weights
from dimseed.synthgen import SbmSpec, generate_sbm

settings.register_profile("default", max_examples=40, deadline=timedelta(seconds=5))
settings.load_profile("default")

M, F = Gender.MALE, Gender.FEMALE


def make_graph(genders, edges, b=None, normalize=False):
    """genders: str like 'FFMM' (node i gets genders[i]); edges: (src, dst[, count])."""
    nodes = [(i, Gender(c)) for i, c in enumerate(genders)]
    recs = [(e[0], e[1], e[2] if len(e) > 2 else 1) for e in edges]
    g = SocialGraph.from_records(nodes, recs, b=b)
    return normalize_weights(g) if normalize else g


@pytest.fixture(scope="session")
def sbm_default():
    return generate_sbm(SbmSpec(rng_seed=0))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
