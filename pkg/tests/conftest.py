"""Shared fixtures: the four built-in algebras plus engineered extras."""

import json
import sys

import numpy as np
import pytest

from nilconj import fixture, load_algebra


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", []) if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

# Extra algebras used by specific scenarios, defined as documents so the
# loader path is exercised too.

# two-dimensional center whose second direction brackets with nothing:
# z0 = (0, c) gives J = 0, the flat sanity case.
HEIS3Z2 = json.dumps({
    "name": "heis3z2",
    "dim_center": 2,
    "dim_v": 2,
    "gram": np.eye(4).tolist(),
    "brackets": [{"a": 0, "b": 1, "out": [1, 0]}],
})

# J with a one-dimensional kernel (e3 brackets with nothing).
HEIS4DEG = json.dumps({
    "name": "heis4deg",
    "dim_center": 1,
    "dim_v": 3,
    "gram": np.eye(4).tolist(),
    "brackets": [{"a": 0, "b": 1, "out": [1]}],
})

# rotation rates 2 and 2/3 with a negative-definite second block; tuned so
# that x0 = c e3 with c^2 = 9/(9 - pi sqrt(3)) realizes the preimage-pairing
# bonus multiplicity at t = pi.
WCROSS = json.dumps({
    "name": "wcross",
    "dim_center": 1,
    "dim_v": 4,
    "gram": [[1, 0, 0, 0, 0],
             [0, 1, 0, 0, 0],
             [0, 0, 1, 0, 0],
             [0, 0, 0, -1, 0],
             [0, 0, 0, 0, -1]],
    "brackets": [{"a": 0, "b": 1, "out": [2]},
                 {"a": 2, "b": 3, "out": [2 / 3]}],
})

# one rotating block (rate 1) and one boosting block (rate 2).
PHYP = json.dumps({
    "name": "phyp",
    "dim_center": 1,
    "dim_v": 4,
    "gram": [[1, 0, 0, 0, 0],
             [0, 1, 0, 0, 0],
             [0, 0, 1, 0, 0],
             [0, 0, 0, 1, 0],
             [0, 0, 0, 0, -1]],
    "brackets": [{"a": 0, "b": 1, "out": [1]},
                 {"a": 2, "b": 3, "out": [2]}],
})

BUILTIN_NAMES = ["heis3", "pheis3", "heis5w", "bicenter"]


@pytest.fixture(scope="session")
def algebras():
    return {name: fixture(name) for name in BUILTIN_NAMES}


@pytest.fixture(scope="session")
def heis3():
    return fixture("heis3")


@pytest.fixture(scope="session")
def pheis3():
    return fixture("pheis3")


@pytest.fixture(scope="session")
def heis5w():
    return fixture("heis5w")


@pytest.fixture(scope="session")
def bicenter():
    return fixture("bicenter")


@pytest.fixture(scope="session")
def heis3z2():
    return load_algebra(HEIS3Z2)


@pytest.fixture(scope="session")
def heis4deg():
    return load_algebra(HEIS4DEG)


@pytest.fixture(scope="session")
def wcross():
    return load_algebra(WCROSS)


@pytest.fixture(scope="session")
def phyp():
    return load_algebra(PHYP)
