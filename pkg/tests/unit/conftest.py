"""Shared fixtures for the causal.zid unit tests.

The engine is imported as ``ansible_collections.causal.zid...`` exactly as the
modules import it. When the checkout does not already live under an
``ansible_collections/causal/zid`` tree, a temporary one is linked in.
"""

import atexit
import shutil
import sys
import tempfile
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[2]
GRAPHS_DIR = PROJECT_ROOT / "tests" / "graphs"


def _expose_collection():
    if PROJECT_ROOT.parent.name == "causal" and PROJECT_ROOT.parent.parent.name == "ansible_collections":
        sys.path.insert(0, str(PROJECT_ROOT.parents[2]))
        return
    base = Path(tempfile.mkdtemp(prefix="zid-collections-"))
    namespace = base / "ansible_collections" / "causal"
    namespace.mkdir(parents=True)
    (namespace / "zid").symlink_to(PROJECT_ROOT, target_is_directory=True)
    sys.path.insert(0, str(base))
    atexit.register(shutil.rmtree, base, ignore_errors=True)


_expose_collection()

from ansible_collections.causal.zid.plugins.module_utils.corpus import named  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance runs over large seeded corpora")


@pytest.fixture
def graph_dir():
    return GRAPHS_DIR


@pytest.fixture
def bow():
    return named("bow")


@pytest.fixture
def chain():
    return named("chain")


@pytest.fixture
def back_door():
    return named("back_door")


@pytest.fixture
def front_door():
    return named("front_door")


@pytest.fixture
def g_a():
    """Z -> X -> Y with Z <-> X and Z <-> Y."""
    return named("g_a")


@pytest.fixture
def p_graph():
    return named("p_graph")


@pytest.fixture
def w_variant():
    return named("w_variant")


@pytest.fixture
def napkin():
    return named("napkin")
