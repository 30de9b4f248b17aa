"""
Pytest configuration and fixtures
"""
import pytest
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from crinifer.maps import make_map
from crinifer.model import build_model_store
from crinifer.rays import PullbackConfig, default_tracked_addresses
from crinifer.semiconj import build_semiconjugacy
from crinifer.symbolic import build_alphabet


@pytest.fixture(scope="session")
def cosh_map():
    """The target map cosh"""
    return make_map("cosh")


@pytest.fixture(scope="session")
def model_g():
    """The disjoint-type model 0.1 cosh"""
    return make_map("scaled-cosh", 0.1)


@pytest.fixture(scope="session")
def cosh_alphabet(cosh_map):
    """Fundamental domains of cosh for the default D and delta"""
    return build_alphabet(cosh_map)


@pytest.fixture(scope="session")
def tracked():
    """The default tracked addresses: the real rays and their neighbours at height pi"""
    return default_tracked_addresses()


@pytest.fixture(scope="session")
def model_store(model_g, tracked):
    """Traced model hairs of the tracked addresses"""
    return build_model_store(model_g, tracked, PullbackConfig())


@pytest.fixture(scope="session")
def context(cosh_map, model_g, tracked):
    """Semiconjugacy context for cosh with canonical rays to level 3"""
    return build_semiconjugacy(cosh_map, model_g, tracked, PullbackConfig(), depth=3)


@pytest.fixture(scope="session")
def deep_context(cosh_map, model_g, tracked):
    """Semiconjugacy context for cosh with canonical rays to level 12"""
    return build_semiconjugacy(cosh_map, model_g, tracked, PullbackConfig(), depth=12)


@pytest.fixture
def output_dir(tmp_path):
    """Empty directory for trace files"""
    directory = tmp_path / "run"
    directory.mkdir()
    return directory
