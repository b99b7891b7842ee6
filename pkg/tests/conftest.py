import json
from pathlib import Path

import pytest

from repairbench import corpus as corpus_mod
from repairbench.llm import ProviderRegistry, SamplingParams
from repairbench.sandbox import Sandbox
from repairbench.strategies import StrategyRunner

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
GOLDENS = REPO_ROOT / "goldens"


@pytest.fixture(scope="session")
def corpus():
    return corpus_mod.ingest(FIXTURES / "corpus")


@pytest.fixture(scope="session")
def sandbox():
    return Sandbox()


@pytest.fixture(scope="session")
def registry():
    return ProviderRegistry.from_config(
        json.loads((FIXTURES / "providers.json").read_text()), base_dir=FIXTURES
    )


@pytest.fixture(scope="session")
def runner(corpus, sandbox, registry):
    # session-scoped so the sandbox run cache is shared across tests
    return StrategyRunner(corpus, sandbox, registry)


@pytest.fixture(scope="session")
def params():
    return SamplingParams()
