import json
from fractions import Fraction
from pathlib import Path

import pytest

from volver.corpus import load_corpus
from volver.extractors import default_registry
from volver.linking import EndpointConfig, MockTransport
from volver.pipeline import run
from volver.rdf import Iri, IriPolicy

FIXTURES = Path(__file__).parent / "fixtures"

# every fixture volume and the template expected to win on it
EXPECTED_WINNERS = {
    1: "rdfa",
    2: "microformat",
    3: "heuristic-a",
    4: "heuristic-b",
    5: "heuristic-a",
    6: "heuristic-a",
    10: "heuristic-a",
    11: "heuristic-a",
    20: "heuristic-a",
}

EXPECTED_JSON_NAMES = {
    None: "index",
    1: "rdfa-vol",
    2: "mf-vol",
    3: "plain-vol",
    4: "oldstyle-vol",
    5: "broken-vol",
    6: "german-vol",
    10: "prev-a-vol",
    11: "other-vol",
    20: "joint-vol",
}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sparql_dir() -> Path:
    return FIXTURES / "sparql"


@pytest.fixture()
def corpus_manifest():
    return load_corpus(FIXTURES / "corpus" / "manifest.tsv")


@pytest.fixture()
def registry():
    return default_registry()


@pytest.fixture()
def policy() -> IriPolicy:
    return IriPolicy(Iri("http://example.org/lod/"))


def expected_json(volume_id):
    name = EXPECTED_JSON_NAMES[volume_id]
    return json.loads((FIXTURES / "expected" / f"{name}.expected.json").read_text("utf-8"))


def run_pipeline(out_dir, threshold=Fraction(3, 5), transport="mock", parallelism=1):
    manifest = load_corpus(FIXTURES / "corpus" / "manifest.tsv")
    if transport == "mock":
        transport = MockTransport(FIXTURES / "sparql")
    config = EndpointConfig(endpoint_iri="mock:fixtures", backoff=0.0)
    report = run(
        manifest,
        default_registry(),
        config,
        threshold,
        IriPolicy(Iri("http://example.org/lod/")),
        out_dir,
        transport=transport,
        parallelism=parallelism,
    )
    return report


@pytest.fixture(scope="session")
def pipeline_out(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("pipeline")
    report = run_pipeline(out_dir)
    return report, out_dir
