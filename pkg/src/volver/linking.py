"""Country/affiliation candidate extraction and SPARQL entity linking.

Candidates are pulled from a paper's first-page plain text (extracted
upstream) and resolved against a knowledge-base endpoint with a single
redirect-union query, so naming variants like "The Netherlands" still
land on the canonical country resource. Transports are pluggable; tests
and CI use a fixture-backed mock.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import EmptyCandidateList, EndpointUnreachable, MalformedResponse
from .rdf import DBPEDIA_COUNTRY, Iri, TripleGraph

DEFAULT_CLASS = "dbpedia-owl:Country"
BATCH_SIZE = 50

QUERY_TEMPLATE = (
    "SELECT DISTINCT ?country { VALUES ?search { {VALUES} } "
    "?country a {CLASS} . "
    "{ ?name_uri dbpedia-owl:wikiPageRedirects ?country ; rdfs:label ?label . } "
    "UNION { ?country rdfs:label ?label } "
    "FILTER( STR(?label) = ?search ) }"
)


@dataclass(frozen=True)
class CountryCandidate:
    surface: str
    char_offset: int

    def __post_init__(self):
        if not self.surface or self.surface != self.surface.strip():
            raise ValueError(f"surface must be non-empty and trimmed: {self.surface!r}")


@dataclass(frozen=True)
class LinkedCountry:
    surface: str
    iri: Iri


@dataclass(frozen=True)
class EndpointConfig:
    endpoint_iri: str
    timeout: float = 30.0
    retries: int = 3
    class_iri: str = DEFAULT_CLASS
    backoff: float = 1.0

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


# ---------------------------------------------------------------------------
# candidate extraction

_EMAIL_RE = re.compile(r"[\w.+-]+@[\w.-]+")
_POSTAL_RE = re.compile(r"\b\d{4,6}\b")

# up to four capitalized (or all-caps) words, lowercase the/of only inside
_RUN_RE = re.compile(
    r"(?:[A-Z][A-Za-z.\-']*)(?:\s+(?:the|of|[A-Z][A-Za-z.\-']*)){0,3}$"
)

_ABSTRACT_RE = re.compile(r"abstract", re.IGNORECASE)


def _affiliation_zone(text: str) -> list[tuple[int, str]]:
    """(absolute offset, line) pairs between the title line and the first
    line mentioning the abstract."""
    lines: list[tuple[int, str]] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        lines.append((offset, line.rstrip("\n\r")))
        offset += len(line)
    title_index = next((i for i, (_, ln) in enumerate(lines) if ln.strip()), None)
    if title_index is None:
        return []
    zone = []
    for line_offset, line in lines[title_index + 1:]:
        if _ABSTRACT_RE.search(line):
            break
        zone.append((line_offset, line))
    return zone


def _runs_in_line(line: str) -> list[tuple[int, str]]:
    anchors = [len(line.rstrip())]
    anchors += [m.start() for m in _EMAIL_RE.finditer(line)]
    anchors += [m.start() for m in _POSTAL_RE.finditer(line)]
    runs = []
    for anchor in anchors:
        prefix = line[:anchor].rstrip(" .")
        match = _RUN_RE.search(prefix)
        if match and match.group():
            runs.append((match.start(), match.group()))
    return runs


def extract_country_candidates(first_page_text: str) -> list[CountryCandidate]:
    """Capitalized token runs at line ends or before postal/email patterns
    in the affiliation zone; deduplicated by surface, first offset kept."""
    seen: set[str] = set()
    candidates: list[CountryCandidate] = []
    for line_offset, line in _affiliation_zone(first_page_text):
        for start, surface in sorted(_runs_in_line(line)):
            if surface in seen:
                continue
            seen.add(surface)
            candidates.append(CountryCandidate(surface, line_offset + start))
    return candidates


_AFFILIATION_RE = re.compile(
    r"universit|institute|college|laborator|dept|department", re.IGNORECASE
)


def extract_affiliation_candidates(first_page_text: str) -> list[str]:
    """Whole affiliation-zone lines naming an institution."""
    out = []
    for _, line in _affiliation_zone(first_page_text):
        if _AFFILIATION_RE.search(line):
            trimmed = line.strip()
            if trimmed and trimmed not in out:
                out.append(trimmed)
    return out


# ---------------------------------------------------------------------------
# query construction

def _quote(surface: str) -> str:
    return '"' + surface.replace("\\", "\\\\").replace('"', '\\"') + '"'


def build_country_query(candidates: list[str], class_iri: str = DEFAULT_CLASS) -> str:
    """The redirect-union lookup query; matches an entity by its own label
    or through a redirect page's label."""
    if not candidates:
        raise EmptyCandidateList()
    values = " ".join(_quote(c) for c in candidates)
    return QUERY_TEMPLATE.replace("{VALUES}", values).replace("{CLASS}", class_iri)


# ---------------------------------------------------------------------------
# transports

_VALUES_BLOCK_RE = re.compile(r"VALUES \?search \{ (.*?) \}")
_QUOTED_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')


def _surfaces_in_query(query: str) -> list[str]:
    match = _VALUES_BLOCK_RE.search(query)
    if not match:
        return []
    return [
        m.group(1).replace('\\"', '"').replace("\\\\", "\\")
        for m in _QUOTED_RE.finditer(match.group(1))
    ]


class MockTransport:
    """Serves canned SPARQL JSON results from a fixture directory.

    An optional ``index.json`` maps surfaces to result files; otherwise
    files are matched by slugified surface. Result rows may carry an
    extra ``search`` binding naming the matched surface.
    """

    def __init__(self, fixture_dir):
        self.fixture_dir = Path(fixture_dir)
        index_path = self.fixture_dir / "index.json"
        if index_path.is_file():
            self.index = json.loads(index_path.read_text("utf-8"))
        else:
            self.index = {}

    def _file_for(self, surface: str) -> Optional[Path]:
        if surface in self.index:
            return self.fixture_dir / self.index[surface]
        candidate = self.fixture_dir / (re.sub(r"[^a-z0-9]+", "-", surface.lower()).strip("-") + ".json")
        return candidate if candidate.is_file() else None

    def execute(self, query: str) -> dict:
        bindings = []
        for surface in _surfaces_in_query(query):
            path = self._file_for(surface)
            if path is None or not path.is_file():
                continue
            payload = json.loads(path.read_text("utf-8"))
            for row in payload.get("results", {}).get("bindings", []):
                row = dict(row)
                row.setdefault("search", {"type": "literal", "value": surface})
                bindings.append(row)
        return {"head": {"vars": ["country"]}, "results": {"bindings": bindings}}


class HttpTransport:
    """Queries a live SPARQL protocol endpoint over HTTP GET."""

    def __init__(self, endpoint_iri: str, timeout: float = 30.0):
        self.endpoint_iri = endpoint_iri
        self.timeout = timeout

    def execute(self, query: str) -> dict:
        import requests

        response = requests.get(
            self.endpoint_iri,
            params={"query": query},
            headers={"Accept": "application/sparql-results+json"},
            timeout=self.timeout,
        )
        response.raise_for_status()
        return response.json()


def make_transport(endpoint: str, timeout: float = 30.0):
    if endpoint.startswith("mock:"):
        return MockTransport(endpoint[len("mock:"):])
    return HttpTransport(endpoint, timeout)


# ---------------------------------------------------------------------------
# linking

def _iri_local_name(iri: str) -> str:
    local = re.split(r"[/#]", iri.rstrip("/#"))[-1]
    return local.replace("_", " ")


def link_countries(candidates, config: EndpointConfig, transport) -> list[LinkedCountry]:
    """Resolve candidate surfaces to knowledge-base IRIs.

    One query per batch of at most 50 candidates; candidates with no
    binding are dropped as false positives; duplicate IRIs collapse.
    """
    surfaces = [c.surface if isinstance(c, CountryCandidate) else c for c in candidates]
    linked: list[LinkedCountry] = []
    seen: set[str] = set()
    for start in range(0, len(surfaces), BATCH_SIZE):
        batch = surfaces[start:start + BATCH_SIZE]
        query = build_country_query(batch, config.class_iri)
        payload = _execute_with_retries(transport, query, config)
        try:
            rows = payload["results"]["bindings"]
        except (KeyError, TypeError) as exc:
            raise MalformedResponse(str(exc)) from exc
        for row in rows:
            try:
                iri_value = row["country"]["value"]
            except (KeyError, TypeError) as exc:
                raise MalformedResponse(f"row without country binding: {row!r}") from exc
            if iri_value in seen:
                continue
            seen.add(iri_value)
            surface = row.get("search", {}).get("value") or row.get("label", {}).get("value")
            linked.append(LinkedCountry(surface or _iri_local_name(iri_value), Iri(iri_value)))
    return linked


def _execute_with_retries(transport, query: str, config: EndpointConfig) -> dict:
    last_error = None
    for attempt in range(config.retries):
        try:
            return transport.execute(query)
        except MalformedResponse:
            raise
        except Exception as exc:
            last_error = exc
            if attempt + 1 < config.retries and config.backoff > 0:
                time.sleep(config.backoff)
    raise EndpointUnreachable(config.endpoint_iri, config.retries, last_error)


def attach_country_triples(paper_iri: Iri, linked: list[LinkedCountry]) -> TripleGraph:
    graph = TripleGraph()
    for country in linked:
        graph.add(paper_iri, DBPEDIA_COUNTRY, country.iri)
    return graph
