"""Blank-node-free triple graph, deterministic minting and serialization.

Subjects and predicates are IRIs by construction, so blank nodes cannot
be represented at all. N-Triples output is canonical: one triple per
line, UTF-8, lines sorted, which makes golden-file comparison and
byte-identical reruns possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from typing import Optional, Union

from .errors import InvalidInterval, UnmintableEntity
from .records import PaperRecord, PersonRecord, VolumeRecord, WorkshopRecord

NAMESPACES = {
    "swc": "http://data.semanticweb.org/ns/swc/ontology#",
    "swrc": "http://swrc.ontoware.org/ontology#",
    "bibo": "http://purl.org/ontology/bibo/",
    "timeline": "http://purl.org/NET/c4dm/timeline.owl#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "dc": "http://purl.org/dc/elements/1.1/",
    "dcterms": "http://purl.org/dc/terms/",
    "dbpedia-owl": "http://dbpedia.org/ontology/",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "skos": "http://www.w3.org/2004/02/skos/core#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or any(c.isspace() for c in self.value):
            raise ValueError(f"IRI must be non-empty without whitespace: {self.value!r}")
        if ":" not in self.value:
            raise ValueError(f"IRI must be absolute: {self.value!r}")


def term(prefix: str, local: str) -> Iri:
    return Iri(NAMESPACES[prefix] + local)


RDF_TYPE = term("rdf", "type")
RDFS_LABEL = term("rdfs", "label")
RDFS_SEEALSO = term("rdfs", "seeAlso")
SKOS_RELATED = term("skos", "related")
DCTERMS_TITLE = term("dcterms", "title")
DCTERMS_ISSUED = term("dcterms", "issued")
DCTERMS_PART_OF = term("dcterms", "partOf")
DCTERMS_CREATOR = term("dcterms", "creator")
DC_TYPE = term("dc", "type")
BIBO_VOLUME = term("bibo", "volume")
BIBO_PRESENTED_AT = term("bibo", "presentedAt")
BIBO_PAGE_START = term("bibo", "pageStart")
BIBO_PAGE_END = term("bibo", "pageEnd")
SWRC_PROCEEDINGS = term("swrc", "Proceedings")
SWRC_INPROCEEDINGS = term("swrc", "InProceedings")
SWRC_EDITOR = term("swrc", "editor")
SWC_WORKSHOP_EVENT = term("swc", "WorkshopEvent")
FOAF_NAME = term("foaf", "name")
TIMELINE_AT_DATE = term("timeline", "atDate")
TIMELINE_BEGINS = term("timeline", "beginsAtDateTime")
TIMELINE_ENDS = term("timeline", "endsAtDateTime")
DBPEDIA_COUNTRY = term("dbpedia-owl", "country")
DBPEDIA_LOCATION = term("dbpedia-owl", "location")
XSD_DATE = term("xsd", "date")
XSD_DATETIME = term("xsd", "dateTime")
XSD_INTEGER = term("xsd", "integer")
XSD_GYEAR = term("xsd", "gYear")


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[Iri] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal has either a datatype or a language tag")


Node = Union[Iri, Literal]


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Node


@dataclass
class TripleGraph:
    triples: set = field(default_factory=set)
    namespaces: dict = field(default_factory=lambda: dict(NAMESPACES))

    def add(self, subject: Iri, predicate: Iri, obj: Node) -> None:
        self.triples.add(Triple(subject, predicate, obj))

    def union(self, other: "TripleGraph") -> "TripleGraph":
        merged = TripleGraph(set(self.triples), dict(self.namespaces))
        merged.triples |= other.triples
        merged.namespaces.update(other.namespaces)
        return merged

    __or__ = union

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __eq__(self, other):
        return isinstance(other, TripleGraph) and self.triples == other.triples

    def subjects(self, predicate: Optional[Iri] = None, obj: Optional[Node] = None) -> set:
        return {
            t.subject
            for t in self.triples
            if (predicate is None or t.predicate == predicate)
            and (obj is None or t.object == obj)
        }

    def objects(self, subject: Optional[Iri] = None, predicate: Optional[Iri] = None) -> set:
        return {
            t.object
            for t in self.triples
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
        }


# ---------------------------------------------------------------------------
# IRI minting

@dataclass(frozen=True)
class IriPolicy:
    base: Iri

    @property
    def base_str(self) -> str:
        value = self.base.value
        return value if value.endswith("/") else value + "/"


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slug(text: str) -> str:
    return _SLUG_RE.sub("-", text.lower()).strip("-")


def mint_volume(policy: IriPolicy, record: VolumeRecord) -> Iri:
    if not record.source_iri:
        raise UnmintableEntity("volume record without source_iri")
    return Iri(record.source_iri)


def mint_workshop(policy: IriPolicy, volume_number: int, position: int) -> Iri:
    return Iri(f"{policy.base_str}vol-{volume_number}/workshop-{position}")


def mint_person(policy: IriPolicy, person: PersonRecord) -> Iri:
    name_slug = slug(person.full_name)
    if not name_slug:
        raise UnmintableEntity(f"person name {person.full_name!r} yields empty slug")
    return Iri(f"{policy.base_str}person/{name_slug}")


def mint_paper(policy: IriPolicy, volume_number: int, paper: PaperRecord,
               taken: Optional[set] = None) -> Iri:
    if paper.pdf_href:
        return Iri(paper.pdf_href)
    title_slug = slug(paper.title)
    if not title_slug:
        raise UnmintableEntity(f"paper title {paper.title!r} yields empty slug")
    candidate = f"{policy.base_str}vol-{volume_number}/paper-{title_slug}"
    if taken is not None:
        suffix = 2
        unique = candidate
        while unique in taken:
            unique = f"{candidate}-{suffix}"
            suffix += 1
        taken.add(unique)
        candidate = unique
    return Iri(candidate)


def mint(policy: IriPolicy, entity, **context) -> Iri:
    """Deterministic IRI for any record; context carries the discriminators
    a pattern needs (volume_number, position, taken)."""
    if isinstance(entity, VolumeRecord):
        return mint_volume(policy, entity)
    if isinstance(entity, WorkshopRecord):
        return mint_workshop(policy, context["volume_number"], context["position"])
    if isinstance(entity, PersonRecord):
        return mint_person(policy, entity)
    if isinstance(entity, PaperRecord):
        return mint_paper(policy, context["volume_number"], entity, context.get("taken"))
    raise UnmintableEntity(f"no minting pattern for {type(entity).__name__}")


# ---------------------------------------------------------------------------
# emission

def emit_volume(record: VolumeRecord, policy: IriPolicy) -> TripleGraph:
    graph = TripleGraph()
    proceedings = mint_volume(policy, record)
    graph.add(proceedings, RDF_TYPE, SWRC_PROCEEDINGS)
    graph.add(proceedings, DCTERMS_TITLE, Literal(record.full_title))
    graph.add(proceedings, BIBO_VOLUME, Literal(str(record.volume_number)))
    if record.pub_year is not None:
        graph.add(proceedings, DCTERMS_ISSUED, Literal(str(record.pub_year), XSD_GYEAR))

    for position, workshop in enumerate(record.workshops, start=1):
        w_iri = mint_workshop(policy, record.volume_number, position)
        graph.add(w_iri, RDF_TYPE, SWC_WORKSHOP_EVENT)
        graph.add(w_iri, DCTERMS_TITLE, Literal(workshop.full_name))
        if workshop.acronym:
            graph.add(w_iri, RDFS_LABEL, Literal(workshop.acronym))
        if record.location:
            graph.add(w_iri, DBPEDIA_LOCATION, Literal(record.location))
        graph.add(proceedings, BIBO_PRESENTED_AT, w_iri)

    for editor in record.editors:
        person = mint_person(policy, editor)
        graph.add(proceedings, SWRC_EDITOR, person)
        graph.add(person, FOAF_NAME, Literal(editor.full_name))

    taken: set = set()
    for paper in record.papers:
        p_iri = mint_paper(policy, record.volume_number, paper, taken)
        graph.add(p_iri, RDF_TYPE, SWRC_INPROCEEDINGS)
        graph.add(p_iri, DCTERMS_TITLE, Literal(paper.title))
        graph.add(p_iri, DCTERMS_PART_OF, proceedings)
        if paper.is_invited:
            graph.add(p_iri, DC_TYPE, Literal("invited"))
        if paper.page_start is not None:
            graph.add(p_iri, BIBO_PAGE_START, Literal(str(paper.page_start), XSD_INTEGER))
        if paper.page_end is not None:
            graph.add(p_iri, BIBO_PAGE_END, Literal(str(paper.page_end), XSD_INTEGER))
        for author in paper.authors:
            a_iri = mint_person(policy, author)
            graph.add(p_iri, DCTERMS_CREATOR, a_iri)
            graph.add(a_iri, FOAF_NAME, Literal(author.full_name))
    return graph


def emit_timeline(workshop_iri: Iri, start: date, end: date) -> TripleGraph:
    """Single date as timeline:atDate, interval as begins/ends datetimes."""
    if start > end:
        raise InvalidInterval(start, end)
    graph = TripleGraph()
    if start == end:
        graph.add(workshop_iri, TIMELINE_AT_DATE, Literal(start.isoformat(), XSD_DATE))
    else:
        graph.add(
            workshop_iri, TIMELINE_BEGINS, Literal(f"{start.isoformat()}T00:00:00", XSD_DATETIME)
        )
        graph.add(
            workshop_iri, TIMELINE_ENDS, Literal(f"{end.isoformat()}T23:59:59", XSD_DATETIME)
        )
    return graph


def emit_see_also(volume_iri: Iri, targets: list[Iri]) -> TripleGraph:
    graph = TripleGraph()
    for target in targets:
        graph.add(volume_iri, RDFS_SEEALSO, target)
    return graph


def sibling_volume_iri(source_iri: str, target_number: int) -> Iri:
    """IRI of another volume on the same site, derived from this page's
    own Vol-N pattern."""
    replaced, n = re.subn(r"Vol-\d+", f"Vol-{target_number}", source_iri)
    if n == 0:
        replaced = source_iri.rstrip("/") + f"/Vol-{target_number}/"
    return Iri(replaced)


def volume_graph(record: VolumeRecord, policy: IriPolicy) -> TripleGraph:
    """Full per-volume graph: metadata plus timeline and seeAlso links."""
    graph = emit_volume(record, policy)
    if record.event_start and record.event_end:
        for position in range(1, len(record.workshops) + 1):
            w_iri = mint_workshop(policy, record.volume_number, position)
            graph = graph | emit_timeline(w_iri, record.event_start, record.event_end)
    targets = [sibling_volume_iri(record.source_iri, n) for n in record.see_also_volumes]
    return graph | emit_see_also(mint_volume(policy, record), targets)


# ---------------------------------------------------------------------------
# serialization

def _escape(lexical: str) -> str:
    out = []
    for ch in lexical:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _node_nt(node: Node) -> str:
    if isinstance(node, Iri):
        return f"<{node.value}>"
    rendered = f'"{_escape(node.lexical)}"'
    if node.datatype is not None:
        rendered += f"^^<{node.datatype.value}>"
    elif node.language is not None:
        rendered += f"@{node.language}"
    return rendered


def _nt_lines(graph: TripleGraph) -> list[str]:
    return sorted(
        f"{_node_nt(t.subject)} {_node_nt(t.predicate)} {_node_nt(t.object)} ."
        for t in graph.triples
    )


def _prefixed(iri: Iri, namespaces: dict) -> Optional[str]:
    for prefix, base in namespaces.items():
        if iri.value.startswith(base):
            local = iri.value[len(base):]
            if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\-]*", local):
                return f"{prefix}:{local}"
    return None


def _node_ttl(node: Node, namespaces: dict) -> str:
    if isinstance(node, Iri):
        return _prefixed(node, namespaces) or f"<{node.value}>"
    rendered = f'"{_escape(node.lexical)}"'
    if node.datatype is not None:
        rendered += "^^" + (_prefixed(node.datatype, namespaces) or f"<{node.datatype.value}>")
    elif node.language is not None:
        rendered += f"@{node.language}"
    return rendered


def serialize(graph: TripleGraph, format: str = "ntriples") -> bytes:
    if format in ("ntriples", "nt"):
        lines = _nt_lines(graph)
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
    if format in ("turtle", "ttl"):
        ns = graph.namespaces
        header = [f"@prefix {p}: <{iri}> ." for p, iri in sorted(ns.items())]
        body = sorted(
            f"{_node_ttl(t.subject, ns)} {_node_ttl(t.predicate, ns)} {_node_ttl(t.object, ns)} ."
            for t in graph.triples
        )
        return ("\n".join(header + [""] + body) + "\n").encode("utf-8")
    raise ValueError(f"unknown serialization format {format!r}")


_NT_LINE_RE = re.compile(
    r"^<([^>\s]+)>\s+<([^>\s]+)>\s+"
    r"(?:<([^>\s]+)>|\"((?:[^\"\\]|\\.)*)\"(?:\^\^<([^>\s]+)>|@([A-Za-z][A-Za-z0-9\-]*))?)"
    r"\s*\.$"
)

_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt in _UNESCAPES:
                out.append(_UNESCAPES[nxt])
                i += 2
                continue
            if nxt in ("u", "U"):
                width = 4 if nxt == "u" else 8
                out.append(chr(int(text[i + 2 : i + 2 + width], 16)))
                i += 2 + width
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def parse_ntriples(data: bytes) -> TripleGraph:
    graph = TripleGraph()
    # split on newline only: other line-break codepoints may appear raw
    # inside literals
    for lineno, raw in enumerate(data.decode("utf-8").split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _NT_LINE_RE.match(line)
        if not match:
            raise ValueError(f"bad N-Triples line {lineno}: {raw!r}")
        subject = Iri(match.group(1))
        predicate = Iri(match.group(2))
        if match.group(3) is not None:
            obj: Node = Iri(match.group(3))
        else:
            obj = Literal(
                _unescape(match.group(4)),
                Iri(match.group(5)) if match.group(5) else None,
                match.group(6),
            )
        graph.add(subject, predicate, obj)
    return graph
