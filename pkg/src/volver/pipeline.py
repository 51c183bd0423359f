"""End-to-end orchestration: corpus -> cascade -> linking -> relations.

A volume failing extraction is recorded and skipped, never fatal. All
merges are set unions and serialization is sorted, so the output is
byte-identical regardless of scheduling.
"""

from __future__ import annotations

import concurrent.futures
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import ContentKind, CorpusManifest, PageDocument, read_page
from .errors import EndpointUnreachable, NoTemplateMatched, VolverError
from .linking import (
    EndpointConfig,
    attach_country_triples,
    extract_country_candidates,
    link_countries,
)
from .rdf import IriPolicy, TripleGraph, mint_paper, serialize, slug, volume_graph
from .records import IndexRecord, VolumeRecord
from .relations import RelationDecision, classify_relations, write_audit_log
from .templates import TemplateRegistry, extract_with_winner

log = logging.getLogger(__name__)


@dataclass
class RunReport:
    volumes_attempted: int = 0
    volumes_extracted: int = 0
    template_wins: dict = field(default_factory=dict)
    papers_linked: int = 0
    relations_accepted: int = 0
    failures: list = field(default_factory=list)  # (volume_id, error string)
    linking_failures: list = field(default_factory=list)  # (paper IRI, error string)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "volumes_attempted": self.volumes_attempted,
            "volumes_extracted": self.volumes_extracted,
            "template_wins": dict(sorted(self.template_wins.items())),
            "papers_linked": self.papers_linked,
            "relations_accepted": self.relations_accepted,
            "failures": [[vid, err] for vid, err in self.failures],
            "linking_failures": [[iri, err] for iri, err in self.linking_failures],
            "notes": list(self.notes),
        }


def _attach_sidecars(manifest: CorpusManifest, volume_id: int, record: VolumeRecord) -> None:
    """Match first-page text files to papers by slugified title."""
    sidecars = {Path(e.path).stem: e.path for e in manifest.paper_text_entries(volume_id)}
    for paper in record.papers:
        ref = sidecars.get(slug(paper.title))
        if ref is not None:
            paper.first_page_text_ref = ref


def _link_volume(manifest: CorpusManifest, record: VolumeRecord, policy: IriPolicy,
                 config: EndpointConfig, transport, report: RunReport) -> TripleGraph:
    graph = TripleGraph()
    taken: set = set()
    for paper in record.papers:
        paper_iri = mint_paper(policy, record.volume_number, paper, taken)
        if not paper.first_page_text_ref:
            continue
        text = (manifest.corpus_root / paper.first_page_text_ref).read_text("utf-8")
        candidates = extract_country_candidates(text)
        if not candidates:
            continue
        try:
            linked = link_countries(candidates, config, transport)
        except VolverError as exc:
            report.linking_failures.append((paper_iri.value, str(exc)))
            continue
        if linked:
            report.papers_linked += 1
            graph = graph | attach_country_triples(paper_iri, linked)
    return graph


def run(manifest: CorpusManifest, registry: TemplateRegistry, config: EndpointConfig,
        threshold, policy: IriPolicy, out_dir, transport=None, parallelism: int = 1,
        formats: tuple = ("ntriples",)) -> RunReport:
    """Extract every page, link papers with text sidecars, classify the
    seeAlso relations and merge everything into ``dataset.nt``."""
    if ContentKind.VOLUME_PAGE not in registry:
        raise ValueError("registry has no volume templates")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport()

    # index is informative only; its absence or failure is a note
    try:
        index_page = read_page(manifest, None)
        index_record = extract_with_winner(registry, index_page)[0]
        assert isinstance(index_record, IndexRecord)
    except VolverError as exc:
        report.notes.append(f"index extraction skipped: {exc}")

    volume_ids = [e.volume_id for e in manifest.volume_entries()]
    report.volumes_attempted = len(volume_ids)

    def extract_one(volume_id: int):
        page = read_page(manifest, volume_id)
        return volume_id, extract_with_winner(registry, page)

    records: dict[int, VolumeRecord] = {}
    wins: dict[int, str] = {}
    if parallelism > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = pool.map(_trap(extract_one), volume_ids)
    else:
        results = map(_trap(extract_one), volume_ids)
    for volume_id, outcome in zip(volume_ids, results):
        if isinstance(outcome, Exception):
            report.failures.append((volume_id, str(outcome)))
            continue
        _, (record, template) = outcome
        records[volume_id] = record
        wins[volume_id] = template.id
        report.template_wins[template.id] = report.template_wins.get(template.id, 0) + 1
    report.volumes_extracted = len(records)

    dataset = TripleGraph()
    for volume_id in sorted(records):
        record = records[volume_id]
        graph = volume_graph(record, policy)
        (out_dir / f"vol-{volume_id}.nt").write_bytes(serialize(graph, "ntriples"))
        dataset = dataset | graph

        _attach_sidecars(manifest, volume_id, record)
        if transport is not None:
            dataset = dataset | _link_volume(manifest, record, policy, config, transport, report)

    decisions: list[RelationDecision] = []
    for volume_id in sorted(records):
        record = records[volume_id]
        if not record.see_also_volumes:
            continue
        candidates = []
        for target in record.see_also_volumes:
            if target in records:
                candidates.append(records[target])
            else:
                report.notes.append(f"Vol-{volume_id}: seeAlso target Vol-{target} not in corpus")
        if not candidates:
            continue
        relation_graph, volume_decisions = classify_relations(record, candidates, threshold, policy)
        decisions.extend(volume_decisions)
        dataset = dataset | relation_graph
    report.relations_accepted = sum(1 for d in decisions if d.accepted)

    (out_dir / "dataset.nt").write_bytes(serialize(dataset, "ntriples"))
    if "turtle" in formats or "ttl" in formats:
        (out_dir / "dataset.ttl").write_bytes(serialize(dataset, "turtle"))
    write_audit_log(decisions, out_dir / "relations.tsv")
    (out_dir / "report.json").write_text(
        json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", "utf-8"
    )

    from .report import render_figures

    render_figures(report, decisions, threshold, out_dir)
    return report


def _trap(fn):
    """Wrap a worker so exceptions come back as values (keeps pool.map
    order aligned with inputs)."""

    def wrapped(arg):
        try:
            return fn(arg)
        except Exception as exc:  # fault isolation: any page may be broken
            return exc

    return wrapped
