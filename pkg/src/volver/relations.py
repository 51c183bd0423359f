"""Previous-edition classification for workshop seeAlso links.

Volume-to-volume links are only raw hints; a workshop pair is confirmed
as editions of the same workshop when its full names or acronyms are
similar enough. Scores are exact rationals so threshold comparisons and
golden values never suffer float drift.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .rdf import Iri, IriPolicy, SKOS_RELATED, TripleGraph, mint_workshop
from .records import VolumeRecord, WorkshopRecord

SimilarityScore = Fraction

Threshold = Union[Fraction, float]


def generate_acronym(full_name: str) -> str:
    """Concatenate the name's uppercase letters, in order."""
    return "".join(ch for ch in full_name if ch.isalpha() and ch.isupper())


def matched_total(a: str, b: str) -> int:
    """Total matched characters: the maximum over all non-crossing
    common-substring decompositions of the two strings.

    Computed as the longest-common-subsequence length (every decomposition
    block splits into single-character blocks, so the maxima coincide).
    Symmetric by construction.
    """
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        current = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[len(b)]


def ratcliff_obershelp(a: str, b: str) -> SimilarityScore:
    """Gestalt similarity 2*M/(|a|+|b|) with M from :func:`matched_total`;
    two empty strings count as identical."""
    if not a and not b:
        return Fraction(1)
    return Fraction(2 * matched_total(a, b), len(a) + len(b))


_YEAR_TOKEN_RE = re.compile(r"\b(?:19|20)\d{2}\b|['’]\d{2}\b")


def _normalize_name(name: str) -> str:
    name = _YEAR_TOKEN_RE.sub(" ", name)
    return " ".join(name.upper().split())


def _normalize_acronym(acronym: str) -> str:
    return re.sub(r"['’]?\d+", "", acronym).strip()


def workshop_similarity(w1: WorkshopRecord, w2: WorkshopRecord) -> tuple[SimilarityScore, SimilarityScore]:
    """(name score, acronym score) for a workshop pair.

    Names are uppercased, whitespace-collapsed and year-stripped before
    scoring. A missing acronym is generated from the full name; if either
    side still has none, the acronym score is 0.
    """
    name_score = ratcliff_obershelp(_normalize_name(w1.full_name), _normalize_name(w2.full_name))
    acronyms = []
    for workshop in (w1, w2):
        if workshop.acronym:
            acronyms.append(_normalize_acronym(workshop.acronym))
        else:
            acronyms.append(generate_acronym(workshop.full_name))
    if not acronyms[0] or not acronyms[1]:
        acronym_score = Fraction(0)
    else:
        acronym_score = ratcliff_obershelp(acronyms[0], acronyms[1])
    return name_score, acronym_score


@dataclass(frozen=True)
class RelationDecision:
    source_workshop: Iri
    target_workshop: Iri
    name_score: SimilarityScore
    acronym_score: SimilarityScore
    accepted: bool


def classify_relations(volume: VolumeRecord, candidate_volumes: list[VolumeRecord],
                       threshold: Threshold, policy: IriPolicy) -> tuple[TripleGraph, list[RelationDecision]]:
    """Score every workshop pair between a volume and its seeAlso targets.

    Accepted pairs (max of the two scores at or above the threshold) get
    one skos:related triple each; every decision is returned for audit.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    graph = TripleGraph()
    decisions: list[RelationDecision] = []
    for i, workshop in enumerate(volume.workshops, start=1):
        source = mint_workshop(policy, volume.volume_number, i)
        for candidate in candidate_volumes:
            for j, other in enumerate(candidate.workshops, start=1):
                target = mint_workshop(policy, candidate.volume_number, j)
                name_score, acronym_score = workshop_similarity(workshop, other)
                accepted = max(name_score, acronym_score) >= threshold
                decisions.append(
                    RelationDecision(source, target, name_score, acronym_score, accepted)
                )
                if accepted:
                    graph.add(source, SKOS_RELATED, target)
    return graph, decisions


def format_decision(decision: RelationDecision) -> str:
    return "\t".join(
        [
            decision.source_workshop.value,
            decision.target_workshop.value,
            f"{float(decision.name_score):.6f}",
            f"{float(decision.acronym_score):.6f}",
            "ACCEPT" if decision.accepted else "REJECT",
        ]
    )


def write_audit_log(decisions: list[RelationDecision], path) -> None:
    lines = [format_decision(d) for d in decisions]
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + ("\n" if lines else ""))
