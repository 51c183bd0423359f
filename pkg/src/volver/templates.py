"""Template registry and the first-valid-wins extraction cascade.

Each content kind owns an ordered list of templates. Extraction runs
them by ascending priority and returns the first structurally valid
record; later templates are never consulted once one wins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Union

from .corpus import ContentKind, PageDocument
from .errors import DuplicatePriority, NoTemplateMatched
from .records import ExtractionRecord, IndexRecord, VolumeRecord

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matched:
    record: ExtractionRecord


@dataclass(frozen=True)
class NotApplicable:
    pass


@dataclass(frozen=True)
class Invalid:
    reasons: tuple[str, ...]


MatchOutcome = Union[Matched, NotApplicable, Invalid]


@dataclass(frozen=True)
class Template:
    id: str
    kind: ContentKind
    priority: int
    matcher: Callable[[PageDocument], MatchOutcome]


@dataclass
class TemplateRegistry:
    _by_kind: dict = field(default_factory=dict)

    def templates_for(self, kind: ContentKind) -> list[Template]:
        return list(self._by_kind.get(kind, []))

    def __contains__(self, kind: ContentKind) -> bool:
        return bool(self._by_kind.get(kind))


def register_template(registry: TemplateRegistry, template: Template) -> TemplateRegistry:
    slots = registry._by_kind.setdefault(template.kind, [])
    if any(t.priority == template.priority for t in slots):
        raise DuplicatePriority(template.kind, template.priority)
    slots.append(template)
    slots.sort(key=lambda t: t.priority)
    return registry


def validate_record(record: ExtractionRecord) -> list[str]:
    """Structural validation; returns the missing/invalid field names."""
    defects: list[str] = []
    if isinstance(record, IndexRecord):
        if not record.entries:
            defects.append("entries")
        for k, entry in enumerate(record.entries):
            if not entry.volume_number:
                defects.append(f"entries[{k}].volume_number")
            if not entry.label:
                defects.append(f"entries[{k}].label")
        return defects
    assert isinstance(record, VolumeRecord)
    if not record.volume_number:
        defects.append("volume_number")
    if not record.full_title.strip():
        defects.append("full_title")
    if not record.editors:
        defects.append("editors")
    if not record.papers:
        defects.append("papers")
    for k, paper in enumerate(record.papers):
        if not paper.title.strip():
            defects.append(f"papers[{k}].title")
    return defects


def _log_outcome(template: Template, page: PageDocument, outcome: MatchOutcome) -> None:
    if isinstance(outcome, Matched):
        status = "MATCHED"
    elif isinstance(outcome, NotApplicable):
        status = "NOT_APPLICABLE"
    else:
        status = "INVALID:" + ",".join(outcome.reasons)
    log.info("TEMPLATE %s %s %s %s", template.id, template.kind.value, page.source_iri, status)


def extract_with_winner(registry: TemplateRegistry, page: PageDocument) -> tuple[ExtractionRecord, Template]:
    """Run the cascade for ``page.kind``; first valid template wins.

    Returns the winning record and template. Templates ranked after the
    winner are never invoked.
    """
    templates = registry.templates_for(page.kind)
    if not templates:
        raise NoTemplateMatched(page.source_iri, [("-", "no templates registered")])
    reasons: list[tuple[str, str]] = []
    for template in templates:
        outcome = template.matcher(page)
        if isinstance(outcome, Matched):
            defects = validate_record(outcome.record)
            if defects:
                outcome = Invalid(tuple(defects))
        _log_outcome(template, page, outcome)
        if isinstance(outcome, Matched):
            return outcome.record, template
        if isinstance(outcome, NotApplicable):
            reasons.append((template.id, "not applicable"))
        else:
            reasons.append((template.id, "invalid: " + ",".join(outcome.reasons)))
    raise NoTemplateMatched(page.source_iri, reasons)


def extract(registry: TemplateRegistry, page: PageDocument) -> ExtractionRecord:
    return extract_with_winner(registry, page)[0]
