"""Extraction result records and their JSON form.

The JSON shape produced by :func:`record_to_json` is the same one used
by the fixture expectation files and the ``extract`` CLI command.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Optional, Union


@dataclass
class PersonRecord:
    full_name: str
    role: str  # "Editor" | "Author"
    affiliation_text: Optional[str] = None

    def __post_init__(self):
        self.full_name = " ".join(self.full_name.split())
        if not self.full_name:
            raise ValueError("person name empty after whitespace normalization")
        if self.role not in ("Editor", "Author"):
            raise ValueError(f"bad role {self.role!r}")


@dataclass
class WorkshopRecord:
    full_name: str
    acronym: Optional[str] = None
    edition_ordinal: Optional[int] = None


@dataclass
class PaperRecord:
    title: str
    authors: list[PersonRecord]
    pdf_href: Optional[str] = None
    page_start: Optional[int] = None
    page_end: Optional[int] = None
    is_invited: bool = False
    first_page_text_ref: Optional[str] = None


@dataclass
class VolumeRecord:
    volume_number: int
    full_title: str
    workshops: list[WorkshopRecord]
    editors: list[PersonRecord]
    papers: list[PaperRecord]
    source_iri: str
    pub_year: Optional[int] = None
    location: Optional[str] = None
    event_start: Optional[date] = None
    event_end: Optional[date] = None
    see_also_volumes: list[int] = field(default_factory=list)


@dataclass
class VolumeSummary:
    volume_number: int
    label: str
    href: str


@dataclass
class IndexRecord:
    entries: list[VolumeSummary]


ExtractionRecord = Union[IndexRecord, VolumeRecord]


def _person_json(p: PersonRecord) -> dict:
    return {"full_name": p.full_name, "role": p.role, "affiliation_text": p.affiliation_text}


def record_to_json(record: ExtractionRecord) -> dict:
    if isinstance(record, IndexRecord):
        return {
            "entries": [
                {"volume_number": s.volume_number, "label": s.label, "href": s.href}
                for s in record.entries
            ]
        }
    return {
        "volume_number": record.volume_number,
        "full_title": record.full_title,
        "workshops": [
            {
                "full_name": w.full_name,
                "acronym": w.acronym,
                "edition_ordinal": w.edition_ordinal,
            }
            for w in record.workshops
        ],
        "editors": [_person_json(p) for p in record.editors],
        "papers": [
            {
                "title": p.title,
                "authors": [_person_json(a) for a in p.authors],
                "pdf_href": p.pdf_href,
                "page_start": p.page_start,
                "page_end": p.page_end,
                "is_invited": p.is_invited,
                "first_page_text_ref": p.first_page_text_ref,
            }
            for p in record.papers
        ],
        "pub_year": record.pub_year,
        "location": record.location,
        "event_start": record.event_start.isoformat() if record.event_start else None,
        "event_end": record.event_end.isoformat() if record.event_end else None,
        "see_also_volumes": list(record.see_also_volumes),
        "source_iri": record.source_iri,
    }
