"""Concrete extraction templates for the index and volume pages.

Four volume templates form the cascade: RDFa attributes, CEUR-style
microformat classes, and two heuristics for pages without any metadata
markup (heading-structured pages and the older plain-text-ish layout).
"""

from __future__ import annotations

import re
from datetime import date
from typing import Optional
from urllib.parse import urljoin

from .corpus import ContentKind, PageDocument, VOLUME_HREF_RE
from .errors import NoVolumesFound
from .records import (
    IndexRecord,
    PaperRecord,
    PersonRecord,
    VolumeRecord,
    VolumeSummary,
    WorkshopRecord,
)
from .soup import Element, collapse_ws, parse_page
from .templates import (
    Invalid,
    Matched,
    MatchOutcome,
    NotApplicable,
    Template,
    TemplateRegistry,
    register_template,
    validate_record,
)

# ---------------------------------------------------------------------------
# small parsing helpers

_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
    "eleventh": 11, "twelfth": 12, "thirteenth": 13, "fourteenth": 14,
    "fifteenth": 15, "sixteenth": 16, "seventeenth": 17, "eighteenth": 18,
    "nineteenth": 19, "twentieth": 20,
}

_ORDINAL_NUM_RE = re.compile(r"\b(\d+)(?:st|nd|rd|th)\b", re.IGNORECASE)

_MONTHS = {
    name: i + 1
    for i, name in enumerate(
        ["january", "february", "march", "april", "may", "june", "july",
         "august", "september", "october", "november", "december"]
    )
}
_MONTH_RE = "|".join(m.capitalize() for m in _MONTHS) + "|" + "|".join(
    m[:3].capitalize() for m in _MONTHS
)

def _day(name: str) -> str:
    return rf"(?P<{name}>\d{{1,2}})(?:st|nd|rd|th)?"


_LOCTIME_SINGLE_RE = re.compile(
    rf"^(?P<loc>.+?),\s*(?P<month>{_MONTH_RE})\s+{_day('d1')}(?:\s*[-–]\s*{_day('d2')})?,\s*(?P<year>\d{{4}})\.?$"
)
_LOCTIME_SPAN_RE = re.compile(
    rf"^(?P<loc>.+?),\s*(?P<m1>{_MONTH_RE})\s+{_day('d1')}\s+to\s+(?P<m2>{_MONTH_RE})\s+{_day('d2')},\s*(?P<year>\d{{4}})\.?$"
)

# a line that at least looks like "City, Country, <something with a year>"
_LOC_FALLBACK_RE = re.compile(r"^([^,]+),\s*([^,]+),\s+.*\b\d{4}\b\.?$")

_PAGES_RE = re.compile(r"\bpp?\.\s*(\d+)\s*[-–]\s*(\d+)", re.IGNORECASE)
_PAGES_PARENS_RE = re.compile(r"\((\d+)\s*[-–]\s*(\d+)\)\s*$")

_INVITED_RE = re.compile(r"invited", re.IGNORECASE)


def find_edition_ordinal(name: str) -> Optional[int]:
    match = _ORDINAL_NUM_RE.search(name)
    if match:
        return int(match.group(1))
    for token in re.findall(r"[A-Za-z]+", name):
        if token.lower() in _ORDINAL_WORDS:
            return _ORDINAL_WORDS[token.lower()]
    return None


def _month_number(token: str) -> int:
    token = token.lower()
    for name, num in _MONTHS.items():
        if name == token or name[:3] == token:
            return num
    raise ValueError(token)


def parse_loctime(text: str) -> tuple[Optional[str], Optional[date], Optional[date]]:
    """Parse a ``City, Country, Month D[-D2], YYYY`` style line.

    Total: anything unparseable yields (None, None, None), never an
    error. A single date is returned as start == end.
    """
    text = collapse_ws(text)
    match = _LOCTIME_SINGLE_RE.match(text)
    if match:
        try:
            year = int(match.group("year"))
            month = _month_number(match.group("month"))
            start = date(year, month, int(match.group("d1")))
            end = date(year, month, int(match.group("d2"))) if match.group("d2") else start
        except ValueError:
            return None, None, None
        if start > end:
            return None, None, None
        return match.group("loc"), start, end
    match = _LOCTIME_SPAN_RE.match(text)
    if match:
        try:
            year = int(match.group("year"))
            start = date(year, _month_number(match.group("m1")), int(match.group("d1")))
            end = date(year, _month_number(match.group("m2")), int(match.group("d2")))
        except ValueError:
            return None, None, None
        if start > end:
            return None, None, None
        return match.group("loc"), start, end
    return None, None, None


def _loctime_or_location(text: str) -> tuple[Optional[str], Optional[date], Optional[date]]:
    """Parse a known location/date line, keeping the location verbatim
    when the date grammar does not apply (e.g. German month names)."""
    loc, start, end = parse_loctime(text)
    if loc is not None:
        return loc, start, end
    match = _LOC_FALLBACK_RE.match(collapse_ws(text))
    if match:
        return f"{match.group(1).strip()}, {match.group(2).strip()}", None, None
    return None, None, None


_JOINT_RE = re.compile(r"joint proceedings|co-located", re.IGNORECASE)
_PREAMBLE_RE = re.compile(r"^(joint\s+)?proceedings\s+of\s+(the\s+)?", re.IGNORECASE)
_COLOCATED_SPLIT_RE = re.compile(r",?\s*co-located\s+with\b.*$", re.IGNORECASE)

# connectors only split before a determiner/ordinal-looking segment start,
# so conjunctions inside a single workshop name survive
_SEGMENT_HEAD = r"(?:the|first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth|\d+(?:st|nd|rd|th))\b"
_CONNECTOR_RE = re.compile(
    rf"\s+(?:and|&)\s+(?={_SEGMENT_HEAD})|,\s+(?={_SEGMENT_HEAD})",
    re.IGNORECASE,
)

_ACRONYM_PAREN_RE = re.compile(r"\(([^()]*)\)\s*$")
_ACRONYM_TOKEN_RE = re.compile(r"^([A-Z][A-Za-z0-9&]+)")


def _parse_workshop_segment(segment: str) -> WorkshopRecord:
    segment = segment.strip(" ,;")
    acronym = None
    match = _ACRONYM_PAREN_RE.search(segment)
    if match:
        token = _ACRONYM_TOKEN_RE.match(match.group(1).strip())
        if token:
            acronym = token.group(1)
        segment = segment[: match.start()].strip(" ,;")
    name = re.sub(r"^the\s+", "", segment, flags=re.IGNORECASE).strip()
    return WorkshopRecord(
        full_name=name or segment,
        acronym=acronym,
        edition_ordinal=find_edition_ordinal(name),
    )


def parse_joint_title(full_title: str) -> list[WorkshopRecord]:
    """Split a proceedings title into its workshops.

    Joint/co-located titles split on " and ", " & " and list commas;
    every other title yields a single workshop.
    """
    title = collapse_ws(full_title)
    if not title:
        raise ValueError("full_title must be non-empty")
    if _JOINT_RE.search(title):
        main = _COLOCATED_SPLIT_RE.sub("", title)
        main = _PREAMBLE_RE.sub("", main)
        segments = [s for s in _CONNECTOR_RE.split(main) if s and s.strip()]
        workshops = [_parse_workshop_segment(s) for s in segments]
        if workshops:
            return workshops
    stripped = _PREAMBLE_RE.sub("", title)
    return [_parse_workshop_segment(stripped)]


def collect_see_also(page: PageDocument) -> list[int]:
    """Volume numbers linked from this page, excluding the page itself."""
    doc = parse_page(page.body)
    own = _volume_number(page)
    found: set[int] = set()
    for anchor in doc.find_all("a"):
        href = anchor.attrs.get("href") or ""
        match = VOLUME_HREF_RE.search(href)
        if match:
            found.add(int(match.group(1)))
    found.discard(own)
    return sorted(found)


def _volume_number(page: PageDocument) -> Optional[int]:
    if page.volume_id is not None:
        return page.volume_id
    match = VOLUME_HREF_RE.search(page.source_iri)
    return int(match.group(1)) if match else None


# ---------------------------------------------------------------------------
# index template

def extract_index(page: PageDocument) -> list[VolumeSummary]:
    """One summary per Vol-N anchor, document order, first wins on dups."""
    doc = parse_page(page.body)
    seen: set[int] = set()
    summaries: list[VolumeSummary] = []
    for anchor in doc.find_all("a"):
        href = anchor.attrs.get("href") or ""
        match = VOLUME_HREF_RE.search(href)
        if not match:
            continue
        number = int(match.group(1))
        if number in seen:
            continue
        seen.add(number)
        label = anchor.text() or f"Vol-{number}"
        summaries.append(VolumeSummary(volume_number=number, label=label, href=href))
    if not summaries:
        raise NoVolumesFound(page.source_iri)
    return summaries


def _match_index(page: PageDocument) -> MatchOutcome:
    try:
        entries = extract_index(page)
    except NoVolumesFound:
        return NotApplicable()
    return _finish(IndexRecord(entries=entries))


def _finish(record) -> MatchOutcome:
    defects = validate_record(record)
    if defects:
        return Invalid(tuple(defects))
    return Matched(record)


# ---------------------------------------------------------------------------
# RDFa template

def _rdfa_props(doc: Element, prop: str) -> list[Element]:
    return [el for el in doc.iter() if el.attrs.get("property") == prop]


def extract_volume_rdfa(page: PageDocument) -> MatchOutcome:
    doc = parse_page(page.body)
    if not any("property" in el.attrs or "typeof" in el.attrs for el in doc.iter()):
        return NotApplicable()

    titles = _rdfa_props(doc, "dcterms:title")
    full_title = ""
    for el in titles:
        if not el.has_ancestor("li"):
            full_title = el.text()
            break

    volume_number = _volume_number(page)
    vol_els = _rdfa_props(doc, "bibo:volume")
    if vol_els:
        try:
            volume_number = int(vol_els[0].text())
        except ValueError:
            pass

    editors = [
        PersonRecord(el.text(), "Editor")
        for el in _rdfa_props(doc, "swrc:editor")
        if el.text()
    ]

    papers: list[PaperRecord] = []
    for item in doc.find_all("li"):
        title_el = next(
            (el for el in item.iter() if el.attrs.get("property") == "dcterms:title"), None
        )
        if title_el is None:
            continue
        authors = [
            PersonRecord(el.text(), "Author")
            for el in item.iter()
            if el.attrs.get("property") == "dcterms:creator" and el.text()
        ]
        papers.append(
            PaperRecord(
                title=title_el.text(),
                authors=authors,
                pdf_href=_first_href(item, page.source_iri),
                page_start=_pages(item.text())[0],
                page_end=_pages(item.text())[1],
                is_invited=bool(_INVITED_RE.search(item.text())),
            )
        )

    pub_year = None
    issued = _rdfa_props(doc, "dcterms:issued")
    if issued:
        match = re.search(r"\d{4}", issued[0].text())
        if match:
            pub_year = int(match.group())

    location = event_start = event_end = None
    loc_els = _rdfa_props(doc, "dbpedia-owl:location")
    if loc_els:
        location, event_start, event_end = _loctime_or_location(loc_els[0].text())

    record = VolumeRecord(
        volume_number=volume_number or 0,
        full_title=full_title,
        workshops=parse_joint_title(full_title) if full_title else [],
        editors=editors,
        papers=papers,
        source_iri=page.source_iri,
        pub_year=pub_year,
        location=location,
        event_start=event_start,
        event_end=event_end,
        see_also_volumes=collect_see_also(page),
    )
    return _finish(record)


def _first_href(item: Element, base: str) -> Optional[str]:
    anchor = item.find("a")
    if anchor is None and item.tag == "a":
        anchor = item
    if anchor is None or not anchor.attrs.get("href"):
        return None
    return urljoin(base, anchor.attrs["href"])


def _pages(text: str) -> tuple[Optional[int], Optional[int]]:
    match = _PAGES_RE.search(text) or _PAGES_PARENS_RE.search(text)
    if not match:
        return None, None
    start, end = int(match.group(1)), int(match.group(2))
    if start > end:
        return None, None
    return start, end


# ---------------------------------------------------------------------------
# CEUR microformat template

def _class_texts(doc: Element, name: str) -> list[str]:
    return [el.text() for el in doc.find_all(class_=name)]


def extract_volume_microformat(page: PageDocument) -> MatchOutcome:
    doc = parse_page(page.body)
    if not any(c.startswith("CEUR") for el in doc.iter() for c in el.classes):
        return NotApplicable()

    full_title = next(iter(_class_texts(doc, "CEURVOLTITLE")), "")

    names = _class_texts(doc, "CEURFULLTITLE")
    acronyms = _class_texts(doc, "CEURVOLACRONYM")
    workshops = [
        WorkshopRecord(
            full_name=name,
            acronym=acronyms[i] if i < len(acronyms) else None,
            edition_ordinal=find_edition_ordinal(name),
        )
        for i, name in enumerate(names)
        if name
    ]
    if not workshops and full_title:
        workshops = parse_joint_title(full_title)

    location = event_start = event_end = None
    loctime = next(iter(_class_texts(doc, "CEURLOCTIME")), "")
    if loctime:
        location, event_start, event_end = _loctime_or_location(loctime)
        if location is None:
            location = loctime

    editors = [PersonRecord(t, "Editor") for t in _class_texts(doc, "CEURVOLEDITOR") if t]

    papers: list[PaperRecord] = []
    for title_el in doc.find_all(class_="CEURTITLE"):
        container = title_el
        for ancestor in title_el.ancestors():
            container = ancestor
            if ancestor.tag in ("li", "tr", "p"):
                break
        authors = [
            PersonRecord(el.text(), "Author")
            for el in container.find_all(class_="CEURAUTHOR")
            if el.text()
        ]
        pages_el = container.find(class_="CEURPAGES")
        page_start = page_end = None
        if pages_el is not None:
            match = re.search(r"(\d+)\s*[-–]\s*(\d+)", pages_el.text())
            if match and int(match.group(1)) <= int(match.group(2)):
                page_start, page_end = int(match.group(1)), int(match.group(2))
        papers.append(
            PaperRecord(
                title=title_el.text(),
                authors=authors,
                pdf_href=_first_href(container, page.source_iri),
                page_start=page_start,
                page_end=page_end,
                is_invited=bool(_INVITED_RE.search(container.text())),
            )
        )

    pub_year = None
    year_text = next(iter(_class_texts(doc, "CEURPUBYEAR")), "")
    match = re.search(r"\d{4}", year_text)
    if match:
        pub_year = int(match.group())

    record = VolumeRecord(
        volume_number=_volume_number(page) or 0,
        full_title=full_title,
        workshops=workshops,
        editors=editors,
        papers=papers,
        source_iri=page.source_iri,
        pub_year=pub_year,
        location=location,
        event_start=event_start,
        event_end=event_end,
        see_also_volumes=collect_see_also(page),
    )
    return _finish(record)


# ---------------------------------------------------------------------------
# heuristic templates

_EDITED_BY_RE = re.compile(r"edited\s+by", re.IGNORECASE)
_TOC_RE = re.compile(r"table\s+of\s+contents|contents|programme?", re.IGNORECASE)


def _find_loctime(lines: list[str]) -> tuple[Optional[str], Optional[date], Optional[date]]:
    for line in lines[:12]:
        loc, start, end = _loctime_or_location(line)
        if loc is not None:
            return loc, start, end
    return None, None, None


def _split_author_run(text: str) -> list[PersonRecord]:
    text = _PAGES_RE.sub("", text)
    text = _PAGES_PARENS_RE.sub("", text)
    text = _INVITED_RE.sub("", text)
    authors = []
    for chunk in re.split(r",|\band\b|;|&", text):
        name = collapse_ws(chunk).strip(".,;() ")
        if name and re.search(r"[A-Za-zÀ-ɏ]", name):
            authors.append(PersonRecord(name, "Author"))
    return authors


def extract_volume_heuristic_a(page: PageDocument) -> MatchOutcome:
    """Heading-structured pages: <h1> title, 'Edited by' block, <li> TOC."""
    doc = parse_page(page.body)
    heading = doc.find("h1")
    if heading is None:
        return NotApplicable()
    full_title = heading.text()

    lines = doc.lines()
    editors: list[PersonRecord] = []
    in_editors = False
    for line in lines:
        if _EDITED_BY_RE.search(line) and len(line) < 40:
            in_editors = True
            continue
        if in_editors:
            if _TOC_RE.search(line) and len(line) < 40:
                break
            name, _, affiliation = line.partition(",")
            name = collapse_ws(name)
            if name:
                editors.append(
                    PersonRecord(name, "Editor", collapse_ws(affiliation) or None)
                )

    papers: list[PaperRecord] = []
    last_heading_text = ""
    for el in doc.iter():
        if el.tag in ("h2", "h3", "h4"):
            last_heading_text = el.text()
            continue
        if el.tag != "li":
            continue
        anchor = el.find("a")
        if anchor is None or not anchor.text():
            continue
        title = anchor.text()
        rest = el.text()
        if rest.startswith(title):
            rest = rest[len(title):]
        page_start, page_end = _pages(el.text())
        invited = bool(_INVITED_RE.search(el.text()) or _INVITED_RE.search(last_heading_text))
        papers.append(
            PaperRecord(
                title=title,
                authors=_split_author_run(rest),
                pdf_href=_first_href(el, page.source_iri),
                page_start=page_start,
                page_end=page_end,
                is_invited=invited,
            )
        )

    location, event_start, event_end = _find_loctime(lines)
    pub_year = _year_from_lines(lines) or (event_start.year if event_start else None)

    record = VolumeRecord(
        volume_number=_volume_number(page) or 0,
        full_title=full_title,
        workshops=parse_joint_title(full_title) if full_title else [],
        editors=editors,
        papers=papers,
        source_iri=page.source_iri,
        pub_year=pub_year,
        location=location,
        event_start=event_start,
        event_end=event_end,
        see_also_volumes=collect_see_also(page),
    )
    return _finish(record)


_YEAR_LINE_RE = re.compile(r"^(?:published|copyright|©).*?(\d{4})", re.IGNORECASE)


def _year_from_lines(lines: list[str]) -> Optional[int]:
    for line in lines:
        match = _YEAR_LINE_RE.match(line)
        if match:
            return int(match.group(1))
    return None


def extract_volume_heuristic_b(page: PageDocument) -> MatchOutcome:
    """Older plain-ish markup: <title> element, anchor-wrapped editors
    between 'Edited by' and the TOC, then anchor+text pairs as papers."""
    doc = parse_page(page.body)
    title_el = doc.find("title")
    if title_el is None:
        return NotApplicable()
    body = doc.find("body") or doc
    if not _EDITED_BY_RE.search(body.text()):
        return NotApplicable()
    full_title = re.sub(r"^Vol-\d+:?\s*", "", title_el.text())

    # flatten the body into document-ordered text chunks and anchors
    stream: list[tuple[str, object]] = []

    def walk(el: Element):
        for child in el.children:
            if isinstance(child, str):
                if collapse_ws(child):
                    stream.append(("text", collapse_ws(child)))
            elif child.tag == "a":
                stream.append(("anchor", child))
            elif child.tag not in ("script", "style"):
                walk(child)

    walk(body)

    edited_at = next(
        (i for i, (k, v) in enumerate(stream) if k == "text" and _EDITED_BY_RE.search(v)),
        None,
    )
    if edited_at is None:
        return NotApplicable()
    toc_at = next(
        (
            i
            for i, (k, v) in enumerate(stream)
            if k == "text" and i > edited_at and _TOC_RE.search(v) and len(v) < 40
        ),
        len(stream),
    )

    editors = [
        PersonRecord(el.text(), "Editor")
        for kind, el in stream[edited_at + 1 : toc_at]
        if kind == "anchor" and el.text()
    ]

    papers: list[PaperRecord] = []
    i = toc_at
    while i < len(stream):
        kind, value = stream[i]
        if kind == "anchor" and value.text():
            following: list[str] = []
            j = i + 1
            while j < len(stream) and stream[j][0] == "text":
                following.append(stream[j][1])
                j += 1
            run = " ".join(following)
            page_start, page_end = _pages(run)
            papers.append(
                PaperRecord(
                    title=value.text(),
                    authors=_split_author_run(run),
                    pdf_href=_first_href(value, page.source_iri),
                    page_start=page_start,
                    page_end=page_end,
                    is_invited=bool(_INVITED_RE.search(run)),
                )
            )
            i = j
        else:
            i += 1

    lines = doc.lines()
    location, event_start, event_end = _find_loctime(lines)
    record = VolumeRecord(
        volume_number=_volume_number(page) or 0,
        full_title=full_title,
        workshops=parse_joint_title(full_title) if full_title else [],
        editors=editors,
        papers=papers,
        source_iri=page.source_iri,
        pub_year=_year_from_lines(lines) or (event_start.year if event_start else None),
        location=location,
        event_start=event_start,
        event_end=event_end,
        see_also_volumes=collect_see_also(page),
    )
    return _finish(record)


# ---------------------------------------------------------------------------
# default cascade

def default_registry() -> TemplateRegistry:
    registry = TemplateRegistry()
    register_template(registry, Template("index", ContentKind.INDEX_PAGE, 0, _match_index))
    register_template(registry, Template("rdfa", ContentKind.VOLUME_PAGE, 0, extract_volume_rdfa))
    register_template(
        registry, Template("microformat", ContentKind.VOLUME_PAGE, 1, extract_volume_microformat)
    )
    register_template(
        registry, Template("heuristic-a", ContentKind.VOLUME_PAGE, 2, extract_volume_heuristic_a)
    )
    register_template(
        registry, Template("heuristic-b", ContentKind.VOLUME_PAGE, 3, extract_volume_heuristic_b)
    )
    return registry
