"""Corpus loading and the bounded polite mirror fetcher.

A corpus is a directory of raw page files plus a tab-separated manifest
describing each file: relative path, source IRI, content kind and volume
id. Page bytes are never cleaned here; invalid markup must survive
untouched to the template layer.
"""

from __future__ import annotations

import concurrent.futures
import enum
import logging
import re
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .errors import (
    AllFetchesFailed,
    DuplicateVolume,
    ManifestMalformed,
    ManifestNotFound,
    MissingFile,
    UnknownVolume,
)

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"

VOLUME_HREF_RE = re.compile(r"Vol-(\d+)")


class ContentKind(enum.Enum):
    INDEX_PAGE = "index"
    VOLUME_PAGE = "volume"
    PAPER_TEXT = "papertext"

    @classmethod
    def parse(cls, token: str) -> "ContentKind":
        for kind in cls:
            if kind.value == token:
                return kind
        raise ValueError(f"unknown content kind {token!r}")


@dataclass(frozen=True)
class PageDocument:
    source_iri: str
    volume_id: Optional[int]
    kind: ContentKind
    body: bytes
    fetched_at: datetime

    def __post_init__(self):
        if not self.source_iri or "://" not in self.source_iri:
            raise ValueError(f"source_iri must be absolute, got {self.source_iri!r}")
        if (self.kind is ContentKind.INDEX_PAGE) != (self.volume_id is None):
            raise ValueError("volume_id must be absent exactly for index pages")


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # relative to corpus_root
    source_iri: str
    kind: ContentKind
    volume_id: Optional[int]


@dataclass
class CorpusManifest:
    corpus_root: Path
    entries: list[ManifestEntry] = field(default_factory=list)

    def volume_entries(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.kind is ContentKind.VOLUME_PAGE]

    def paper_text_entries(self, volume_id: Optional[int] = None) -> list[ManifestEntry]:
        return [
            e for e in self.entries
            if e.kind is ContentKind.PAPER_TEXT
            and (volume_id is None or e.volume_id == volume_id)
        ]


def load_corpus(manifest_path) -> CorpusManifest:
    """Parse and validate a corpus manifest, preserving entry order."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise ManifestNotFound(str(manifest_path))
    root = manifest_path.parent
    manifest = CorpusManifest(corpus_root=root)
    seen_volumes: set[int] = set()
    for lineno, raw in enumerate(manifest_path.read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = raw.split("\t")
        if len(fields) != 4:
            raise ManifestMalformed(lineno, f"expected 4 tab-separated fields, got {len(fields)}")
        path, iri, kind_token, vol_token = (f.strip() for f in fields)
        try:
            kind = ContentKind.parse(kind_token)
        except ValueError as exc:
            raise ManifestMalformed(lineno, str(exc)) from exc
        if vol_token == "-":
            volume_id = None
        else:
            try:
                volume_id = int(vol_token)
            except ValueError as exc:
                raise ManifestMalformed(lineno, f"bad volume id {vol_token!r}") from exc
            if volume_id <= 0:
                raise ManifestMalformed(lineno, f"volume id must be positive, got {volume_id}")
        if (kind is ContentKind.INDEX_PAGE) != (volume_id is None):
            raise ManifestMalformed(lineno, "volume id must be '-' exactly for index entries")
        if kind is ContentKind.VOLUME_PAGE:
            if volume_id in seen_volumes:
                raise DuplicateVolume(volume_id)
            seen_volumes.add(volume_id)
        if not (root / path).is_file():
            raise MissingFile(path)
        manifest.entries.append(ManifestEntry(path, iri, kind, volume_id))
    return manifest


def _document(root: Path, entry: ManifestEntry) -> PageDocument:
    body = (root / entry.path).read_bytes()
    return PageDocument(
        source_iri=entry.source_iri,
        volume_id=entry.volume_id,
        kind=entry.kind,
        body=body,
        fetched_at=datetime.now(timezone.utc),
    )


def read_page(manifest: CorpusManifest, volume_id: Optional[int] = None) -> PageDocument:
    """Load one page verbatim: the index when ``volume_id`` is None."""
    for entry in manifest.entries:
        if volume_id is None:
            if entry.kind is ContentKind.INDEX_PAGE:
                return _document(manifest.corpus_root, entry)
        elif entry.kind is ContentKind.VOLUME_PAGE and entry.volume_id == volume_id:
            return _document(manifest.corpus_root, entry)
    raise UnknownVolume(volume_id)


class _RateLimiter:
    """Serializes request starts to at most one per ``interval`` seconds."""

    def __init__(self, interval: float):
        self.interval = interval
        self._lock = threading.Lock()
        self._next_ok = 0.0

    def wait(self) -> None:
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_ok - now
            self._next_ok = max(now, self._next_ok) + self.interval
        if delay > 0:
            time.sleep(delay)


def fetch_mirror(base_iri: str, limit: int, parallelism: int, out_dir,
                 request_interval: float = 1.0, timeout: float = 30.0) -> CorpusManifest:
    """Fetch the index plus up to ``limit`` volume pages into ``out_dir``.

    At most ``parallelism`` requests are in flight and request starts are
    throttled to one per ``request_interval`` seconds. Per-page failures
    are logged and skipped; only a run with zero successful pages raises.
    """
    import requests

    if limit < 1 or parallelism < 1:
        raise ValueError("limit and parallelism must be positive")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = base_iri if base_iri.endswith("/") else base_iri + "/"
    limiter = _RateLimiter(request_interval)
    session = requests.Session()

    def get(iri: str) -> bytes:
        limiter.wait()
        resp = session.get(iri, timeout=timeout)
        resp.raise_for_status()
        return resp.content

    entries: list[ManifestEntry] = []
    failures: list[tuple[int, Exception]] = []

    try:
        index_body = get(base)
    except Exception as exc:
        raise AllFetchesFailed(f"index fetch failed: {exc}") from exc
    (out_dir / "index.html").write_bytes(index_body)
    entries.append(ManifestEntry("index.html", base, ContentKind.INDEX_PAGE, None))

    volume_ids: list[int] = []
    for match in VOLUME_HREF_RE.finditer(index_body.decode("latin-1")):
        vid = int(match.group(1))
        if vid not in volume_ids:
            volume_ids.append(vid)
        if len(volume_ids) >= limit:
            break

    def fetch_volume(vid: int):
        iri = f"{base}Vol-{vid}/"
        body = get(iri)
        path = f"Vol-{vid}.html"
        (out_dir / path).write_bytes(body)
        return ManifestEntry(path, iri, ContentKind.VOLUME_PAGE, vid)

    with concurrent.futures.ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = {pool.submit(fetch_volume, vid): vid for vid in volume_ids}
        for future in concurrent.futures.as_completed(futures):
            vid = futures[future]
            try:
                entries.append(future.result())
            except Exception as exc:
                log.warning("FETCH FAILED Vol-%d: %s", vid, exc)
                failures.append((vid, exc))

    entries.sort(key=lambda e: (e.volume_id is not None, e.volume_id or 0))
    write_manifest(out_dir, entries)
    manifest = load_corpus(out_dir / MANIFEST_NAME)
    if not manifest.entries:
        raise AllFetchesFailed("no pages fetched")
    return manifest


def write_manifest(out_dir, entries) -> Path:
    out_dir = Path(out_dir)
    lines = ["# <path>\t<source-iri>\t<kind>\t<volume-id-or-dash>"]
    for e in entries:
        vol = "-" if e.volume_id is None else str(e.volume_id)
        lines.append(f"{e.path}\t{e.source_iri}\t{e.kind.value}\t{vol}")
    path = out_dir / MANIFEST_NAME
    path.write_text("\n".join(lines) + "\n", "utf-8")
    return path
