"""Command-line entry point.

Subcommands: fetch (bounded mirror), run (full pipeline), extract (one
volume as JSON), similarity (score two strings), query (the country
lookup SPARQL). Exit codes: 0 success, 1 fatal error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import corpus as corpus_mod
from .errors import VolverError
from .extractors import default_registry
from .linking import EndpointConfig, build_country_query, make_transport
from .pipeline import run as run_pipeline
from .rdf import Iri, IriPolicy
from .records import record_to_json
from .relations import ratcliff_obershelp
from .templates import extract

DEFAULT_BASE_IRI = "http://ceur-ws.org/"
DEFAULT_THRESHOLD = 0.6

CONFIG_KEYS = {"manifest", "out_dir", "base_iri", "threshold", "endpoint", "parallelism", "formats"}


def load_config(path) -> dict:
    """Flat key=value file; blank lines and # comments ignored."""
    config = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        config[key] = value.strip()
    return config


def _usage_error(message: str) -> int:
    print(f"error: {message} (see --help)", file=sys.stderr)
    return 2


def _cmd_fetch(args) -> int:
    manifest = corpus_mod.fetch_mirror(args.base, args.limit, args.parallelism, args.out)
    print(f"fetched {len(manifest.entries)} pages into {args.out}")
    return 0


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError:
        return _usage_error(f"config file not found: {args.config}")
    except ValueError as exc:
        return _usage_error(str(exc))

    def pick(flag_value, key, default=None):
        return flag_value if flag_value is not None else config.get(key, default)

    manifest_path = pick(args.manifest, "manifest")
    out_dir = pick(args.out, "out_dir")
    if not manifest_path or not out_dir:
        return _usage_error("manifest and out_dir are required (flag or config)")
    base_iri = pick(args.base_iri, "base_iri", DEFAULT_BASE_IRI)
    threshold = Fraction(str(pick(args.threshold, "threshold", DEFAULT_THRESHOLD)))
    if not 0 < threshold <= 1:
        return _usage_error(f"threshold must be in (0, 1], got {threshold}")
    parallelism = int(pick(args.parallelism, "parallelism", 1))
    if parallelism < 1:
        return _usage_error("parallelism must be >= 1")
    formats = tuple(
        f.strip() for f in str(pick(args.formats, "formats", "ntriples")).split(",") if f.strip()
    )
    endpoint = os.environ.get("VOLVER_ENDPOINT") or pick(args.endpoint, "endpoint")

    manifest = corpus_mod.load_corpus(manifest_path)
    transport = make_transport(endpoint) if endpoint else None
    endpoint_config = EndpointConfig(endpoint_iri=endpoint or "mock:unused", backoff=0.0)
    report = run_pipeline(
        manifest,
        default_registry(),
        endpoint_config,
        threshold,
        IriPolicy(Iri(base_iri)),
        out_dir,
        transport=transport,
        parallelism=parallelism,
        formats=formats,
    )
    print(
        f"extracted {report.volumes_extracted}/{report.volumes_attempted} volumes, "
        f"linked {report.papers_linked} papers, "
        f"accepted {report.relations_accepted} relations"
    )
    return 1 if report.volumes_attempted and not report.volumes_extracted else 0


def _cmd_extract(args) -> int:
    manifest = corpus_mod.load_corpus(args.manifest)
    page = corpus_mod.read_page(manifest, args.volume)
    record = extract(default_registry(), page)
    print(json.dumps(record_to_json(record), indent=2, ensure_ascii=False))
    return 0


def _cmd_similarity(args) -> int:
    print(f"{float(ratcliff_obershelp(args.a, args.b)):.6f}")
    return 0


def _cmd_query(args) -> int:
    candidates = [c.strip() for c in args.candidates.split(",") if c.strip()]
    if not candidates:
        return _usage_error("--candidates must name at least one surface")
    print(build_country_query(candidates, args.class_iri))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volver", description="Proceedings-volume extraction engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="mirror a bounded number of volume pages")
    fetch.add_argument("--base", required=True, help="site base IRI")
    fetch.add_argument("--limit", type=int, required=True, help="max volume pages")
    fetch.add_argument("--out", required=True, help="output directory")
    fetch.add_argument("--parallelism", type=int, default=2)
    fetch.set_defaults(func=_cmd_fetch)

    run_cmd = sub.add_parser("run", help="run the full pipeline")
    run_cmd.add_argument("--config", required=True, help="flat key=value config file")
    run_cmd.add_argument("--manifest")
    run_cmd.add_argument("--out")
    run_cmd.add_argument("--base-iri", dest="base_iri")
    run_cmd.add_argument("--threshold", type=float)
    run_cmd.add_argument("--endpoint")
    run_cmd.add_argument("--parallelism", type=int)
    run_cmd.add_argument("--formats")
    run_cmd.set_defaults(func=_cmd_run)

    extract_cmd = sub.add_parser("extract", help="extract one volume and print it as JSON")
    extract_cmd.add_argument("--manifest", required=True)
    extract_cmd.add_argument("--volume", type=int, required=True)
    extract_cmd.set_defaults(func=_cmd_extract)

    sim = sub.add_parser("similarity", help="similarity score of two strings")
    sim.add_argument("--a", required=True)
    sim.add_argument("--b", required=True)
    sim.set_defaults(func=_cmd_similarity)

    query = sub.add_parser("query", help="print the country lookup SPARQL query")
    query.add_argument("--candidates", required=True, help="comma-separated surfaces")
    query.add_argument("--class-iri", dest="class_iri", default="dbpedia-owl:Country")
    query.set_defaults(func=_cmd_query)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except VolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
