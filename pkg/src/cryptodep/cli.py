"""Command-line interface.

Four subcommands share one pipeline: ``scan`` (ingest, build, analyse,
report), ``whatif`` (scan twice, once with an overlay, and diff), ``graph``
(ingest, build, emit DOT), and ``validate`` (ingest and consistency checks
only).

Exit codes are the machine contract: 0 for a clean run, 1 when findings or
error diagnostics exist, 2 for fatal problems (unreadable files, bad
profiles or overlays).  Stdout carries the report and nothing else;
diagnostics and errors go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    HorizonConfig,
    Overlay,
    OverlayError,
    ScoringPolicy,
    apply_overlay,
    find_violations,
    parse_overlay,
)
from .ingest import (
    DEFAULT_REGISTRY_LABEL,
    Diagnostic,
    IngestError,
    Severity,
    default_registry_text,
    load_bundle,
    parse_profiles,
    parse_registry_text,
    validate_bundle,
)
from .model import CryptoRegistry, InventoryBundle
from .report import (
    file_digest,
    make_report,
    render_dot,
    render_json,
    render_text,
    render_whatif_json,
    render_whatif_text,
    text_digest,
)
from .rules import build_graph

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_FATAL = 2


class _Fatal(Exception):
    """Internal: unwinds to main() which prints the message and exits 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryptodep",
        description="Trace quantum-unsafe reliance chains through enterprise "
        "inventories of data, assets, and cryptographic objects.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("inventories", nargs="+", metavar="FILE", help="inventory CSV files")
        p.add_argument("--profiles", metavar="PATH", help="mapping profile JSON")
        p.add_argument("--registry", metavar="PATH", help="algorithm registry JSON")
        p.add_argument(
            "--paper-defaults",
            action="store_true",
            help="match the bundled four-file cloud example profiles by filename",
        )

    def analysis_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--policy", metavar="PATH", help="scoring policy JSON")
        p.add_argument("--horizon", metavar="PATH", help="longevity horizon JSON")
        p.add_argument(
            "--witnesses",
            type=int,
            default=1,
            metavar="N",
            help="witness paths reported per violating level pair (default 1)",
        )
        group = p.add_mutually_exclusive_group()
        group.add_argument(
            "-v", "--verbose", dest="verbosity", action="store_const", const=2, default=1,
            help="show rule trails with record provenance",
        )
        group.add_argument(
            "-q", "--quiet", dest="verbosity", action="store_const", const=0,
            help="summary lines only",
        )

    p_scan = sub.add_parser("scan", help="find reliance violations")
    common(p_scan)
    analysis_flags(p_scan)
    p_scan.add_argument(
        "--format", choices=("text", "json", "dot"), default="text", help="output format"
    )
    p_scan.add_argument("--overlay", metavar="PATH", help="apply a what-if overlay before scanning")

    p_whatif = sub.add_parser("whatif", help="compare baseline against an overlay scenario")
    common(p_whatif)
    analysis_flags(p_whatif)
    p_whatif.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    p_whatif.add_argument("--overlay", metavar="PATH", required=True, help="scenario overlay JSON")

    p_graph = sub.add_parser("graph", help="emit the dependency graph as DOT")
    common(p_graph)

    p_validate = sub.add_parser("validate", help="check inventories without scanning")
    common(p_validate)

    return parser


# --------------------------------------------------------------------------
# shared pipeline pieces
# --------------------------------------------------------------------------

def _read_file(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fatal(f"cannot read {what} {path}: {exc}") from None


def _load_inputs(args) -> tuple[InventoryBundle, list[Diagnostic], dict[str, str]]:
    digests: dict[str, str] = {}

    profiles = []
    if args.profiles:
        digests[args.profiles] = text_digest(_read_file(args.profiles, "profile file"))
        try:
            profiles = parse_profiles(args.profiles)
        except IngestError as exc:
            raise _Fatal(str(exc)) from None

    registry: CryptoRegistry
    registry_diags: list[Diagnostic] = []
    if args.registry:
        text = _read_file(args.registry, "registry file")
        digests[args.registry] = text_digest(text)
        try:
            registry, registry_diags = parse_registry_text(text, Path(args.registry).name)
        except IngestError as exc:
            raise _Fatal(str(exc)) from None
    else:
        text = default_registry_text()
        digests[DEFAULT_REGISTRY_LABEL] = text_digest(text)
        registry, registry_diags = parse_registry_text(text, DEFAULT_REGISTRY_LABEL)

    for path in args.inventories:
        digests[path] = file_digest_or_fatal(path)

    try:
        bundle, diags = load_bundle(
            args.inventories,
            profiles=profiles,
            registry=registry,
            use_builtin_profiles=args.paper_defaults,
        )
    except IngestError as exc:
        raise _Fatal(str(exc)) from None

    diagnostics = registry_diags + diags + validate_bundle(bundle)
    return bundle, diagnostics, digests


def file_digest_or_fatal(path: str) -> str:
    try:
        return file_digest(path)
    except OSError as exc:
        raise _Fatal(f"cannot read inventory {path}: {exc}") from None


def _load_policy(args) -> ScoringPolicy:
    if not getattr(args, "policy", None):
        return ScoringPolicy()
    text = _read_file(args.policy, "policy file")
    try:
        return ScoringPolicy.from_dict(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise _Fatal(f"bad policy file {args.policy}: {exc}") from None


def _load_horizon(args) -> HorizonConfig:
    if not getattr(args, "horizon", None):
        return HorizonConfig()
    text = _read_file(args.horizon, "horizon file")
    try:
        return HorizonConfig.from_dict(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise _Fatal(f"bad horizon file {args.horizon}: {exc}") from None


def _load_overlay(args, digests: dict[str, str]) -> Overlay:
    text = _read_file(args.overlay, "overlay file")
    digests[args.overlay] = text_digest(text)
    try:
        return parse_overlay(text)
    except OverlayError as exc:
        raise _Fatal(str(exc)) from None


def _emit_diagnostics(diagnostics) -> None:
    for diag in diagnostics:
        print(diag.render(), file=sys.stderr)


def _has_errors(diagnostics) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def _scan(bundle, diagnostics, policy, horizon, witnesses):
    graph = build_graph(bundle)
    findings, analysis_diags = find_violations(
        graph, bundle, policy, horizon, max_witnesses=witnesses
    )
    return graph, findings, list(diagnostics) + analysis_diags


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_scan(args) -> int:
    bundle, diagnostics, digests = _load_inputs(args)
    policy = _load_policy(args)
    horizon = _load_horizon(args)

    if args.overlay:
        overlay = _load_overlay(args, digests)
        try:
            bundle = apply_overlay(bundle, overlay)
        except OverlayError as exc:
            raise _Fatal(str(exc)) from None

    graph, findings, diagnostics = _scan(bundle, diagnostics, policy, horizon, args.witnesses)
    report = make_report(graph, findings, diagnostics, policy, horizon, digests)

    if args.format == "json":
        sys.stdout.write(render_json(report))
    elif args.format == "dot":
        sys.stdout.write(render_dot(graph, highlight=list(findings)))
    else:
        sys.stdout.write(render_text(report, verbosity=args.verbosity))
    _emit_diagnostics(diagnostics)

    if findings or _has_errors(diagnostics):
        return EXIT_FINDINGS
    return EXIT_CLEAN


def cmd_whatif(args) -> int:
    bundle, diagnostics, digests = _load_inputs(args)
    policy = _load_policy(args)
    horizon = _load_horizon(args)
    overlay = _load_overlay(args, digests)
    try:
        overlaid_bundle = apply_overlay(bundle, overlay)
    except OverlayError as exc:
        raise _Fatal(str(exc)) from None

    base_graph, base_findings, base_diags = _scan(
        bundle, diagnostics, policy, horizon, args.witnesses
    )
    over_graph, over_findings, over_diags = _scan(
        overlaid_bundle, diagnostics, policy, horizon, args.witnesses
    )
    baseline = make_report(base_graph, base_findings, base_diags, policy, horizon, digests)
    scenario = make_report(over_graph, over_findings, over_diags, policy, horizon, digests)

    if args.format == "json":
        sys.stdout.write(render_whatif_json(baseline, scenario))
    else:
        sys.stdout.write(render_whatif_text(baseline, scenario, verbosity=args.verbosity))
    _emit_diagnostics(over_diags)

    if over_findings or _has_errors(over_diags):
        return EXIT_FINDINGS
    return EXIT_CLEAN


def cmd_graph(args) -> int:
    bundle, diagnostics, _ = _load_inputs(args)
    graph = build_graph(bundle)
    sys.stdout.write(render_dot(graph))
    _emit_diagnostics(diagnostics)
    return EXIT_CLEAN


def cmd_validate(args) -> int:
    bundle, diagnostics, _ = _load_inputs(args)
    for diag in diagnostics:
        print(diag.render())
    errors = sum(1 for d in diagnostics if d.severity is Severity.ERROR)
    warnings = len(diagnostics) - errors
    records = (
        len(bundle.classifications)
        + len(bundle.data)
        + len(bundle.assets)
        + len(bundle.crypto_objects)
    )
    print(f"{records} records, {errors} errors, {warnings} warnings")
    return EXIT_FINDINGS if errors else EXIT_CLEAN


_COMMANDS = {
    "scan": cmd_scan,
    "whatif": cmd_whatif,
    "graph": cmd_graph,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _Fatal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
