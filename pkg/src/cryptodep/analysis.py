"""Violation detection, prioritisation, and what-if overlays.

A violation exists when a security level that some classification requires
can reach, along directed edges, a strictly lower provided level in the same
dimension.  Detection uses plain reachability; the reported witness path is
the lexicographically smallest among the shortest paths whose interior
avoids other security-level vertices, so the chain reads as the actual chain
of custody rather than hopping through the level layer.  If every path runs
through another level vertex, the plain shortest path is reported and the
finding carries a warning.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field, replace

from .ingest import Diagnostic, Severity, bundle_to_dict, _record_from_dict
from .model import (
    Comparison,
    DataRecord,
    InventoryBundle,
    SecurityRating,
    Source,
    VulnerabilityClass,
    compare_ratings,
    parse_primitive_spec,
    primitive_key,
)
from .rules import DependencyGraph, Edge, Vertex, VertexKind

__all__ = [
    "ScoringPolicy",
    "HorizonConfig",
    "ScoreBreakdown",
    "EdgeTrace",
    "Finding",
    "check_longevity",
    "find_violations",
    "score_finding",
    "Overlay",
    "OverlayError",
    "parse_overlay",
    "apply_overlay",
]


DEFAULT_CLASS_WEIGHTS: dict[VulnerabilityClass, float] = {
    VulnerabilityClass.ELLIPTIC_CURVE: 4.0,
    VulnerabilityClass.INTEGER_FACTORING: 3.0,
    VulnerabilityClass.SYMMETRIC_SEARCH: 2.0,
    VulnerabilityClass.PQC: 1.0,
    VulnerabilityClass.HASH_BASED: 1.0,
    VulnerabilityClass.UNKNOWN: 1.0,
}


@dataclass(frozen=True)
class ScoringPolicy:
    """Weights for ranking findings.

    Sensitivity comes from the classification ranking: with K classification
    labels, data ranked r (0 = most sensitive) weighs K - r.  The
    vulnerability class weight is the maximum over the classes of the
    primitive configurations on the witness path.  Urgent longevity doubles
    the score.
    """

    class_weights: dict[VulnerabilityClass, float] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_WEIGHTS)
    )
    longevity_multiplier: float = 2.0

    def weight_for(self, vuln_class: VulnerabilityClass) -> float:
        return self.class_weights.get(vuln_class, 1.0)

    def to_dict(self) -> dict:
        return {
            "class_weights": {c.value: w for c, w in sorted(self.class_weights.items(), key=lambda i: i[0].value)},
            "longevity_multiplier": self.longevity_multiplier,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ScoringPolicy":
        weights = dict(DEFAULT_CLASS_WEIGHTS)
        for name, weight in raw.get("class_weights", {}).items():
            weights[VulnerabilityClass(name)] = float(weight)
        return cls(weights, float(raw.get("longevity_multiplier", 2.0)))


@dataclass(frozen=True)
class HorizonConfig:
    """Timeline for the longevity check: data is urgent when its retention
    plus the migration lead time outlasts the quantum horizon."""

    migration_years: float = 5.0
    quantum_horizon_years: float = 15.0

    def __post_init__(self) -> None:
        if self.migration_years < 0 or self.quantum_horizon_years < 0:
            raise ValueError("horizon years must be non-negative")

    def to_dict(self) -> dict:
        return {
            "migration_years": self.migration_years,
            "quantum_horizon_years": self.quantum_horizon_years,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "HorizonConfig":
        return cls(
            float(raw.get("migration_years", 5.0)),
            float(raw.get("quantum_horizon_years", 15.0)),
        )


def check_longevity(data: DataRecord, horizon: HorizonConfig) -> tuple[bool, bool]:
    """(urgent, assessed).  Unknown retention cannot be assessed."""
    if data.retention_years is None:
        return False, False
    urgent = data.retention_years + horizon.migration_years > horizon.quantum_horizon_years
    return urgent, True


@dataclass(frozen=True)
class ScoreBreakdown:
    sensitivity_weight: float
    vuln_class_weight: float
    longevity_flag: bool
    total: float
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "sensitivity_weight": self.sensitivity_weight,
            "vuln_class_weight": self.vuln_class_weight,
            "longevity_flag": self.longevity_flag,
            "total": self.total,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ScoreBreakdown":
        return cls(
            float(raw["sensitivity_weight"]),
            float(raw["vuln_class_weight"]),
            bool(raw["longevity_flag"]),
            float(raw["total"]),
            tuple(raw.get("warnings", [])),
        )


@dataclass(frozen=True)
class EdgeTrace:
    frm: str
    to: str
    rule: str
    provenance: tuple[Source, ...] = ()

    def to_dict(self) -> dict:
        return {
            "from": self.frm,
            "to": self.to,
            "rule": self.rule,
            "provenance": [s.to_dict() for s in self.provenance],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "EdgeTrace":
        return cls(
            raw["from"],
            raw["to"],
            raw["rule"],
            tuple(Source.from_dict(s) for s in raw.get("provenance", [])),
        )


@dataclass(frozen=True)
class Finding:
    """One reliance of a required level on a strictly lower provided level.

    ``path`` holds vertex ids from the required level to the provided one;
    ``display_path`` the human labels.  ``score`` is filled in by
    ``score_finding``.
    """

    required: SecurityRating
    provided: SecurityRating
    path: tuple[str, ...]
    display_path: tuple[str, ...]
    rule_trail: tuple[EdgeTrace, ...]
    affected_data: tuple[str, ...]
    score: ScoreBreakdown | None = None

    @property
    def id(self) -> str:
        return hashlib.sha256("\x1f".join(self.path).encode("utf-8")).hexdigest()[:16]

    def to_dict(self) -> dict:
        raw = {
            "id": self.id,
            "required": self.required.to_dict(),
            "provided": self.provided.to_dict(),
            "path": list(self.path),
            "display_path": list(self.display_path),
            "rule_trail": [t.to_dict() for t in self.rule_trail],
            "affected_data": list(self.affected_data),
        }
        if self.score is not None:
            raw["score"] = self.score.to_dict()
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "Finding":
        return cls(
            required=SecurityRating.from_dict(raw["required"]),
            provided=SecurityRating.from_dict(raw["provided"]),
            path=tuple(raw["path"]),
            display_path=tuple(raw["display_path"]),
            rule_trail=tuple(EdgeTrace.from_dict(t) for t in raw.get("rule_trail", [])),
            affected_data=tuple(raw.get("affected_data", [])),
            score=ScoreBreakdown.from_dict(raw["score"]) if "score" in raw else None,
        )


# --------------------------------------------------------------------------
# detection
# --------------------------------------------------------------------------

def _level_vertices(graph: DependencyGraph) -> list[Vertex]:
    return [v for v in graph.vertices if v.kind is VertexKind.SECURITY_LEVEL]


def _reachable(adjacency: dict[str, list[str]], start: str) -> set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        for succ in adjacency[queue.popleft()]:
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    return seen


def _witness_paths(
    adjacency: dict[str, list[str]],
    start: str,
    goal: str,
    blocked: set[str],
    limit: int,
) -> list[tuple[str, ...]]:
    """Up to ``limit`` shortest paths start -> goal whose interior avoids
    ``blocked``, in lexicographic order on the vertex-id sequence.

    Distances to the goal come from a reverse traversal; any walk that
    decreases the distance by one at every step is a shortest path, so a
    depth-first walk over sorted successors enumerates them in order.
    """
    reverse: dict[str, list[str]] = {v: [] for v in adjacency}
    for vertex, succs in adjacency.items():
        for succ in succs:
            reverse[succ].append(vertex)

    def usable(v: str) -> bool:
        return v == start or v == goal or v not in blocked

    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        vertex = queue.popleft()
        for pred in reverse[vertex]:
            if pred not in dist and usable(pred):
                dist[pred] = dist[vertex] + 1
                queue.append(pred)
    if start not in dist:
        return []

    found: list[tuple[str, ...]] = []
    stack = [start]

    def walk(current: str) -> bool:
        if current == goal:
            found.append(tuple(stack))
            return len(found) >= limit
        nexts = sorted(
            s for s in adjacency[current] if usable(s) and dist.get(s) == dist[current] - 1
        )
        for succ in nexts:
            stack.append(succ)
            if walk(succ):
                return True
            stack.pop()
        return False

    walk(start)
    return found


def _edge_lookup(graph: DependencyGraph) -> dict[tuple[str, str], list[Edge]]:
    table: dict[tuple[str, str], list[Edge]] = {}
    for edge in graph.edges:
        table.setdefault((edge.frm, edge.to), []).append(edge)
    return table


def _trace(path: tuple[str, ...], lookup: dict[tuple[str, str], list[Edge]]) -> tuple[EdgeTrace, ...]:
    trail = []
    for frm, to in zip(path, path[1:]):
        edges = lookup.get((frm, to), [])
        rule = "/".join(sorted({e.rule for e in edges})) if edges else "?"
        provenance = tuple(sorted({s for e in edges for s in e.provenance}, key=lambda s: (s.file, s.ref)))
        trail.append(EdgeTrace(frm, to, rule, provenance))
    return tuple(trail)


def find_violations(
    graph: DependencyGraph,
    bundle: InventoryBundle | None = None,
    policy: ScoringPolicy | None = None,
    horizon: HorizonConfig | None = None,
    max_witnesses: int = 1,
) -> tuple[list[Finding], list[Diagnostic]]:
    """All pairs (required level, strictly lower provided level in the same
    dimension) connected by a directed path, each with up to
    ``max_witnesses`` witness paths.

    Findings are sorted by descending score, then by id.  When ``bundle`` is
    given the scores use its classification ranking and data retention;
    otherwise all findings get neutral sensitivity.
    """
    policy = policy or ScoringPolicy()
    horizon = horizon or HorizonConfig()
    diagnostics: list[Diagnostic] = []

    adjacency = graph.adjacency()
    levels = _level_vertices(graph)
    level_ids = {v.id for v in levels}
    required_ids = {e.frm for e in graph.edges if e.rule == "SL1"}
    provided_ids = {e.to for e in graph.edges if e.rule == "SL2"}
    lookup = _edge_lookup(graph)
    vertex_map = graph.vertex_map()

    findings: list[Finding] = []
    for high in levels:
        if high.id not in required_ids:
            continue
        reach = _reachable(adjacency, high.id)
        for low in levels:
            if low.id not in provided_ids or low.id not in reach or low.id == high.id:
                continue
            assert isinstance(high.payload, SecurityRating)
            assert isinstance(low.payload, SecurityRating)
            if compare_ratings(high.payload, low.payload) is not Comparison.A_HIGHER:
                continue
            blocked = level_ids - {high.id, low.id}
            paths = _witness_paths(adjacency, high.id, low.id, blocked, max_witnesses)
            if not paths:
                # reachable only through another level vertex: report the
                # plain shortest path rather than staying silent
                paths = _witness_paths(adjacency, high.id, low.id, set(), max_witnesses)
                assert paths
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "analysis",
                        "witness-through-level",
                        "every path from "
                        f"{high.display} to {low.display} crosses another security level",
                    )
                )
            for path in paths:
                finding = Finding(
                    required=high.payload,
                    provided=low.payload,
                    path=path,
                    display_path=tuple(vertex_map[v].display for v in path),
                    rule_trail=_trace(path, lookup),
                    affected_data=_affected_data(path, graph),
                )
                findings.append(
                    score_finding(finding, graph, bundle, policy, horizon, diagnostics)
                )

    findings.sort(key=lambda f: (-(f.score.total if f.score else 0.0), f.id))
    return findings, diagnostics


def _affected_data(path: tuple[str, ...], graph: DependencyGraph) -> tuple[str, ...]:
    on_path = set(path)
    return tuple(
        v.id for v in graph.vertices if v.kind is VertexKind.DATA_ASSET and v.id in on_path
    )


# --------------------------------------------------------------------------
# scoring
# --------------------------------------------------------------------------

def score_finding(
    finding: Finding,
    graph: DependencyGraph,
    bundle: InventoryBundle | None,
    policy: ScoringPolicy,
    horizon: HorizonConfig,
    diagnostics: list[Diagnostic] | None = None,
) -> Finding:
    """Attach a ScoreBreakdown.  Inputs the bundle cannot answer (no
    classification on the path, unknown retention) degrade to neutral
    weights with a warning recorded on the breakdown."""
    vertex_map = graph.vertex_map()
    warnings: list[str] = []

    vuln_weight = 1.0
    for vertex_id in finding.path:
        vertex = vertex_map[vertex_id]
        if vertex.kind is VertexKind.PRIMITIVE_CONFIG and vertex.payload is not None:
            vuln_weight = max(vuln_weight, policy.weight_for(vertex.payload.vulnerability_class))

    sensitivity = 1.0
    urgent = False
    if bundle is None:
        warnings.append("no bundle available, sensitivity and longevity not assessed")
    else:
        ranks = {b.label: b.rank for b in bundle.classifications}
        label_count = len(bundle.classifications)
        on_path = [
            v.id for v in map(vertex_map.get, finding.path)
            if v is not None and v.kind is VertexKind.CLASSIFICATION and v.id in ranks
        ]
        if on_path:
            sensitivity = float(max(label_count - ranks[c] for c in on_path))
        else:
            warnings.append("no classification on the witness path, neutral sensitivity")
        data_map = bundle.data_map()
        for data_id in finding.affected_data:
            record = data_map.get(data_id)
            if record is None:
                continue
            flagged, assessed = check_longevity(record, horizon)
            if not assessed:
                message = f"no retention period for {data_id}, longevity not assessed"
                warnings.append(message)
                if diagnostics is not None:
                    diagnostics.append(
                        Diagnostic(
                            Severity.WARNING, record.source.file, "retention-unknown", message
                        )
                    )
            urgent = urgent or flagged

    total = sensitivity * vuln_weight * (policy.longevity_multiplier if urgent else 1.0)
    return replace(
        finding,
        score=ScoreBreakdown(sensitivity, vuln_weight, urgent, total, tuple(warnings)),
    )


# --------------------------------------------------------------------------
# what-if overlays
# --------------------------------------------------------------------------

class OverlayError(ValueError):
    """Raised when an overlay file is malformed or names unknown entities."""


@dataclass(frozen=True)
class Overlay:
    """A hypothetical edit: swap algorithms, drop records, add records.

    ``replace_algorithms`` maps full primitive spellings like ``RSA[1024]``
    to replacements that must exist in the registry.  ``remove_records``
    names record ids or classification labels.  ``add_records`` uses the
    bundle dump record schema with a ``record_kind`` discriminator.
    """

    replace_algorithms: tuple[tuple[str, str], ...] = ()
    remove_records: tuple[str, ...] = ()
    add_records: tuple[dict, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.replace_algorithms or self.remove_records or self.add_records)


def parse_overlay(text: str) -> Overlay:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OverlayError(f"overlay is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise OverlayError("overlay must be a JSON object")
    known = {"replace_algorithms", "remove_records", "add_records"}
    unknown = set(raw) - known
    if unknown:
        raise OverlayError(f"unknown overlay keys: {', '.join(sorted(unknown))}")

    replacements = []
    for entry in raw.get("replace_algorithms", []):
        if not isinstance(entry, dict) or set(entry) != {"from", "to"}:
            raise OverlayError('replace_algorithms entries need exactly "from" and "to"')
        for spec in (entry["from"], entry["to"]):
            try:
                parse_primitive_spec(spec)
            except ValueError as exc:
                raise OverlayError(str(exc)) from exc
        replacements.append((entry["from"], entry["to"]))

    removals = raw.get("remove_records", [])
    if not all(isinstance(r, str) for r in removals):
        raise OverlayError("remove_records must be a list of record ids")

    additions = raw.get("add_records", [])
    for entry in additions:
        if not isinstance(entry, dict) or "record_kind" not in entry:
            raise OverlayError('add_records entries need a "record_kind" field')

    return Overlay(tuple(replacements), tuple(removals), tuple(additions))


def apply_overlay(bundle: InventoryBundle, overlay: Overlay) -> InventoryBundle:
    """A new bundle with the overlay applied.  The original is untouched.

    Every named algorithm, replacement, and removal target must exist;
    otherwise the full set of offenders is reported in one error.
    """
    problems: list[str] = []

    canonical = {}
    for old, new in overlay.replace_algorithms:
        old_name, old_flags = parse_primitive_spec(old)
        new_name, new_flags = parse_primitive_spec(new)
        if bundle.registry.lookup(new_name, new_flags) is None:
            problems.append(f"replacement {new} is not in the registry")
        canonical[primitive_key(old_name, old_flags)] = (new_name, new_flags)

    ids = (
        {b.label for b in bundle.classifications}
        | {r.id for r in bundle.data}
        | {r.id for r in bundle.assets}
        | {r.id for r in bundle.crypto_objects}
    )
    missing = [r for r in overlay.remove_records if r not in ids]
    problems.extend(f"cannot remove unknown record {r}" for r in missing)

    added = []
    for entry in overlay.add_records:
        try:
            added.append(_record_from_dict(entry))
        except (KeyError, ValueError) as exc:
            problems.append(f"bad added record: {exc}")

    if problems:
        raise OverlayError("; ".join(problems))

    drop = set(overlay.remove_records)
    classifications = [b for b in bundle.classifications if b.label not in drop]
    data = [r for r in bundle.data if r.id not in drop]
    assets = [r for r in bundle.assets if r.id not in drop]
    crypto = []
    for record in bundle.crypto_objects:
        if record.id in drop:
            continue
        if record.algorithm is not None:
            key = primitive_key(record.algorithm, record.config_flags)
            if key in canonical:
                name, flags = canonical[key]
                record = replace(record, algorithm=name, config_flags=flags)
        crypto.append(record)

    from .model import AssetRecord, ClassificationBinding, CryptoObjectRecord, DataRecord

    next_rank = max((b.rank for b in classifications), default=-1) + 1
    for raw, record in zip(overlay.add_records, added):
        if isinstance(record, ClassificationBinding):
            # an added classification ranks least sensitive unless pinned
            if "rank" not in raw:
                record = replace(record, rank=next_rank)
                next_rank += 1
            classifications.append(record)
        elif isinstance(record, DataRecord):
            data.append(record)
        elif isinstance(record, AssetRecord):
            assets.append(record)
        elif isinstance(record, CryptoObjectRecord):
            crypto.append(record)

    return InventoryBundle(
        classifications=tuple(classifications),
        data=tuple(sorted(data, key=lambda r: r.id)),
        assets=tuple(sorted(assets, key=lambda r: r.id)),
        crypto_objects=tuple(sorted(crypto, key=lambda r: r.id)),
        registry=bundle.registry,
        profiles=bundle.profiles,
    )
