"""Compilation of an inventory bundle into a typed security dependency graph.

An edge ``a -> b`` means the security of ``a`` relies on the security of
``b``.  Every edge is tagged with the rule that produced it and carries the
provenance of the records that forced it; identical edges produced by
several records merge into one multi-provenance edge.

The rule catalogue:

======  =====================================================================
SL1     a required security level supports each classification requiring it
SL2     a primitive configuration provides the levels the registry rates it at
DC1     a classification covers each data asset carrying it
D1      data relies on the assets it is stored on
D2      data relies on the channels it moves over
D3      data relies on the processes that use it
K1      secret and private keys rely on the assets holding or using them,
        including key-management locations for any crypto object
K2      private keys follow K1 (alias kept for catalogue completeness)
K3      public keys rely on their matched private key and storage asset
K4      keys rely on the primitive configuration they are used with
K5      keys rely on the process that created them
K6      certificates rely on their signature algorithm, embedded public key,
        and issuing certificate (self-signed certificates stop the chain)
K7      CA certificates additionally rely on their storage asset
P2      protocol configurations rely on their member primitives
M1      processors rely on the symmetric/private keys they store
M2      processors rely on the public keys and certificates they store
M3      a processor stands in for its unlisted processes: references from a
        processor to crypto objects or algorithms become reliance edges
PR1     processes rely on the primitives and protocols they use
PR2     processes rely on the processor they run on
PR3     processes rely on their sub-processes and software
PR4     processes rely on the keys they use
CH1     channels rely on the protocols, primitives, and keys securing them
CH2     channels and the entities communicating over them rely on each other
AC1     access relations couple an asset and a service (two-way, or a single
        service-to-asset edge for read-only access)
======  =====================================================================

Which rule fires for a reference column on an asset row depends on the kind
of the source asset and on what the target resolves to (crypto object,
algorithm, data, or another asset).  Dedicated access-record rows always
produce AC1 edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import (
    AssetKind,
    AssetRecord,
    Configuration,
    CryptoObjectType,
    Direction,
    InventoryBundle,
    RatingDimension,
    RefOrigin,
    SecurityRating,
    Source,
    parse_primitive_spec,
    primitive_key,
)

__all__ = [
    "VertexKind",
    "Vertex",
    "Edge",
    "DependencyGraph",
    "UnknownVertexError",
    "RULES",
    "build_graph",
    "explain_edge",
]


RULES: dict[str, str] = {
    "SL1": "required security level -> classification requiring it",
    "SL2": "primitive configuration -> security level it provides",
    "DC1": "classification -> data asset carrying it",
    "D1": "data -> storage asset",
    "D2": "data -> channel carrying it",
    "D3": "data -> process using it",
    "K1": "secret/private key -> asset holding or using it",
    "K2": "private keys follow K1",
    "K3": "public key -> matched private key / storage asset",
    "K4": "key -> primitive configuration",
    "K5": "key -> creating process",
    "K6": "certificate -> signature algorithm / public key / issuer",
    "K7": "CA certificate -> storage asset",
    "P2": "protocol configuration -> member primitive",
    "M1": "processor -> stored symmetric/private key",
    "M2": "processor -> stored public key or certificate",
    "M3": "processor (process proxy) -> crypto object or algorithm used",
    "PR1": "process -> primitive or protocol used",
    "PR2": "process -> its processor",
    "PR3": "process -> sub-process or software",
    "PR4": "process -> key used",
    "CH1": "channel -> underlying protocol, primitive, or key",
    "CH2": "channel <-> communicating entity",
    "AC1": "access relation between asset and service",
}


class VertexKind(str, Enum):
    SECURITY_LEVEL = "SecurityLevel"
    CLASSIFICATION = "Classification"
    DATA_ASSET = "DataAsset"
    PROCESSOR = "Processor"
    PROCESS = "Process"
    CHANNEL = "Channel"
    KEY = "Key"
    CERTIFICATE = "Certificate"
    PRIMITIVE_CONFIG = "PrimitiveConfig"


_ASSET_VERTEX_KIND = {
    AssetKind.PROCESSOR: VertexKind.PROCESSOR,
    AssetKind.SERVICE: VertexKind.PROCESSOR,
    AssetKind.CHANNEL: VertexKind.CHANNEL,
    AssetKind.PROCESS: VertexKind.PROCESS,
    AssetKind.SOFTWARE: VertexKind.PROCESS,
}

_DATA_LOCATION_RULE = {
    VertexKind.PROCESSOR: "D1",
    VertexKind.CHANNEL: "D2",
    VertexKind.PROCESS: "D3",
}


class UnknownVertexError(KeyError):
    """Raised when an operation names a vertex that is not in the graph."""


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: VertexKind
    display: str
    payload: SecurityRating | Configuration | None = None


@dataclass(frozen=True)
class Edge:
    frm: str
    to: str
    rule: str
    provenance: tuple[Source, ...] = ()


@dataclass(frozen=True)
class DependencyGraph:
    """Immutable digraph in canonical order: vertices sorted by id, edges by
    (from, to, rule).  Two-cycles are legal; the graph need not be acyclic."""

    vertices: tuple[Vertex, ...] = ()
    edges: tuple[Edge, ...] = ()

    def vertex_map(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    def adjacency(self) -> dict[str, list[str]]:
        """Sorted successor lists, deduplicated across rules."""
        out: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        seen: set[tuple[str, str]] = set()
        for edge in self.edges:
            if (edge.frm, edge.to) not in seen:
                seen.add((edge.frm, edge.to))
                out[edge.frm].append(edge.to)
        return out

    def edges_by_rule(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for edge in self.edges:
            counts[edge.rule] = counts.get(edge.rule, 0) + 1
        return dict(sorted(counts.items()))


def explain_edge(graph: DependencyGraph, frm: str, to: str) -> list[tuple[str, Source]]:
    """Every (rule, provenance) pair justifying the edge ``frm -> to``.

    Returns an empty list when the vertices exist but the edge does not;
    raises UnknownVertexError when either vertex is absent.
    """
    ids = {v.id for v in graph.vertices}
    for vertex_id in (frm, to):
        if vertex_id not in ids:
            raise UnknownVertexError(f"no vertex {vertex_id!r} in the graph")
    pairs = []
    for edge in graph.edges:
        if edge.frm == frm and edge.to == to:
            pairs.extend((edge.rule, source) for source in edge.provenance)
    return pairs


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

@dataclass
class _Builder:
    bundle: InventoryBundle
    active_dims: frozenset[RatingDimension]
    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: dict[tuple[str, str, str], set[Source]] = field(default_factory=dict)
    _expanded_configs: set[str] = field(default_factory=set)

    def vertex(self, vertex_id: str, kind: VertexKind, display: str | None = None, payload=None) -> str:
        # first registration wins, so record processing order (canonical
        # bundle order) decides ties between colliding namespaces
        if vertex_id not in self.vertices:
            self.vertices[vertex_id] = Vertex(vertex_id, kind, display or vertex_id, payload)
        return vertex_id

    def edge(self, frm: str, to: str, rule: str, source: Source) -> None:
        if frm == to:
            return
        self.edges.setdefault((frm, to, rule), set()).add(source)

    # -- vertex helpers ----------------------------------------------------

    def level(self, rating: SecurityRating) -> str:
        return self.vertex(rating.key, VertexKind.SECURITY_LEVEL, rating.display, rating)

    def asset(self, asset_id: str) -> str:
        record = self.bundle.asset_map().get(asset_id)
        if record is None:
            return self.vertex(asset_id, VertexKind.PROCESSOR)
        kind = _ASSET_VERTEX_KIND[record.effective_kind]
        return self.vertex(asset_id, kind, record.display)

    def config(self, algorithm: str, flags) -> str:
        """Vertex for a primitive configuration, expanding registry ratings
        (SL2) and protocol members (P2) exactly once."""
        key = primitive_key(algorithm, flags)
        configuration = self.bundle.registry.lookup(algorithm, flags)
        self.vertex(key, VertexKind.PRIMITIVE_CONFIG, payload=configuration)
        if key in self._expanded_configs:
            return key
        self._expanded_configs.add(key)
        if configuration is None:
            return key
        for rating in configuration.ratings:
            if rating.dimension in self.active_dims:
                self.edge(key, self.level(rating), "SL2", configuration.source)
        for member_spec in configuration.uses:
            member_name, member_flags = parse_primitive_spec(member_spec)
            member_key = self.config(member_name, member_flags)
            self.edge(key, member_key, "P2", configuration.source)
        return key

    def finish(self) -> DependencyGraph:
        vertices = tuple(sorted(self.vertices.values(), key=lambda v: v.id))
        edges = tuple(
            Edge(frm, to, rule, tuple(sorted(sources, key=lambda s: (s.file, s.ref))))
            for (frm, to, rule), sources in sorted(self.edges.items())
        )
        return DependencyGraph(vertices, edges)


def build_graph(bundle: InventoryBundle) -> DependencyGraph:
    """Apply the rule catalogue to every record in the bundle.

    Construction is additive: each record only ever contributes vertices and
    edges, so growing the bundle grows the graph.  Security levels are
    created only for dimensions some classification requires; a registry
    rating in a dimension nothing requires stays out of the graph.
    """
    active = frozenset(
        rating.dimension for binding in bundle.classifications for rating in binding.required
    )
    builder = _Builder(bundle, active)

    for binding in bundle.classifications:
        classification = builder.vertex(binding.label, VertexKind.CLASSIFICATION)
        for rating in binding.required:
            builder.edge(builder.level(rating), classification, "SL1", binding.source)

    for record in bundle.data:
        data_vertex = builder.vertex(record.id, VertexKind.DATA_ASSET, record.display)
        if record.classification:
            classification = builder.vertex(record.classification, VertexKind.CLASSIFICATION)
            builder.edge(classification, data_vertex, "DC1", record.source)
        for location in record.storage_locations:
            target = builder.asset(location)
            rule = _DATA_LOCATION_RULE.get(builder.vertices[target].kind, "D1")
            builder.edge(data_vertex, target, rule, record.source)

    for record in bundle.assets:
        _apply_asset_rules(builder, record)

    for record in bundle.crypto_objects:
        _apply_crypto_rules(builder, record)

    return builder.finish()


def _apply_asset_rules(builder: _Builder, record: AssetRecord) -> None:
    source_vertex = builder.asset(record.id)
    source_kind = builder.vertices[source_vertex].kind
    for target in record.serves:
        other = builder.asset(target)
        builder.edge(source_vertex, other, "AC1", record.source)
        builder.edge(other, source_vertex, "AC1", record.source)
    for ref in record.accesses:
        provenance = ref.source or record.source
        if ref.origin is RefOrigin.ACCESS_RECORD:
            _access_pair(builder, source_vertex, builder.asset(ref.target), ref.direction, provenance)
        else:
            _typed_reference(builder, source_vertex, source_kind, ref, provenance)


def _access_pair(builder: _Builder, asset: str, service: str, direction: Direction, source: Source) -> None:
    # read-only access means only the service leans on the asset
    builder.edge(service, asset, "AC1", source)
    if direction is Direction.TWO_WAY:
        builder.edge(asset, service, "AC1", source)


def _typed_reference(builder: _Builder, src: str, src_kind: VertexKind, ref, source: Source) -> None:
    """Interpret a reference column on an asset row by its target's type."""
    bundle = builder.bundle
    target = ref.target

    if target in bundle.crypto_map():
        obj = bundle.crypto_map()[target]
        kind = VertexKind.KEY if obj.is_key else VertexKind.CERTIFICATE
        target_vertex = builder.vertex(target, kind, obj.display)
        rule = {
            VertexKind.PROCESS: "PR4",
            VertexKind.CHANNEL: "CH1",
        }.get(src_kind, "M3")
        builder.edge(src, target_vertex, rule, source)
        return

    if target in bundle.data_map():
        record = bundle.data_map()[target]
        data_vertex = builder.vertex(target, VertexKind.DATA_ASSET, record.display)
        rule = _DATA_LOCATION_RULE.get(src_kind, "D1")
        builder.edge(data_vertex, src, rule, source)
        return

    if target in bundle.asset_map():
        target_vertex = builder.asset(target)
        target_kind = builder.vertices[target_vertex].kind
        if src_kind is VertexKind.CHANNEL or target_kind is VertexKind.CHANNEL:
            builder.edge(src, target_vertex, "CH2", source)
            builder.edge(target_vertex, src, "CH2", source)
        elif src_kind is VertexKind.PROCESS:
            rule = "PR2" if target_kind is VertexKind.PROCESSOR else "PR3"
            builder.edge(src, target_vertex, rule, source)
        else:
            _access_pair(builder, src, target_vertex, ref.direction, source)
        return

    algorithm = _algorithm_reference(bundle, target)
    if algorithm is not None:
        target_vertex = builder.config(*algorithm)
        rule = {
            VertexKind.PROCESS: "PR1",
            VertexKind.CHANNEL: "CH1",
        }.get(src_kind, "M3")
        builder.edge(src, target_vertex, rule, source)
        return

    # unresolvable reference: behave like an access to an undeclared asset
    _access_pair(builder, src, builder.asset(target), ref.direction, source)


def _algorithm_reference(bundle: InventoryBundle, target: str) -> tuple[str, tuple[str, ...]] | None:
    try:
        name, flags = parse_primitive_spec(target)
    except ValueError:
        return None
    if name in bundle.registry.algorithms:
        return name, flags
    return None


def _apply_crypto_rules(builder: _Builder, record) -> None:
    kind = VertexKind.KEY if record.is_key else VertexKind.CERTIFICATE
    obj = builder.vertex(record.id, kind, record.display)
    secretish = record.object_type in (
        CryptoObjectType.SYMMETRIC_KEY,
        CryptoObjectType.PRIVATE_KEY,
    )

    if record.location:
        location = builder.asset(record.location)
        location_kind = builder.vertices[location].kind
        if secretish:
            builder.edge(obj, location, "K1", record.source)
            if location_kind is VertexKind.PROCESSOR:
                builder.edge(location, obj, "M1", record.source)
        elif record.object_type is CryptoObjectType.PUBLIC_KEY:
            builder.edge(obj, location, "K3", record.source)
            if location_kind is VertexKind.PROCESSOR:
                builder.edge(location, obj, "M2", record.source)
        else:
            if record.object_type is CryptoObjectType.CA_CERTIFICATE:
                builder.edge(obj, location, "K7", record.source)
            if location_kind is VertexKind.PROCESSOR:
                builder.edge(location, obj, "M2", record.source)

    # key-management locations hold the underlying key material, so every
    # kind of crypto object leans on them
    for key_location in record.key_locations:
        builder.edge(obj, builder.asset(key_location), "K1", record.source)

    if record.algorithm is not None:
        config = builder.config(record.algorithm, record.config_flags)
        builder.edge(obj, config, "K6" if record.is_certificate else "K4", record.source)

    if record.is_key and record.created_by:
        builder.edge(obj, builder.asset(record.created_by), "K5", record.source)

    if record.matched_key:
        rule = "K6" if record.is_certificate else "K3"
        matched = builder.bundle.crypto_map().get(record.matched_key)
        matched_kind = (
            VertexKind.KEY if matched is None or matched.is_key else VertexKind.CERTIFICATE
        )
        target = builder.vertex(
            record.matched_key, matched_kind, matched.display if matched else record.matched_key
        )
        builder.edge(obj, target, rule, record.source)

    if record.is_certificate and record.issuer_cert and record.issuer_cert != record.id:
        issuer = builder.bundle.crypto_map().get(record.issuer_cert)
        target = builder.vertex(
            record.issuer_cert,
            VertexKind.CERTIFICATE,
            issuer.display if issuer else record.issuer_cert,
        )
        builder.edge(obj, target, "K6", record.source)
