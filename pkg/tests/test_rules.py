from __future__ import annotations

import pytest

from cryptodep import (
    AccessRef,
    AssetKind,
    AssetRecord,
    ClassificationBinding,
    CryptoObjectRecord,
    CryptoObjectType,
    DataRecord,
    Direction,
    SecurityRating,
    Source,
    UnknownVertexError,
    VertexKind,
    assemble_bundle,
    build_graph,
    explain_edge,
    load_default_registry,
)
from cryptodep.ingest import parse_registry_text
from cryptodep.model import RefOrigin


def triples(graph):
    return {(e.frm, e.to, e.rule) for e in graph.edges}


def kinds(graph):
    return {v.id: v.kind for v in graph.vertices}


def graph_from(records, registry=None):
    bundle, _ = assemble_bundle(records, registry or load_default_registry())
    return build_graph(bundle)


def src(name="t.csv", ref="r"):
    return Source(name, ref)


HIGH = ClassificationBinding(
    "High", (SecurityRating.approval("approved"),), rank=0, source=src("c.csv", "High")
)


# --------------------------------------------------------------------------
# whole-graph shape on the bundled minimal fixture
# --------------------------------------------------------------------------

def test_cloud_minimal_graph_is_exactly_the_expected_eight_vertices(cloud_minimal_bundle):
    graph = build_graph(cloud_minimal_bundle)
    assert kinds(graph) == {
        "Approval:approved": VertexKind.SECURITY_LEVEL,
        "Approval:not-approved": VertexKind.SECURITY_LEVEL,
        "High": VertexKind.CLASSIFICATION,
        "Data1": VertexKind.DATA_ASSET,
        "DB1": VertexKind.PROCESSOR,
        "WWW1": VertexKind.PROCESSOR,
        "certkey1": VertexKind.KEY,
        "RSA[1024]": VertexKind.PRIMITIVE_CONFIG,
    }
    assert triples(graph) == {
        ("Approval:approved", "High", "SL1"),
        ("High", "Data1", "DC1"),
        ("Data1", "DB1", "D1"),
        ("DB1", "WWW1", "AC1"),
        ("WWW1", "DB1", "AC1"),
        ("certkey1", "WWW1", "K1"),
        ("WWW1", "certkey1", "M1"),
        ("certkey1", "RSA[1024]", "K4"),
        ("RSA[1024]", "Approval:not-approved", "SL2"),
    }


def test_graph_is_canonically_ordered(cloud_minimal_bundle):
    graph = build_graph(cloud_minimal_bundle)
    assert [v.id for v in graph.vertices] == sorted(v.id for v in graph.vertices)
    keys = [(e.frm, e.to, e.rule) for e in graph.edges]
    assert keys == sorted(keys)
    assert build_graph(cloud_minimal_bundle) == graph


# --------------------------------------------------------------------------
# level handling
# --------------------------------------------------------------------------

def test_levels_exist_only_for_required_dimensions():
    registry, _ = parse_registry_text(
        '{"name": "X", "configurations": [{"flags": ["1"], "security": 80, '
        '"NIST-approval": "approved"}]}',
        "r",
    )
    key = CryptoObjectRecord(
        id="K1", object_type=CryptoObjectType.SYMMETRIC_KEY,
        algorithm="X", config_flags=("1",), source=src(),
    )
    graph = graph_from([HIGH, key], registry)
    assert "Bits:80" not in kinds(graph)
    assert ("X[1]", "Approval:approved", "SL2") in triples(graph)

    wants_bits = ClassificationBinding(
        "Paranoid", (SecurityRating.bits(128),), rank=1, source=src("c.csv", "Paranoid")
    )
    wider = graph_from([HIGH, wants_bits, key], registry)
    assert ("X[1]", "Bits:80", "SL2") in triples(wider)
    assert ("Bits:128", "Paranoid", "SL1") in triples(wider)


def test_sl1_connects_every_required_level():
    binding = ClassificationBinding(
        "Dual",
        (SecurityRating.approval("approved"), SecurityRating.quantum("quantum-safe")),
        source=src("c.csv", "Dual"),
    )
    graph = graph_from([binding])
    assert triples(graph) == {
        ("Approval:approved", "Dual", "SL1"),
        ("QuantumSafety:quantum-safe", "Dual", "SL1"),
    }


def test_unrated_configuration_gets_a_vertex_but_no_levels():
    key = CryptoObjectRecord(
        id="K1", object_type=CryptoObjectType.SYMMETRIC_KEY,
        algorithm="HOMEBREW", config_flags=("9",), source=src(),
    )
    graph = graph_from([HIGH, key])
    assert kinds(graph)["HOMEBREW[9]"] is VertexKind.PRIMITIVE_CONFIG
    assert triples(graph) == {
        ("Approval:approved", "High", "SL1"),
        ("K1", "HOMEBREW[9]", "K4"),
    }


# --------------------------------------------------------------------------
# data rules
# --------------------------------------------------------------------------

def test_data_storage_rule_follows_location_kind():
    records = [
        AssetRecord(id="Box", kind=AssetKind.PROCESSOR, source=src()),
        AssetRecord(id="Wire", kind=AssetKind.CHANNEL, source=src()),
        AssetRecord(id="Job", kind=AssetKind.PROCESS, source=src()),
        DataRecord(id="D1", storage_locations=("Box", "Wire", "Job", "Ghost"), source=src()),
    ]
    graph = graph_from(records)
    assert ("D1", "Box", "D1") in triples(graph)
    assert ("D1", "Wire", "D2") in triples(graph)
    assert ("D1", "Job", "D3") in triples(graph)
    # unknown storage behaves as an undeclared processor
    assert ("D1", "Ghost", "D1") in triples(graph)
    assert kinds(graph)["Ghost"] is VertexKind.PROCESSOR


def test_classification_vertex_is_shared():
    records = [
        HIGH,
        DataRecord(id="D1", classification="High", source=src("d.csv", "D1")),
        DataRecord(id="D2", classification="High", source=src("d.csv", "D2")),
    ]
    graph = graph_from(records)
    assert [v.id for v in graph.vertices if v.kind is VertexKind.CLASSIFICATION] == ["High"]
    assert ("High", "D1", "DC1") in triples(graph)
    assert ("High", "D2", "DC1") in triples(graph)


# --------------------------------------------------------------------------
# key and certificate rules
# --------------------------------------------------------------------------

def _on_processor(object_type, **kwargs):
    return [
        AssetRecord(id="Host", kind=AssetKind.PROCESSOR, source=src()),
        CryptoObjectRecord(
            id="Obj", object_type=object_type, location="Host", source=src("k.csv", "Obj"), **kwargs
        ),
    ]


def test_private_key_on_processor():
    graph = graph_from(_on_processor(CryptoObjectType.PRIVATE_KEY))
    assert triples(graph) == {("Obj", "Host", "K1"), ("Host", "Obj", "M1")}


def test_symmetric_key_on_processor():
    graph = graph_from(_on_processor(CryptoObjectType.SYMMETRIC_KEY))
    assert triples(graph) == {("Obj", "Host", "K1"), ("Host", "Obj", "M1")}


def test_public_key_on_processor():
    graph = graph_from(_on_processor(CryptoObjectType.PUBLIC_KEY))
    assert triples(graph) == {("Obj", "Host", "K3"), ("Host", "Obj", "M2")}


def test_certificate_on_processor_is_stored_not_depended_on():
    graph = graph_from(_on_processor(CryptoObjectType.CERTIFICATE, algorithm="RSA", config_flags=("2048",)))
    assert ("Host", "Obj", "M2") in triples(graph)
    assert ("Obj", "Host", "K1") not in triples(graph)
    assert ("Obj", "Host", "K7") not in triples(graph)
    assert ("Obj", "RSA[2048]", "K6") in triples(graph)


def test_ca_certificate_relies_on_its_storage():
    graph = graph_from(_on_processor(CryptoObjectType.CA_CERTIFICATE, algorithm="RSA", config_flags=("2048",)))
    assert ("Obj", "Host", "K7") in triples(graph)
    assert ("Host", "Obj", "M2") in triples(graph)


def test_key_on_channel_has_no_storage_backedge():
    records = [
        AssetRecord(id="Wire", kind=AssetKind.CHANNEL, source=src()),
        CryptoObjectRecord(
            id="Obj", object_type=CryptoObjectType.PRIVATE_KEY, location="Wire", source=src()
        ),
    ]
    graph = graph_from(records)
    assert triples(graph) == {("Obj", "Wire", "K1")}


def test_key_management_location_applies_to_every_object_type():
    for object_type in CryptoObjectType:
        records = [
            CryptoObjectRecord(
                id="Obj",
                object_type=object_type,
                key_locations=("KMS",),
                algorithm="RSA" if object_type.value.endswith("ertificate") else None,
                config_flags=("2048",) if object_type.value.endswith("ertificate") else (),
                source=src(),
            )
        ]
        graph = graph_from(records)
        assert ("Obj", "KMS", "K1") in triples(graph), object_type


def test_key_links_to_configuration_and_creator():
    records = [
        AssetRecord(id="Provisioner", kind=AssetKind.PROCESS, source=src()),
        CryptoObjectRecord(
            id="Obj",
            object_type=CryptoObjectType.SYMMETRIC_KEY,
            algorithm="AES",
            config_flags=("128",),
            created_by="Provisioner",
            source=src(),
        ),
    ]
    graph = graph_from(records)
    assert ("Obj", "AES[128]", "K4") in triples(graph)
    assert ("Obj", "Provisioner", "K5") in triples(graph)


def test_certificates_do_not_take_creator_edges():
    records = [
        CryptoObjectRecord(
            id="Obj",
            object_type=CryptoObjectType.CERTIFICATE,
            algorithm="RSA",
            config_flags=("2048",),
            created_by="Provisioner",
            source=src(),
        )
    ]
    graph = graph_from(records)
    assert not [t for t in triples(graph) if t[2] == "K5"]


def test_matched_key_edges():
    records = [
        CryptoObjectRecord(id="Priv", object_type=CryptoObjectType.PRIVATE_KEY, source=src()),
        CryptoObjectRecord(
            id="Pub", object_type=CryptoObjectType.PUBLIC_KEY, matched_key="Priv", source=src()
        ),
        CryptoObjectRecord(
            id="Cert",
            object_type=CryptoObjectType.CERTIFICATE,
            algorithm="RSA",
            config_flags=("2048",),
            matched_key="Pub",
            source=src(),
        ),
    ]
    graph = graph_from(records)
    assert ("Pub", "Priv", "K3") in triples(graph)
    assert ("Cert", "Pub", "K6") in triples(graph)


def test_issuer_chain_stops_at_self_signed_roots():
    records = [
        CryptoObjectRecord(
            id="Leaf",
            object_type=CryptoObjectType.CERTIFICATE,
            algorithm="RSA",
            config_flags=("2048",),
            issuer_cert="Root",
            source=src(),
        ),
        CryptoObjectRecord(
            id="Root",
            object_type=CryptoObjectType.CA_CERTIFICATE,
            algorithm="RSA",
            config_flags=("2048",),
            issuer_cert="Root",
            source=src(),
        ),
    ]
    graph = graph_from(records)
    assert ("Leaf", "Root", "K6") in triples(graph)
    assert ("Root", "Root", "K6") not in triples(graph)


def test_protocol_configurations_expand_to_members():
    records = [
        HIGH,
        CryptoObjectRecord(
            id="Cert",
            object_type=CryptoObjectType.CERTIFICATE,
            algorithm="TLS",
            config_flags=("1.2",),
            source=src(),
        ),
    ]
    graph = graph_from(records)
    got = triples(graph)
    assert ("Cert", "TLS[1.2]", "K6") in got
    assert ("TLS[1.2]", "RSA[2048]", "P2") in got
    assert ("TLS[1.2]", "ECDH[P-256]", "P2") in got
    assert ("TLS[1.2]", "AES[128]", "P2") in got
    # members contribute their own level edges
    assert ("RSA[2048]", "Approval:approved", "SL2") in got


# --------------------------------------------------------------------------
# typed reference columns
# --------------------------------------------------------------------------

def _reference_fixture(owner_kind, target_id):
    records = [
        AssetRecord(id="Box", kind=AssetKind.PROCESSOR, source=src("a.csv", "Box")),
        AssetRecord(id="Svc", kind=AssetKind.SERVICE, source=src("a.csv", "Svc")),
        AssetRecord(id="Wire", kind=AssetKind.CHANNEL, source=src("a.csv", "Wire")),
        AssetRecord(id="Job", kind=AssetKind.PROCESS, source=src("a.csv", "Job")),
        AssetRecord(id="App", kind=AssetKind.SOFTWARE, source=src("a.csv", "App")),
        DataRecord(id="D1", source=src("d.csv", "D1")),
        CryptoObjectRecord(id="K1", object_type=CryptoObjectType.SYMMETRIC_KEY, source=src("k.csv", "K1")),
        AssetRecord(
            id="Owner",
            kind=owner_kind,
            accesses=(
                AccessRef(target_id, origin=RefOrigin.ASSET_FIELD, source=src("a.csv", "Owner")),
            ),
            source=src("a.csv", "Owner"),
        ),
    ]
    return graph_from(records)


@pytest.mark.parametrize(
    "owner_kind,target,expected",
    [
        (AssetKind.PROCESSOR, "K1", ("Owner", "K1", "M3")),
        (AssetKind.SERVICE, "K1", ("Owner", "K1", "M3")),
        (AssetKind.PROCESS, "K1", ("Owner", "K1", "PR4")),
        (AssetKind.CHANNEL, "K1", ("Owner", "K1", "CH1")),
        (AssetKind.PROCESSOR, "RSA[2048]", ("Owner", "RSA[2048]", "M3")),
        (AssetKind.PROCESS, "RSA[2048]", ("Owner", "RSA[2048]", "PR1")),
        (AssetKind.SOFTWARE, "RSA[2048]", ("Owner", "RSA[2048]", "PR1")),
        (AssetKind.CHANNEL, "RSA[2048]", ("Owner", "RSA[2048]", "CH1")),
        (AssetKind.PROCESSOR, "D1", ("D1", "Owner", "D1")),
        (AssetKind.PROCESS, "D1", ("D1", "Owner", "D3")),
        (AssetKind.CHANNEL, "D1", ("D1", "Owner", "D2")),
        (AssetKind.PROCESS, "Box", ("Owner", "Box", "PR2")),
        (AssetKind.PROCESS, "App", ("Owner", "App", "PR3")),
        (AssetKind.PROCESS, "Job", ("Owner", "Job", "PR3")),
    ],
)
def test_reference_rule_dispatch(owner_kind, target, expected):
    graph = _reference_fixture(owner_kind, target)
    assert expected in triples(graph)


def test_channel_references_couple_both_ways():
    graph = _reference_fixture(AssetKind.PROCESSOR, "Wire")
    assert ("Owner", "Wire", "CH2") in triples(graph)
    assert ("Wire", "Owner", "CH2") in triples(graph)
    graph = _reference_fixture(AssetKind.CHANNEL, "Box")
    assert ("Owner", "Box", "CH2") in triples(graph)
    assert ("Box", "Owner", "CH2") in triples(graph)


def test_processor_to_asset_reference_is_an_access_pair():
    graph = _reference_fixture(AssetKind.PROCESSOR, "Svc")
    assert ("Svc", "Owner", "AC1") in triples(graph)
    assert ("Owner", "Svc", "AC1") in triples(graph)


def test_unresolvable_reference_materialises_an_asset():
    graph = _reference_fixture(AssetKind.PROCESSOR, "Mystery")
    assert kinds(graph)["Mystery"] is VertexKind.PROCESSOR
    assert ("Mystery", "Owner", "AC1") in triples(graph)
    assert ("Owner", "Mystery", "AC1") in triples(graph)


def test_serves_couples_both_directions():
    records = [
        AssetRecord(id="Web", kind=AssetKind.PROCESSOR, serves=("Crm",), source=src()),
    ]
    graph = graph_from(records)
    assert ("Web", "Crm", "AC1") in triples(graph)
    assert ("Crm", "Web", "AC1") in triples(graph)


def test_read_only_access_gives_a_single_edge():
    records = [
        AssetRecord(id="A", kind=AssetKind.PROCESSOR, source=src("a.csv", "A")),
        AssetRecord(id="S", kind=AssetKind.SERVICE, source=src("a.csv", "S")),
        AssetRecord(
            id="A",
            accesses=(
                AccessRef(
                    "S",
                    direction=Direction.READ_ONLY,
                    origin=RefOrigin.ACCESS_RECORD,
                    source=src("x.csv", "A->S"),
                ),
            ),
            source=src("x.csv", "A->S"),
        ),
    ]
    graph = graph_from(records)
    assert ("S", "A", "AC1") in triples(graph)
    assert ("A", "S", "AC1") not in triples(graph)


def test_duplicate_references_merge_provenance():
    def ref(fname):
        return AssetRecord(
            id="A",
            accesses=(
                AccessRef("S", origin=RefOrigin.ACCESS_RECORD, source=src(fname, "A->S")),
            ),
            source=src(fname, "A->S"),
        )

    graph = graph_from([ref("one.csv"), ref("two.csv")])
    edge = next(e for e in graph.edges if (e.frm, e.to) == ("A", "S"))
    assert [s.file for s in edge.provenance] == ["one.csv", "two.csv"]


def test_no_self_loops():
    records = [
        AssetRecord(
            id="A",
            kind=AssetKind.PROCESSOR,
            accesses=(AccessRef("A", origin=RefOrigin.ASSET_FIELD, source=src()),),
            source=src(),
        ),
        CryptoObjectRecord(
            id="Pub", object_type=CryptoObjectType.PUBLIC_KEY, matched_key="Pub", source=src()
        ),
    ]
    graph = graph_from(records)
    assert not [e for e in graph.edges if e.frm == e.to]


# --------------------------------------------------------------------------
# explain_edge
# --------------------------------------------------------------------------

def test_explain_edge_reports_rule_and_provenance(cloud_minimal_bundle):
    graph = build_graph(cloud_minimal_bundle)
    assert explain_edge(graph, "WWW1", "DB1") == [
        ("AC1", Source("cloudconfig.csv", "WWW1->DB1"))
    ]
    assert explain_edge(graph, "Data1", "RSA[1024]") == []
    with pytest.raises(UnknownVertexError):
        explain_edge(graph, "WWW1", "Ghost")
