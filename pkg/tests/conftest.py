from __future__ import annotations

import io
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cryptodep import cli

SAMPLES = Path(__file__).resolve().parent.parent / "sample_inventories"
CLOUD_MINIMAL = SAMPLES / "cloud_minimal"
HYBRID = SAMPLES / "hybrid_enterprise"

CLOUD_FILES = ["classifications.csv", "data.csv", "cloudconfig.csv", "cryptoinventory.csv"]
HYBRID_FILES = ["classifications.csv", "data.csv", "assets.csv", "crypto.csv", "access.csv"]


def run_cli(args: list[str]) -> tuple[int, str, str]:
    """Drive the CLI in process, capturing exit code, stdout and stderr."""
    out, err = io.StringIO(), io.StringIO()
    try:
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main([str(a) for a in args])
    except SystemExit as exc:  # argparse errors
        code = exc.code if isinstance(exc.code, int) else 2
    return code, out.getvalue(), err.getvalue()


def cloud_minimal_args(command: str = "scan", *extra: str) -> list[str]:
    args = [command]
    args += [str(CLOUD_MINIMAL / f) for f in CLOUD_FILES]
    args += ["--registry", str(CLOUD_MINIMAL / "crypto.json"), "--paper-defaults"]
    args += list(extra)
    return args


def hybrid_args(command: str = "scan", *extra: str) -> list[str]:
    args = [command]
    args += [str(HYBRID / f) for f in HYBRID_FILES]
    args += ["--profiles", str(HYBRID / "profiles.json")]
    args += list(extra)
    return args


@pytest.fixture
def cloud_minimal_bundle():
    from cryptodep import load_bundle, parse_registry

    registry, reg_diags = parse_registry(CLOUD_MINIMAL / "crypto.json")
    bundle, diags = load_bundle(
        [CLOUD_MINIMAL / f for f in CLOUD_FILES],
        profiles=[],
        registry=registry,
        use_builtin_profiles=True,
    )
    assert not reg_diags
    return bundle


@pytest.fixture
def hybrid_bundle():
    from cryptodep import load_bundle, load_default_registry, parse_profiles

    profiles = parse_profiles(HYBRID / "profiles.json")
    bundle, diags = load_bundle(
        [HYBRID / f for f in HYBRID_FILES],
        profiles=profiles,
        registry=load_default_registry(),
    )
    return bundle
