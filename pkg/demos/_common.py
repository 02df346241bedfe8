"""Shared plumbing for the demo scripts.

Every demo works on the same synthetic 21-image dataset, built once under
demos/out/fixture so the scripts stay runnable offline and side-effect free
outside that directory.
"""

from __future__ import annotations

from pathlib import Path

from woundtissue.core import DatasetManifest, load_manifest
from woundtissue.synthetic import build_synthetic_fixture

OUT_DIR = Path(__file__).resolve().parent / "out"


def demo_dataset() -> DatasetManifest:
    fixture = OUT_DIR / "fixture"
    if not (fixture / "manifest.csv").is_file():
        fixture.mkdir(parents=True, exist_ok=True)
        build_synthetic_fixture(fixture, seed=0)
    return load_manifest(fixture / "manifest.csv")


def out_path(name: str) -> Path:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    return OUT_DIR / name
