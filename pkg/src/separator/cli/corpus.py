"""The bundled example manifests and their recorded verdicts."""
from __future__ import annotations

import json
from importlib.resources import files
from pathlib import Path


def corpus_dir() -> Path:
    return Path(str(files("separator") / "corpus"))


def corpus_files() -> list[Path]:
    return sorted(corpus_dir().glob("*.sep"))


def corpus_expectations() -> dict:
    return json.loads((corpus_dir() / "expected.json").read_text(encoding="utf-8"))
