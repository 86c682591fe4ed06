"""Locate bundled data files; HOLONOMY_FORGE_ASSETS overrides the directory."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

ENV_VAR = "HOLONOMY_FORGE_ASSETS"


def asset_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("holonomy_forge") / "assets"))


def asset_path(name: str) -> Path:
    path = asset_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"asset {name!r} not found in {path.parent}")
    return path


def read_asset(name: str) -> str:
    return asset_path(name).read_text(encoding="utf-8")


def data_lines(text: str):
    """Yield (line number, stripped line) for non-blank, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def figure1_points() -> frozenset[tuple[int, int]]:
    return frozenset(tuple(int(x) for x in line.split()) for _, line in data_lines(read_asset("figure1_g2_betti")))


def table1_entries() -> tuple[tuple[int, int, int], ...]:
    return tuple(tuple(int(x) for x in line.split()) for _, line in data_lines(read_asset("table1_spin7_betti")))
