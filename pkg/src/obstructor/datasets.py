"""Bundled triangulations, overridable with ``OBSTRUCTOR_DATA``."""

from __future__ import annotations

import os
from importlib.resources import files
from pathlib import Path

from .surface import SimplicialSurface, load_surface

BUNDLED = ("delta1", "delta2", "kb9_008", "csaszar", "tetrahedron")


def data_dir() -> Path:
    override = os.environ.get("OBSTRUCTOR_DATA")
    if override:
        return Path(override)
    return Path(str(files("obstructor") / "data"))


def resolve(name_or_path: str | os.PathLike) -> Path:
    """A file path as given, else ``<data dir>/<name>`` or ``<data dir>/<name>.tri``."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    base = data_dir()
    for cand in (base / p, base / f"{p}.tri", base / p.name, base / f"{p.name}.tri"):
        if cand.is_file():
            return cand
    raise FileNotFoundError(f"no triangulation file {name_or_path!s} (data directory {base})")


def load(name_or_path: str | os.PathLike) -> SimplicialSurface:
    return load_surface(resolve(name_or_path).read_text())
