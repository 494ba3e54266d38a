"""Grid-field directories: ``meta.json`` plus one CSV per component."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import KIND_COMPONENTS, Grid2, GridField

SCHEMA = "tfg/1"


class FieldFormatError(ValueError):
    pass


def save_field(f, path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {"schema": SCHEMA, "kind": f.kind, "n": 2, "grid_n": f.grid.n,
            "extent": f.grid.extent, "components": list(f.components)}
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    for name, comp in zip(f.components, f.data):
        # rows follow x2, columns follow x1
        np.savetxt(path / f"{name}.csv", comp, fmt="%.17g", delimiter=",")
    return path


def load_field(path):
    path = Path(path)
    try:
        meta = json.loads((path / "meta.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FieldFormatError(f"cannot read {path / 'meta.json'}: {exc}") from exc
    if meta.get("schema") != SCHEMA or meta.get("n") != 2:
        raise FieldFormatError(f"{path}: unsupported schema {meta.get('schema')!r}")
    kind = meta.get("kind")
    if kind not in KIND_COMPONENTS or list(meta.get("components", [])) != list(KIND_COMPONENTS[kind]):
        raise FieldFormatError(f"{path}: bad kind/components")
    grid = Grid2(int(meta["grid_n"]), float(meta["extent"]))
    data = []
    for name in meta["components"]:
        try:
            arr = np.loadtxt(path / f"{name}.csv", delimiter=",", ndmin=2)
        except OSError as exc:
            raise FieldFormatError(str(exc)) from exc
        if arr.shape != (grid.n, grid.n):
            raise FieldFormatError(f"{name}.csv has shape {arr.shape}, expected {(grid.n, grid.n)}")
        data.append(arr)
    return GridField(grid, kind, np.stack(data))
