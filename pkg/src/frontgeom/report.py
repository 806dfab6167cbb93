"""Report assembly, JSON serialization and OBJ export."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Optional

import numpy as np

SCHEMA_VERSION = "1.0"


# -- JSON ---------------------------------------------------------------------------

def _plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and enums into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if not any(c in text for c in ".en"):
            text += ".0"
        return text
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _emit(_plain(obj), indent, 0) + "\n"


def config_hash(config: dict) -> str:
    canonical = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass
class Report:
    command: str
    job: dict
    config: dict
    tolerances: dict
    sections: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def warn(self, where: str, message: str) -> None:
        self.warnings.append({"where": where, "message": message})

    def error(self, where: str, exc: BaseException) -> None:
        self.errors.append({"where": where, "type": type(exc).__name__, "message": str(exc)})

    def to_dict(self) -> dict:
        from . import __version__

        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "frontgeom", "version": __version__},
            "command": self.command,
            "job": self.job,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "tolerances": self.tolerances,
            **self.sections,
            "warnings": self.warnings,
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


# -- OBJ ------------------------------------------------------------------------------

@dataclass
class MeshObject:
    """A grid mesh; ``None`` vertices are dropped along with every face touching them."""

    name: str
    grid: list  # rows of (x, y, z) or None


@dataclass
class PolylineObject:
    name: str
    polylines: list  # each an (n, 3) array


def write_obj(path, meshes: Iterable[MeshObject], polylines: Iterable[PolylineObject] = (),
              header: Optional[str] = None) -> dict:
    """Write meshes and polylines to one OBJ file; returns per-object counts."""
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    counts = {}
    offset = 0
    for m in meshes:
        lines.append(f"o {m.name}")
        index = {}
        nv = 0
        for i, row in enumerate(m.grid):
            for j, x in enumerate(row):
                if x is None:
                    continue
                nv += 1
                index[i, j] = offset + nv
                lines.append("v " + " ".join(format(float(c), ".17g") for c in x))
        nf = 0
        for i in range(len(m.grid) - 1):
            for j in range(len(m.grid[i]) - 1):
                quad = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                if all(q in index for q in quad):
                    lines.append("f " + " ".join(str(index[q]) for q in quad))
                    nf += 1
        offset += nv
        counts[m.name] = {"kind": "mesh", "vertices": nv, "faces": nf}
    for pl in polylines:
        lines.append(f"o {pl.name}")
        nl = 0
        nv_total = 0
        for poly in pl.polylines:
            poly = np.asarray(poly, dtype=float)
            if len(poly) < 2:
                continue
            for x in poly:
                lines.append("v " + " ".join(format(float(c), ".17g") for c in x))
            lines.append("l " + " ".join(str(offset + k + 1) for k in range(len(poly))))
            offset += len(poly)
            nv_total += len(poly)
            nl += 1
        counts[pl.name] = {"kind": "polyline", "vertices": nv_total, "lines": nl}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return counts
