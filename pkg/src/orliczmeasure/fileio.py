"""Delimited-text field formats and deterministic report emission.

Density fields and star bodies are stored as plain text, one row per
point: the point coordinates, the base-measure weight, and the value.
All floats are printed with 17 significant digits, which round-trips
IEEE doubles exactly. Report JSON and CSV are emitted with sorted keys,
the same float format, and no timestamps, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .spaces import DensityField, DomainTag, Measure, MeasureSpace
from .stargeo import SphereGrid, StarBodyGrid

__all__ = [
    "fmt_float",
    "write_density_field",
    "read_density_field",
    "read_measure",
    "write_star_body",
    "read_star_body",
    "to_jsonable",
    "dumps_json",
    "write_report",
    "validate_schema",
]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _write_rows(path: Path, header: list[str], matrix: np.ndarray) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for row in matrix:
            fh.write(" ".join(fmt_float(x) for x in row) + "\n")


def _read_rows(path: Path) -> tuple[dict, np.ndarray]:
    meta: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    key, _, val = part.partition("=")
                    if val:
                        meta[key] = val
                continue
            rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise InvalidParameterError(f"no data rows in {path}")
    return meta, np.asarray(rows)


def write_density_field(path, field: DensityField) -> None:
    """Rows of (coordinates..., weight, value) plus a metadata header."""
    path = Path(path)
    space = field.space
    matrix = np.column_stack([space.points, space.weights, field.values])
    header = [f"format=density domain={space.domain_tag.value} "
              f"dim={space.points.shape[1]} points={space.size}"]
    _write_rows(path, header, matrix)


def read_density_field(path) -> DensityField:
    path = Path(path)
    meta, data = _read_rows(path)
    if meta.get("format", "density") != "density":
        raise InvalidParameterError(f"{path} is not a density-field file")
    dim = int(meta.get("dim", "1"))
    if data.shape[1] != dim + 2:
        raise InvalidParameterError(
            f"expected {dim + 2} columns in {path}, found {data.shape[1]}")
    space = MeasureSpace(points=data[:, :dim], weights=data[:, dim],
                         domain_tag=DomainTag(meta.get("domain", "abstract")))
    return DensityField.infer(space, data[:, dim + 1])


def read_measure(path) -> Measure:
    return Measure(read_density_field(path))


def write_star_body(path, body: StarBodyGrid) -> None:
    """Rows of (node coordinates..., sigma weight, radial value)."""
    path = Path(path)
    grid = body.grid
    matrix = np.column_stack([grid.nodes, grid.sigma_weights, body.radial])
    header = [f"format=starbody dim={grid.dimension} points={grid.size}"]
    _write_rows(path, header, matrix)


def read_star_body(path) -> StarBodyGrid:
    path = Path(path)
    meta, data = _read_rows(path)
    if meta.get("format") != "starbody":
        raise InvalidParameterError(f"{path} is not a star-body file")
    dim = int(meta["dim"])
    if data.shape[1] != dim + 2:
        raise InvalidParameterError(
            f"expected {dim + 2} columns in {path}, found {data.shape[1]}")
    grid = SphereGrid(dimension=dim, nodes=data[:, :dim],
                      sigma_weights=data[:, dim])
    return StarBodyGrid(grid=grid, radial=data[:, dim + 1])


# ---------------------------------------------------------------------------
# deterministic JSON / CSV reports
# ---------------------------------------------------------------------------


def to_jsonable(obj):
    """Convert dataclasses, enums, and arrays to plain JSON-ready data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise InvalidParameterError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(fmt_float(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                parts.append(", ")
            parts.append(json.dumps(str(key)))
            parts.append(": ")
            _emit(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(", ")
            _emit(item, parts)
        parts.append("]")
    else:
        raise InvalidParameterError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    parts: list[str] = []
    _emit(to_jsonable(obj), parts)
    return "".join(parts) + "\n"


def write_report(out_dir, name: str, summary: dict,
                 rows: list[dict] | None = None) -> list[Path]:
    """Write ``<name>.json`` (summary) and optionally ``<name>.csv`` (rows)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    json_path = out / f"{name}.json"
    json_path.write_text(dumps_json(summary))
    written.append(json_path)
    if rows is not None:
        csv_path = out / f"{name}.csv"
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        with open(csv_path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([
                    fmt_float(v) if isinstance(v, (float, np.floating))
                    else v for v in (row.get(c, "") for c in columns)])
        written.append(csv_path)
    return written


def validate_schema(obj, schema: dict) -> list[str]:
    """Minimal structural validator for the shipped report schema.

    Supports the subset actually used: type, required, properties, and
    items. Returns a list of violations (empty when valid).
    """
    problems: list[str] = []

    def walk(node, sch, path):
        expected = sch.get("type")
        if expected == "object":
            if not isinstance(node, dict):
                problems.append(f"{path}: expected object")
                return
            for key in sch.get("required", []):
                if key not in node:
                    problems.append(f"{path}: missing required key {key!r}")
            for key, sub in sch.get("properties", {}).items():
                if key in node:
                    walk(node[key], sub, f"{path}.{key}")
        elif expected == "array":
            if not isinstance(node, list):
                problems.append(f"{path}: expected array")
                return
            if "items" in sch:
                for i, item in enumerate(node):
                    walk(item, sch["items"], f"{path}[{i}]")
        elif expected == "number":
            if not isinstance(node, (int, float)) or isinstance(node, bool):
                if node is not None:  # non-finite floats serialize to null
                    problems.append(f"{path}: expected number")
        elif expected == "integer":
            if not isinstance(node, int) or isinstance(node, bool):
                problems.append(f"{path}: expected integer")
        elif expected == "string":
            if not isinstance(node, str):
                problems.append(f"{path}: expected string")
        elif expected == "boolean":
            if not isinstance(node, bool):
                problems.append(f"{path}: expected boolean")

    walk(obj, schema, "$")
    return problems
