"""Scene and raster file I/O.

Raster format "RSETv1" (binary occupancy and label masks):

    RSETv1
    dim <n>
    dims <d1> ... <dn>
    origin <o1> ... <on>
    spacing <s>
    data raw
    <prod(dims) payload bytes, first coordinate fastest>

Occupancy payloads hold bytes 0x00/0x01; mask payloads hold the label codes
0..3.  Headers are ASCII lines; floats are written with 17 significant
digits so write -> read round-trips exactly.

Scene files are JSON with fields ``dim``, ``domain`` and ``set`` (plus
optional ``name``, ``reference`` and ``tolerance`` for corpus cases); node
kinds mirror the set-expression constructors, see the README schema table.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SceneFormatError
from .geometry import (
    Ball,
    Box,
    Complement,
    Difference,
    Domain,
    HalfSpace,
    Intersection,
    Raster,
    RasterGrid,
    SetExpr,
    Union,
)

MAGIC = "RSETv1"


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# RSETv1


def write_rset(path, grid: RasterGrid, payload: np.ndarray | None = None) -> None:
    """Write a raster (or, with an explicit payload, a label mask sharing the
    grid's geometry)."""
    if payload is None:
        payload = grid.flat_occupancy()
    else:
        payload = np.asarray(payload, dtype=np.uint8).reshape(-1, order="F")
        if payload.size != int(np.prod(grid.dims)):
            raise SceneFormatError("payload length must equal prod(dims)")
    header = "\n".join([
        MAGIC,
        f"dim {grid.dim}",
        "dims " + " ".join(str(d) for d in grid.dims),
        "origin " + " ".join(fmt_float(o) for o in grid.origin),
        f"spacing {fmt_float(grid.spacing)}",
        "data raw",
    ]) + "\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def _read_rset_raw(path) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as fh:
        blob = fh.read()
    fields: dict = {}
    pos = 0
    for lineno in range(6):
        end = blob.find(b"\n", pos)
        if end < 0:
            raise SceneFormatError(f"{path}: truncated header at line {lineno + 1}")
        line = blob[pos:end].decode("ascii", errors="replace").strip()
        pos = end + 1
        if lineno == 0:
            if line != MAGIC:
                raise SceneFormatError(f"{path}: bad magic {line!r}")
            continue
        try:
            key, rest = line.split(" ", 1)
        except ValueError as exc:
            raise SceneFormatError(f"{path}: malformed header line {lineno + 1}: {line!r}") from exc
        fields[key] = rest
    try:
        dim = int(fields["dim"])
        dims = tuple(int(t) for t in fields["dims"].split())
        origin = [float(t) for t in fields["origin"].split()]
        spacing = float(fields["spacing"])
    except (KeyError, ValueError) as exc:
        raise SceneFormatError(f"{path}: malformed header: {exc}") from exc
    if fields.get("data") != "raw":
        raise SceneFormatError(f"{path}: unsupported data encoding {fields.get('data')!r}")
    if len(dims) != dim or len(origin) != dim:
        raise SceneFormatError(f"{path}: dims/origin length does not match dim {dim}")
    expected = int(np.prod(dims))
    payload = np.frombuffer(blob, dtype=np.uint8, offset=pos)
    if payload.size != expected:
        raise SceneFormatError(
            f"{path}: payload has {payload.size} bytes, expected {expected}")
    meta = {"dims": dims, "origin": origin, "spacing": spacing}
    return meta, payload


def read_rset(path) -> RasterGrid:
    meta, payload = _read_rset_raw(path)
    bad = np.setdiff1d(np.unique(payload), [0, 1])
    if bad.size:
        raise SceneFormatError(f"{path}: occupancy bytes must be 0x00/0x01, found {bad}")
    return RasterGrid(meta["origin"], meta["spacing"], meta["dims"],
                      payload.astype(bool))


def read_mask(path) -> tuple[RasterGrid, np.ndarray]:
    """Read a label mask; returns the carrier grid (occupancy: code == 0,
    i.e. interior-of-set cells) and the code array."""
    meta, payload = _read_rset_raw(path)
    if np.any(payload > 3):
        raise SceneFormatError(f"{path}: mask codes must be 0..3")
    codes = payload.reshape(meta["dims"], order="F")
    grid = RasterGrid(meta["origin"], meta["spacing"], meta["dims"], codes == 0)
    return grid, codes


# ---------------------------------------------------------------------------
# scene JSON


@dataclass(frozen=True)
class Scene:
    dim: int
    expr: SetExpr
    omega: Domain
    name: str = ""
    reference: dict = field(default_factory=dict)
    tolerance: Optional[float] = None


def _node_from_json(obj, dim: int, base_dir: str) -> SetExpr:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SceneFormatError(f"set node must be an object with 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "halfspace":
            return HalfSpace(obj["normal"], obj["offset"])
        if kind == "ball":
            return Ball(obj["center"], obj["radius"])
        if kind == "box":
            return Box(obj["lo"], obj["hi"])
        if kind == "raster":
            if "path" in obj:
                return Raster(read_rset(os.path.join(base_dir, obj["path"])))
            return Raster(RasterGrid(obj["origin"], obj["spacing"], obj["dims"],
                                     np.asarray(obj["data"], dtype=np.uint8).astype(bool)))
        if kind == "union":
            return Union(tuple(_node_from_json(c, dim, base_dir) for c in obj["children"]))
        if kind == "intersection":
            return Intersection(tuple(_node_from_json(c, dim, base_dir) for c in obj["children"]))
        if kind == "complement":
            return Complement(_node_from_json(obj["child"], dim, base_dir))
        if kind == "difference":
            return Difference(_node_from_json(obj["left"], dim, base_dir),
                              _node_from_json(obj["right"], dim, base_dir))
    except KeyError as exc:
        raise SceneFormatError(f"{kind} node missing field {exc}") from exc
    raise SceneFormatError(f"unknown set node kind {kind!r}")


def _domain_from_json(obj) -> Domain:
    if obj is None or obj == "all" or (isinstance(obj, dict) and obj.get("shape") == "all"):
        return Domain.all_space()
    if isinstance(obj, dict) and obj.get("shape") == "box":
        try:
            return Domain.open_box(obj["lo"], obj["hi"])
        except KeyError as exc:
            raise SceneFormatError(f"box domain missing field {exc}") from exc
    raise SceneFormatError(f"unknown domain spec {obj!r}")


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(
                f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
    return scene_from_dict(obj, base_dir=os.path.dirname(os.fspath(path)))


def scene_from_dict(obj: dict, base_dir: str = ".") -> Scene:
    for key in ("dim", "set"):
        if key not in obj:
            raise SceneFormatError(f"scene missing required field {key!r}")
    dim = int(obj["dim"])
    if dim not in (2, 3):
        raise SceneFormatError(f"scene dim must be 2 or 3, got {dim}")
    expr = _node_from_json(obj["set"], dim, base_dir)
    if expr.dim != dim:
        raise SceneFormatError(f"set nodes are {expr.dim}-dimensional, scene says {dim}")
    omega = _domain_from_json(obj.get("domain"))
    tol = obj.get("tolerance")
    return Scene(dim=dim, expr=expr, omega=omega,
                 name=obj.get("name", ""),
                 reference=obj.get("reference", {}),
                 tolerance=float(tol) if tol is not None else None)


def _node_to_json(expr: SetExpr) -> dict:
    if isinstance(expr, HalfSpace):
        return {"kind": "halfspace", "normal": list(map(float, expr.normal)),
                "offset": float(expr.offset)}
    if isinstance(expr, Ball):
        return {"kind": "ball", "center": list(map(float, expr.center)),
                "radius": float(expr.radius)}
    if isinstance(expr, Box):
        return {"kind": "box", "lo": list(map(float, expr.lo)),
                "hi": list(map(float, expr.hi))}
    if isinstance(expr, Raster):
        g = expr.grid
        return {"kind": "raster", "origin": list(map(float, g.origin)),
                "spacing": float(g.spacing), "dims": list(g.dims),
                "data": g.flat_occupancy().tolist()}
    if isinstance(expr, Union):
        return {"kind": "union", "children": [_node_to_json(c) for c in expr.children]}
    if isinstance(expr, Intersection):
        return {"kind": "intersection", "children": [_node_to_json(c) for c in expr.children]}
    if isinstance(expr, Complement):
        return {"kind": "complement", "child": _node_to_json(expr.child)}
    if isinstance(expr, Difference):
        return {"kind": "difference", "left": _node_to_json(expr.left),
                "right": _node_to_json(expr.right)}
    raise SceneFormatError(f"cannot serialize node {type(expr).__name__}")


def dump_scene(scene: Scene, path) -> None:
    obj: dict = {"dim": scene.dim, "set": _node_to_json(scene.expr)}
    if scene.name:
        obj["name"] = scene.name
    if scene.omega.is_all_space:
        obj["domain"] = {"shape": "all"}
    else:
        obj["domain"] = {"shape": "box", "lo": list(map(float, scene.omega.lo)),
                         "hi": list(map(float, scene.omega.hi))}
    if scene.reference:
        obj["reference"] = scene.reference
    if scene.tolerance is not None:
        obj["tolerance"] = scene.tolerance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
