"""Structured triangular meshes for rectangular 2D domains.

The generator produces a crossed-triangle mesh: every grid cell is split
into four triangles around its center node. Grid lines are placed so that
material-region boundaries and contact-segment endpoints always coincide
with mesh lines; with square cells all triangles are right isosceles,
which keeps the stiffness matrix an M-matrix (discrete maximum principle).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

INSULATED = "insulated"

_SIDES = ("left", "right", "bottom", "top")


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class ContactSegment:
    """A tagged Dirichlet segment on one side of the rectangle.

    ``lo``/``hi`` are coordinates along the side (y for left/right, x for
    bottom/top). ``None`` means the full side.
    """

    side: str
    lo: float | None = None
    hi: float | None = None


@dataclass(frozen=True)
class Region:
    """Axis-aligned material band: ``axis='y'`` is a horizontal layer."""

    name: str
    axis: str
    lo: float
    hi: float


@dataclass
class Mesh2D:
    nodes: np.ndarray          # (n, 2) float64
    triangles: np.ndarray      # (m, 3) int32, counterclockwise
    region_names: list[str]
    region_index: np.ndarray   # (m,) int32 into region_names
    edge_nodes: np.ndarray     # (k, 2) int32 boundary edges
    edge_tags: np.ndarray      # (k,) int32 into tag_names
    tag_names: list[str]
    hmax: float

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=np.float64)
        self.triangles = np.asarray(self.triangles, dtype=np.int32)
        self.region_index = np.asarray(self.region_index, dtype=np.int32)
        self.edge_nodes = np.asarray(self.edge_nodes, dtype=np.int32)
        self.edge_tags = np.asarray(self.edge_tags, dtype=np.int32)

    @property
    def node_count(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])

    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def total_area(self) -> float:
        return float(self.areas().sum())

    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def max_edge_length(self) -> float:
        p = self.nodes[self.triangles]
        edges = np.concatenate([
            p[:, 1] - p[:, 0],
            p[:, 2] - p[:, 1],
            p[:, 0] - p[:, 2],
        ])
        return float(np.sqrt((edges ** 2).sum(axis=1)).max())

    def region_of(self, name: str) -> np.ndarray:
        if name not in self.region_names:
            raise MeshError(f"unknown region {name!r}")
        return self.region_index == self.region_names.index(name)

    def nodes_on_tag(self, tag: str) -> np.ndarray:
        """Sorted node indices lying on boundary edges with the given tag."""
        if tag not in self.tag_names:
            raise MeshError(f"unknown boundary tag {tag!r}")
        t = self.tag_names.index(tag)
        picked = self.edge_nodes[self.edge_tags == t]
        return np.unique(picked)

    def edges_on_tag(self, tag: str) -> np.ndarray:
        if tag not in self.tag_names:
            raise MeshError(f"unknown boundary tag {tag!r}")
        t = self.tag_names.index(tag)
        return self.edge_nodes[self.edge_tags == t]

    def to_json_dict(self) -> dict:
        return {
            "nodes": [[float(x), float(y)] for x, y in self.nodes],
            "triangles": self.triangles.tolist(),
            "region-names": list(self.region_names),
            "region-index": self.region_index.tolist(),
            "edge-nodes": self.edge_nodes.tolist(),
            "edge-tags": self.edge_tags.tolist(),
            "tag-names": list(self.tag_names),
            "hmax": float(self.hmax),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "Mesh2D":
        try:
            return cls(
                nodes=np.array(data["nodes"], dtype=np.float64),
                triangles=np.array(data["triangles"], dtype=np.int32),
                region_names=list(data["region-names"]),
                region_index=np.array(data["region-index"], dtype=np.int32),
                edge_nodes=np.array(data["edge-nodes"], dtype=np.int32),
                edge_tags=np.array(data["edge-tags"], dtype=np.int32),
                tag_names=list(data["tag-names"]),
                hmax=float(data["hmax"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MeshError(f"malformed mesh payload: {exc}") from exc

    @classmethod
    def from_json(cls, text: str | bytes) -> "Mesh2D":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MeshError(f"mesh payload is not JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise MeshError("mesh payload must be a JSON object")
        return cls.from_json_dict(data)


def _normalize_contacts(
    contacts: dict[str, str | tuple | ContactSegment] | None,
    width: float,
    height: float,
) -> dict[str, ContactSegment]:
    if contacts is None:
        contacts = {"Contact1": "left", "Contact2": "right"}
    out: dict[str, ContactSegment] = {}
    for name, spec in contacts.items():
        if isinstance(spec, ContactSegment):
            seg = spec
        elif isinstance(spec, str):
            seg = ContactSegment(spec)
        else:
            seg = ContactSegment(*spec)
        if seg.side not in _SIDES:
            raise MeshError(f"contact {name!r}: unknown side {seg.side!r}")
        extent = height if seg.side in ("left", "right") else width
        lo = 0.0 if seg.lo is None else float(seg.lo)
        hi = extent if seg.hi is None else float(seg.hi)
        if not (0.0 <= lo < hi <= extent):
            raise MeshError(
                f"contact {name!r}: segment [{lo}, {hi}] is not on the {seg.side} side"
            )
        out[name] = ContactSegment(seg.side, lo, hi)
    for side in _SIDES:
        segs = sorted(
            (c for c in out.values() if c.side == side), key=lambda c: c.lo
        )
        for a, b in zip(segs, segs[1:]):
            if b.lo < a.hi:
                raise MeshError(f"overlapping contact segments on side {side!r}")
    return out


def _segment_coords(extent: float, cuts: set[float], hmax: float) -> np.ndarray:
    """Coordinates 0..extent honoring cut points, spacing <= hmax."""
    marks = sorted({0.0, float(extent)} | {float(c) for c in cuts if 0.0 < c < extent})
    coords = [0.0]
    for a, b in zip(marks, marks[1:]):
        n = max(1, math.ceil((b - a) / hmax - 1e-12))
        for i in range(1, n + 1):
            coords.append(a + (b - a) * i / n)
    return np.array(coords)


def generate_rect_mesh(
    width: float,
    height: float,
    hmax: float,
    contacts: dict | None = None,
    regions: list[Region] | None = None,
    default_region: str = "domain",
) -> Mesh2D:
    """Crossed-triangle mesh of [0,width] x [0,height] with edge length <= hmax."""
    if width <= 0 or height <= 0:
        raise MeshError("domain dimensions must be positive")
    if hmax <= 0:
        raise MeshError("hmax must be positive")
    segs = _normalize_contacts(contacts, width, height)
    regions = regions or []
    for r in regions:
        if r.axis not in ("x", "y"):
            raise MeshError(f"region {r.name!r}: axis must be 'x' or 'y'")
        extent = width if r.axis == "x" else height
        if not (0.0 <= r.lo < r.hi <= extent):
            raise MeshError(f"region {r.name!r}: band [{r.lo}, {r.hi}] outside domain")

    xcuts = {c.lo for c in segs.values() if c.side in ("bottom", "top")} | {
        c.hi for c in segs.values() if c.side in ("bottom", "top")
    } | {r.lo for r in regions if r.axis == "x"} | {r.hi for r in regions if r.axis == "x"}
    ycuts = {c.lo for c in segs.values() if c.side in ("left", "right")} | {
        c.hi for c in segs.values() if c.side in ("left", "right")
    } | {r.lo for r in regions if r.axis == "y"} | {r.hi for r in regions if r.axis == "y"}

    xs = _segment_coords(width, xcuts, hmax)
    ys = _segment_coords(height, ycuts, hmax)
    ncx, ncy = len(xs), len(ys)

    grid = np.empty((ncx * ncy, 2))
    gx, gy = np.meshgrid(xs, ys)
    grid[:, 0] = gx.ravel()
    grid[:, 1] = gy.ravel()

    cells_x, cells_y = ncx - 1, ncy - 1
    centers = np.empty((cells_x * cells_y, 2))
    cxs = 0.5 * (xs[:-1] + xs[1:])
    cys = 0.5 * (ys[:-1] + ys[1:])
    ccx, ccy = np.meshgrid(cxs, cys)
    centers[:, 0] = ccx.ravel()
    centers[:, 1] = ccy.ravel()

    nodes = np.vstack([grid, centers])
    cbase = ncx * ncy

    def gid(ix: int, iy: int) -> int:
        return iy * ncx + ix

    triangles = []
    for iy in range(cells_y):
        for ix in range(cells_x):
            sw, se = gid(ix, iy), gid(ix + 1, iy)
            nw, ne = gid(ix, iy + 1), gid(ix + 1, iy + 1)
            c = cbase + iy * cells_x + ix
            triangles.extend([(sw, se, c), (se, ne, c), (ne, nw, c), (nw, sw, c)])
    triangles = np.array(triangles, dtype=np.int32)

    region_names = [r.name for r in regions]
    if not region_names:
        region_names = [default_region]
    elif default_region not in region_names:
        region_names = region_names + [default_region]
    centroids = nodes[triangles].mean(axis=1)
    region_index = np.full(len(triangles), region_names.index(default_region), np.int32)
    for r in regions:
        coord = centroids[:, 0] if r.axis == "x" else centroids[:, 1]
        inside = (coord > r.lo) & (coord < r.hi)
        region_index[inside] = region_names.index(r.name)

    tag_names = [INSULATED] + sorted(segs)
    edge_nodes = []
    edge_tags = []

    def tag_for(side: str, mid: float) -> int:
        for name in sorted(segs):
            c = segs[name]
            if c.side == side and c.lo < mid < c.hi:
                return tag_names.index(name)
        return 0

    for ix in range(cells_x):
        mid = 0.5 * (xs[ix] + xs[ix + 1])
        edge_nodes.append((gid(ix, 0), gid(ix + 1, 0)))
        edge_tags.append(tag_for("bottom", mid))
        edge_nodes.append((gid(ix, cells_y), gid(ix + 1, cells_y)))
        edge_tags.append(tag_for("top", mid))
    for iy in range(cells_y):
        mid = 0.5 * (ys[iy] + ys[iy + 1])
        edge_nodes.append((gid(0, iy), gid(0, iy + 1)))
        edge_tags.append(tag_for("left", mid))
        edge_nodes.append((gid(cells_x, iy), gid(cells_x, iy + 1)))
        edge_tags.append(tag_for("right", mid))

    return Mesh2D(
        nodes=nodes,
        triangles=triangles,
        region_names=region_names,
        region_index=region_index,
        edge_nodes=np.array(edge_nodes, dtype=np.int32),
        edge_tags=np.array(edge_tags, dtype=np.int32),
        tag_names=tag_names,
        hmax=float(hmax),
    )


def refine_uniform(mesh: Mesh2D) -> Mesh2D:
    """Split every triangle into four via edge midpoints; tags inherited."""
    nodes = [tuple(p) for p in mesh.nodes]
    midpoint: dict[tuple[int, int], int] = {}

    def mid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        idx = midpoint.get(key)
        if idx is None:
            pa, pb = mesh.nodes[a], mesh.nodes[b]
            nodes.append(((pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0))
            idx = len(nodes) - 1
            midpoint[key] = idx
        return idx

    triangles = []
    region_index = []
    for (a, b, c), reg in zip(mesh.triangles, mesh.region_index):
        a, b, c = int(a), int(b), int(c)
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        triangles.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
        region_index.extend([reg] * 4)

    edge_nodes = []
    edge_tags = []
    for (a, b), t in zip(mesh.edge_nodes, mesh.edge_tags):
        a, b = int(a), int(b)
        m = mid(a, b)
        edge_nodes.extend([(a, m), (m, b)])
        edge_tags.extend([t, t])

    return Mesh2D(
        nodes=np.array(nodes, dtype=np.float64),
        triangles=np.array(triangles, dtype=np.int32),
        region_names=list(mesh.region_names),
        region_index=np.array(region_index, dtype=np.int32),
        edge_nodes=np.array(edge_nodes, dtype=np.int32),
        edge_tags=np.array(edge_tags, dtype=np.int32),
        tag_names=list(mesh.tag_names),
        hmax=mesh.hmax / 2.0,
    )
