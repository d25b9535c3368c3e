# lattice.py

"""
Edge-qubit lattices and the region configurations built on them.

Qubits live on edges. On an L x L torus the horizontal edge leaving
vertex (i, j) to the right is h(i, j) = i*L + j and the vertical edge
leaving it downwards is v(i, j) = L*L + i*L + j. The planar patch keeps
the same picture without wraparound: L x L vertices, smooth boundary on
all four sides, stars truncated to 2 or 3 edges at the rim.

Faces are addressed by their top-left vertex. Regions are plain edge
sets; layouts bundle the regions each computation needs (two blobs for
secret sharing, sectors for Kitaev-Preskill, cut rings for Levin-Wen,
rectangles and annuli for the area-law fit).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from errors import InputError, LayoutError

logger = logging.getLogger(__name__)

Vertex = Tuple[int, int]
Face = Tuple[int, int]


class Geometry(str, Enum):
    TORUS = "torus"
    PLANAR = "planar"


class LayoutKind(str, Enum):
    TWO_BLOB = "two-blob"
    KITAEV_PRESKILL = "kitaev-preskill"
    LEVIN_WEN = "levin-wen"
    ANNULUS = "annulus"
    RECTANGLE = "rectangle"


# ============================================================================
# Lattice
# ============================================================================

@dataclass(frozen=True)
class Lattice:
    """Edge-qubit square lattice on the torus or the planar patch."""

    geometry: Geometry
    L: int

    @property
    def is_torus(self) -> bool:
        return self.geometry == Geometry.TORUS

    @cached_property
    def _index(self) -> Dict[Tuple[str, int, int], int]:
        L = self.L
        index: Dict[Tuple[str, int, int], int] = {}
        if self.is_torus:
            for i in range(L):
                for j in range(L):
                    index[("h", i, j)] = i * L + j
                    index[("v", i, j)] = L * L + i * L + j
        else:
            for i in range(L):
                for j in range(L - 1):
                    index[("h", i, j)] = i * (L - 1) + j
            offset = L * (L - 1)
            for i in range(L - 1):
                for j in range(L):
                    index[("v", i, j)] = offset + i * L + j
        return index

    @property
    def n_qubits(self) -> int:
        return len(self._index)

    @cached_property
    def vertices(self) -> List[Vertex]:
        return [(i, j) for i in range(self.L) for j in range(self.L)]

    @cached_property
    def faces(self) -> List[Face]:
        span = self.L if self.is_torus else self.L - 1
        return [(i, j) for i in range(span) for j in range(span)]

    def wrap(self, i: int, j: int) -> Optional[Vertex]:
        """Canonical vertex for (i, j), or None if it falls off a planar patch."""
        if self.is_torus:
            return (i % self.L, j % self.L)
        if 0 <= i < self.L and 0 <= j < self.L:
            return (i, j)
        return None

    def h(self, i: int, j: int) -> Optional[int]:
        if self.is_torus:
            i, j = i % self.L, j % self.L
        return self._index.get(("h", i, j))

    def v(self, i: int, j: int) -> Optional[int]:
        if self.is_torus:
            i, j = i % self.L, j % self.L
        return self._index.get(("v", i, j))

    @cached_property
    def edge_endpoints(self) -> List[Tuple[Vertex, Vertex]]:
        ends: List[Optional[Tuple[Vertex, Vertex]]] = [None] * self.n_qubits
        for (kind, i, j), q in self._index.items():
            a = (i, j)
            b = self.wrap(i, j + 1) if kind == "h" else self.wrap(i + 1, j)
            ends[q] = (a, b)
        return ends  # type: ignore[return-value]

    def star(self, vertex: Vertex) -> Tuple[int, ...]:
        i, j = vertex
        # Missing keys on the planar patch come back as None.
        candidates = [self.h(i, j), self.h(i, j - 1), self.v(i, j), self.v(i - 1, j)]
        return tuple(sorted(q for q in candidates if q is not None))

    def plaquette(self, face: Face) -> Tuple[int, ...]:
        i, j = face
        edges = (self.h(i, j), self.h(i + 1, j), self.v(i, j), self.v(i, j + 1))
        if any(q is None for q in edges):
            raise InputError(f"face {face} is not on the {self.geometry.value} lattice L={self.L}")
        return tuple(sorted(edges))  # type: ignore[arg-type]

    @cached_property
    def stars(self) -> List[Tuple[int, ...]]:
        return [self.star(vx) for vx in self.vertices]

    @cached_property
    def plaquettes(self) -> List[Tuple[int, ...]]:
        return [self.plaquette(f) for f in self.faces]

    @cached_property
    def edge_faces(self) -> List[Tuple[Face, ...]]:
        owners: List[List[Face]] = [[] for _ in range(self.n_qubits)]
        for f, plaq in zip(self.faces, self.plaquettes):
            for q in plaq:
                owners[q].append(f)
        return [tuple(o) for o in owners]

    def distance(self, u: Vertex, w: Vertex) -> int:
        """L1 vertex distance, measured around the torus when there is one."""
        di, dj = abs(u[0] - w[0]), abs(u[1] - w[1])
        if self.is_torus:
            di, dj = min(di, self.L - di), min(dj, self.L - dj)
        return di + dj

    @cached_property
    def vertex_graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for q, (a, b) in enumerate(self.edge_endpoints):
            g.add_edge(a, b, key=q, qubit=q)
        return g

    @cached_property
    def dual_graph(self) -> nx.MultiGraph:
        """Faces joined by the edges they share. Rim edges of the planar patch are omitted."""
        g = nx.MultiGraph()
        g.add_nodes_from(self.faces)
        for q, owners in enumerate(self.edge_faces):
            if len(owners) == 2:
                g.add_edge(owners[0], owners[1], key=q, qubit=q)
        return g

    def vertices_of(self, edges: Iterable[int]) -> Set[Vertex]:
        touched: Set[Vertex] = set()
        for q in edges:
            touched.update(self.edge_endpoints[q])
        return touched


def build_lattice(geometry, L: int) -> Lattice:
    """Build a torus or planar lattice of linear size L >= 2."""
    try:
        geo = Geometry(geometry)
    except ValueError as exc:
        raise InputError(f"unknown geometry {geometry!r}; expected 'torus' or 'planar'") from exc
    if not isinstance(L, (int, np.integer)) or isinstance(L, bool):
        raise InputError(f"lattice size must be an integer, got {L!r}")
    if L < 2:
        raise InputError(f"lattice size must be at least 2, got {L}")
    lat = Lattice(geo, int(L))
    logger.debug("built %s lattice L=%d with %d qubits", geo.value, L, lat.n_qubits)
    return lat


# ============================================================================
# Regions
# ============================================================================

@dataclass(frozen=True)
class Region:
    """A named set of edge qubits."""

    edges: FrozenSet[int]
    name: str = "R"

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(int(q) for q in self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, q: object) -> bool:
        return q in self.edges

    def __iter__(self):
        return iter(sorted(self.edges))

    def union(self, other: "Region", name: Optional[str] = None) -> "Region":
        return Region(self.edges | other.edges, name or f"{self.name}{other.name}")

    def intersection(self, other: "Region", name: Optional[str] = None) -> "Region":
        return Region(self.edges & other.edges, name or f"{self.name}&{other.name}")

    def difference(self, other: "Region", name: Optional[str] = None) -> "Region":
        return Region(self.edges - other.edges, name or f"{self.name}-{other.name}")

    def complement(self, lat: Lattice) -> "Region":
        name = self.name[1:] if self.name.startswith("~") else f"~{self.name}"
        return Region(frozenset(range(lat.n_qubits)) - self.edges, name)

    def validate(self, lat: Lattice) -> "Region":
        bad = [q for q in self.edges if q < 0 or q >= lat.n_qubits]
        if bad:
            raise LayoutError(f"region {self.name} has edges outside the lattice: {sorted(bad)[:5]}")
        return self

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        if self.edges:
            m[list(self.edges)] = True
        return m


def full_region(lat: Lattice, name: str = "all") -> Region:
    return Region(frozenset(range(lat.n_qubits)), name)


def induced_edges(lat: Lattice, vertices: Iterable[Vertex]) -> Set[int]:
    """Edges with both endpoints in the vertex set."""
    vs = set(vertices)
    return {q for q, (a, b) in enumerate(lat.edge_endpoints) if a in vs and b in vs}


def star_loop(lat: Lattice, vertices: Iterable[Vertex]) -> Set[int]:
    """Support of the product of stars over a vertex set: edges leaving the set."""
    vs = set(vertices)
    return {q for q, (a, b) in enumerate(lat.edge_endpoints) if (a in vs) != (b in vs)}


def plaquette_loop(lat: Lattice, faces: Iterable[Face]) -> Set[int]:
    """Support of the product of plaquettes over a face set."""
    fs = set(faces)
    return {q for q, owners in enumerate(lat.edge_faces) if sum(f in fs for f in owners) % 2 == 1}


def _box_vertices(lat: Lattice, top: int, left: int, height: int, width: int) -> List[Vertex]:
    if height < 1 or width < 1:
        raise LayoutError(f"box of {height}x{width} vertices is empty")
    limit = lat.L - 1 if lat.is_torus else lat.L
    if height > limit or width > limit:
        raise LayoutError(
            f"box of {height}x{width} vertices does not fit on the {lat.geometry.value} lattice L={lat.L}"
        )
    out: List[Vertex] = []
    for di in range(height):
        for dj in range(width):
            vx = lat.wrap(top + di, left + dj)
            if vx is None:
                raise LayoutError(f"box at ({top},{left}) of {height}x{width} leaves the planar patch")
            out.append(vx)
    return out


def vertex_box(lat: Lattice, top: int, left: int, height: int, width: int,
               name: str = "box") -> Region:
    """Induced edges of a height x width block of vertices."""
    return Region(frozenset(induced_edges(lat, _box_vertices(lat, top, left, height, width))), name)


def rectangle(lat: Lattice, corner: Sequence[int], size: Sequence[int], name: str = "rect") -> Region:
    """a x b plaquettes with top-left vertex ``corner``; an (a+1) x (b+1) vertex box."""
    a, b = int(size[0]), int(size[1])
    if a < 1 or b < 1:
        raise LayoutError(f"rectangle size must be positive, got {a}x{b}")
    return vertex_box(lat, int(corner[0]), int(corner[1]), a + 1, b + 1, name)


def annulus(lat: Lattice, center: Sequence[int], inner: int, outer: int, name: str = "annulus") -> Region:
    """
    Square ring of vertices with max-norm offset in [inner, outer] around
    ``center``; induced edges.
    """
    if inner < 1:
        raise LayoutError(f"annulus inner radius must be at least 1, got {inner}")
    if outer <= inner:
        raise LayoutError(f"annulus needs outer > inner, got inner={inner}, outer={outer}")
    ci, cj = int(center[0]), int(center[1])
    ring = [
        vx for vx in _box_vertices(lat, ci - outer, cj - outer, 2 * outer + 1, 2 * outer + 1)
        if max(abs(_offset(lat, vx[0], ci)), abs(_offset(lat, vx[1], cj))) >= inner
    ]
    return Region(frozenset(induced_edges(lat, ring)), name)


def _offset(lat: Lattice, coordinate: int, origin: int) -> int:
    d = coordinate - origin
    if lat.is_torus:
        d = (d + lat.L // 2) % lat.L - lat.L // 2
    return d


def blob(lat: Lattice, center: Vertex, radius: int, name: str = "blob") -> Region:
    """
    Edges with an endpoint within L1 distance ``radius`` of ``center``,
    together with the boundary of the face whose top-left corner is ``center``.
    """
    if radius < 0:
        raise LayoutError(f"blob radius must be non-negative, got {radius}")
    c = lat.wrap(*center)
    if c is None:
        raise LayoutError(f"blob center {center} is not on the lattice")
    near = {vx for vx in lat.vertices if lat.distance(vx, c) <= radius}
    edges = {q for q, (a, b) in enumerate(lat.edge_endpoints) if a in near or b in near}
    edges.update(lat.plaquette(c))
    return Region(frozenset(edges), name)


def separation(lat: Lattice, a: Region, b: Region) -> int:
    """
    Qubit-graph distance between two edge sets: edges are adjacent when
    they share a vertex. Overlapping regions are at distance 0.
    """
    if a.edges & b.edges:
        return 0
    va, vb = lat.vertices_of(a.edges), lat.vertices_of(b.edges)
    if not va or not vb:
        return lat.n_qubits
    return 1 + min(lat.distance(x, y) for x in va for y in vb)


def _circular_span(coords: Iterable[int], L: int, wraps: bool) -> int:
    occupied = sorted(set(coords))
    if not occupied:
        return 0
    if not wraps:
        return occupied[-1] - occupied[0] + 1
    gaps = [(occupied[(k + 1) % len(occupied)] - occupied[k]) % L for k in range(len(occupied))]
    if len(occupied) == 1:
        return 1
    return L - max(gaps) + 1


def support_diameter(lat: Lattice, edges: Iterable[int]) -> int:
    """
    Side of the smallest vertex box holding every endpoint of the edges,
    counted in vertices.
    """
    touched = lat.vertices_of(edges)
    if not touched:
        return 0
    rows = _circular_span((vx[0] for vx in touched), lat.L, lat.is_torus)
    cols = _circular_span((vx[1] for vx in touched), lat.L, lat.is_torus)
    return max(rows, cols)


# ============================================================================
# Boundaries
# ============================================================================

def cut_generators(lat: Lattice, r: Region) -> List[Tuple[str, int]]:
    """Stars and plaquettes with support partly inside and partly outside r."""
    cut: List[Tuple[str, int]] = []
    for k, star in enumerate(lat.stars):
        inside = sum(q in r.edges for q in star)
        if 0 < inside < len(star):
            cut.append(("star", k))
    for k, plaq in enumerate(lat.plaquettes):
        inside = sum(q in r.edges for q in plaq)
        if 0 < inside < len(plaq):
            cut.append(("plaquette", k))
    return cut


def boundary_size(lat: Lattice, r: Region) -> int:
    """Number of stabilizer generators cut by the region."""
    return len(cut_generators(lat, r))


def boundary_components(lat: Lattice, r: Region) -> int:
    """
    Connected components of the cut generators. Two of them are adjacent
    when they share a qubit outside r.
    """
    cut = cut_generators(lat, r)
    g = nx.Graph()
    g.add_nodes_from(cut)
    by_qubit: Dict[int, List[Tuple[str, int]]] = {}
    for kind, k in cut:
        support = lat.stars[k] if kind == "star" else lat.plaquettes[k]
        for q in support:
            if q in r.edges:
                continue
            by_qubit.setdefault(q, []).append((kind, k))
    for owners in by_qubit.values():
        for x, y in zip(owners, owners[1:]):
            g.add_edge(x, y)
    return nx.number_connected_components(g)


# ============================================================================
# Layouts
# ============================================================================

@dataclass
class RegionLayout:
    """Named regions for one computation, plus the parameters that built them."""

    kind: LayoutKind
    regions: Dict[str, Region]
    params: Dict[str, object] = field(default_factory=dict)
    separation: Optional[int] = None
    flags: List[str] = field(default_factory=list)

    def __getitem__(self, name: str) -> Region:
        return self.regions[name]

    def describe(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "kind": self.kind.value,
            "params": self.params,
            "sizes": {k: len(v) for k, v in self.regions.items()},
        }
        if self.separation is not None:
            out["separation"] = self.separation
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def default_layout_params(lat: Lattice, kind) -> Dict[str, object]:
    """
    Default shapes; blobs are placed as far apart as the torus allows.

    Below L = 6 no pair of blobs reaches separation 4. The default there is
    two single cells centered at (0, 0) and (1, L - 1), one diagonal step
    apart, which on L = 3 is the largest distance the torus has. The
    declared separation is 1, so code states on those tori are built with
    ``min_separation=1``.
    """
    kind = LayoutKind(kind)
    L = lat.L
    if kind == LayoutKind.TWO_BLOB:
        if L < 6:
            return {"centers": [[0, 0], [1, L - 1]], "radius": 0, "separation": 1}
        radius = 1 if L >= 8 else 0
        c = 2 if L >= 8 else 1
        return {"centers": [[c, c], [(c + L // 2) % L, (c + L // 2) % L]], "radius": radius,
                "separation": 1}
    mid = L // 2 - 1
    if kind == LayoutKind.KITAEV_PRESKILL:
        return {"center": [mid, mid], "radius": 3.0, "angles": [100.0, 220.0, 340.0]}
    if kind == LayoutKind.LEVIN_WEN:
        return {"center": [L // 2, L // 2], "outer": 3, "inner": 1, "strip": 1}
    if kind == LayoutKind.ANNULUS:
        return {"center": [L // 2, L // 2], "inner": 1, "outer": 2 if L < 12 else 3}
    return {"corner": [1, 1], "size": [2, 2]}


def make_layout(lat: Lattice, kind, params: Optional[Mapping[str, object]] = None) -> RegionLayout:
    """Build and validate a layout of the requested kind."""
    try:
        kind = LayoutKind(kind)
    except ValueError as exc:
        raise InputError(f"unknown layout kind {kind!r}") from exc
    merged = default_layout_params(lat, kind)
    merged.update(dict(params or {}))
    builder = {
        LayoutKind.TWO_BLOB: _two_blob,
        LayoutKind.KITAEV_PRESKILL: _kitaev_preskill,
        LayoutKind.LEVIN_WEN: _levin_wen,
        LayoutKind.ANNULUS: _annulus_layout,
        LayoutKind.RECTANGLE: _rectangle_layout,
    }[kind]
    layout = builder(lat, merged)
    for region in layout.regions.values():
        region.validate(lat)
    logger.debug("layout %s: %s", kind.value, layout.describe()["sizes"])
    return layout


def _pair(value, what: str) -> Tuple[int, int]:
    try:
        a, b = value  # type: ignore[misc]
        return int(a), int(b)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what} must be a pair of integers, got {value!r}") from exc


def _two_blob(lat: Lattice, params: Dict[str, object]) -> RegionLayout:
    centers = params["centers"]
    if not isinstance(centers, (list, tuple)) or len(centers) != 2:
        raise InputError(f"two-blob layout needs exactly two centers, got {centers!r}")
    ca, cb = _pair(centers[0], "center"), _pair(centers[1], "center")
    radius = int(params["radius"])  # type: ignore[arg-type]
    a = blob(lat, ca, radius, "A")
    b = blob(lat, cb, radius, "B")
    if a.edges & b.edges:
        raise LayoutError(f"blobs around {ca} and {cb} overlap")
    sep = separation(lat, a, b)
    declared = int(params.get("separation", 1))  # type: ignore[arg-type]
    if sep < declared:
        raise LayoutError(f"blobs are {sep} apart, below the declared separation {declared}")
    e = a.union(b).complement(lat)
    e = Region(e.edges, "E")
    return RegionLayout(
        LayoutKind.TWO_BLOB, {"A": a, "B": b, "E": e},
        params={"centers": [list(ca), list(cb)], "radius": radius, "separation": declared},
        separation=sep,
    )


def _kitaev_preskill(lat: Lattice, params: Dict[str, object]) -> RegionLayout:
    ci, cj = _pair(params["center"], "center")
    radius = float(params["radius"])  # type: ignore[arg-type]
    angles = sorted(float(a) % 360.0 for a in params.get("angles", [100.0, 220.0, 340.0]))  # type: ignore[union-attr]
    if len(angles) != 3:
        raise InputError(f"kitaev-preskill layout needs three ray angles, got {angles}")

    # Disk of vertices around the center of face (ci, cj).
    reach = int(math.floor(radius + 0.5))
    disk: List[Vertex] = []
    for di in range(-reach, reach + 2):
        for dj in range(-reach, reach + 2):
            if (di - 0.5) ** 2 + (dj - 0.5) ** 2 <= radius ** 2:
                vx = lat.wrap(ci + di, cj + dj)
                if vx is None:
                    raise LayoutError(f"disk of radius {radius} at {(ci, cj)} leaves the planar patch")
                disk.append(vx)
    rows = {vx[0] for vx in disk}
    if lat.is_torus and len(rows) > lat.L - 1:
        raise LayoutError(f"disk of radius {radius} does not fit on the torus L={lat.L}")

    sectors: Dict[str, Set[int]] = {"A": set(), "B": set(), "C": set()}
    for q in induced_edges(lat, disk):
        (ai, aj), (bi, bj) = lat.edge_endpoints[q]
        mid_r = _offset(lat, ai, ci) + _offset(lat, bi, ci)
        mid_c = _offset(lat, aj, cj) + _offset(lat, bj, cj)
        # Math angle with x = column, y = -row, measured from the face center.
        theta = math.degrees(math.atan2(-(mid_r / 2.0 - 0.5), mid_c / 2.0 - 0.5)) % 360.0
        if angles[0] <= theta < angles[1]:
            sectors["A"].add(q)
        elif angles[1] <= theta < angles[2]:
            sectors["B"].add(q)
        else:
            sectors["C"].add(q)

    flags = []
    if radius < 2.0:
        flags.append("sub-minimal")
    regions = {k: Region(frozenset(v), k) for k, v in sectors.items()}
    if any(len(r) == 0 for r in regions.values()):
        raise LayoutError(f"disk of radius {radius} leaves an empty sector")
    return RegionLayout(
        LayoutKind.KITAEV_PRESKILL, regions,
        params={"center": [ci, cj], "radius": radius, "angles": angles},
        flags=flags,
    )


def _levin_wen(lat: Lattice, params: Dict[str, object]) -> RegionLayout:
    ci, cj = _pair(params["center"], "center")
    outer, inner, strip = (int(params[k]) for k in ("outer", "inner", "strip"))  # type: ignore[arg-type]
    if inner < 1 or outer - inner < 2:
        raise LayoutError(f"levin-wen ring needs inner >= 1 and outer - inner >= 2, got {inner}, {outer}")
    if strip < 0 or strip >= outer:
        raise LayoutError(f"levin-wen strip half-width {strip} cuts the whole arm of a ring of radius {outer}")
    if inner == 1 and strip > 1:
        # Both cuts would then reshape the boundary of the same row-0 vertices.
        raise LayoutError(f"levin-wen strip half-width {strip} is too wide for inner radius 1")
    box = _box_vertices(lat, ci - outer, cj - outer, 2 * outer + 1, 2 * outer + 1)

    def offsets(vx: Vertex) -> Tuple[int, int]:
        return _offset(lat, vx[0], ci), _offset(lat, vx[1], cj)

    ring = [vx for vx in box if max(abs(x) for x in offsets(vx)) >= inner]
    top = {vx for vx in ring if offsets(vx)[0] <= -inner and abs(offsets(vx)[1]) <= strip}
    bottom = {vx for vx in ring if offsets(vx)[0] >= inner and abs(offsets(vx)[1]) <= strip}

    regions = {
        "ring": Region(frozenset(induced_edges(lat, ring)), "ring"),
        "cut_top": Region(frozenset(induced_edges(lat, set(ring) - top)), "cut_top"),
        "cut_bottom": Region(frozenset(induced_edges(lat, set(ring) - bottom)), "cut_bottom"),
        "cut_both": Region(frozenset(induced_edges(lat, set(ring) - top - bottom)), "cut_both"),
    }
    return RegionLayout(
        LayoutKind.LEVIN_WEN, regions,
        params={"center": [ci, cj], "outer": outer, "inner": inner, "strip": strip},
    )


def _annulus_layout(lat: Lattice, params: Dict[str, object]) -> RegionLayout:
    ci, cj = _pair(params["center"], "center")
    inner, outer = int(params["inner"]), int(params["outer"])  # type: ignore[arg-type]
    region = annulus(lat, (ci, cj), inner, outer, "R")
    components = boundary_components(lat, region)
    if components != 2:
        raise LayoutError(f"annulus has {components} boundary components, expected 2")
    return RegionLayout(LayoutKind.ANNULUS, {"R": region},
                        params={"center": [ci, cj], "inner": inner, "outer": outer})


def _rectangle_layout(lat: Lattice, params: Dict[str, object]) -> RegionLayout:
    corner = _pair(params["corner"], "corner")
    size = _pair(params["size"], "size")
    region = rectangle(lat, corner, size, "R")
    components = boundary_components(lat, region)
    if components != 1:
        raise LayoutError(f"rectangle has {components} boundary components, expected 1")
    return RegionLayout(LayoutKind.RECTANGLE, {"R": region},
                        params={"corner": list(corner), "size": list(size)})
