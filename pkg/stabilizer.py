# stabilizer.py

"""
Pauli / stabilizer engine.

A PauliOperator is i^phase * X^x * Z^z (Z applied first, qubit by qubit),
stored as two bit vectors and a power of i. Products pick up a factor
(-1)^(z1 . x2) from moving Z's past X's; commutation is the symplectic
form x1 . z2 + z1 . x2.

Everything here that answers a yes/no question about the stabilizer
group (membership, expectation values, whether a coset has a
representative inside a region) is a single GF(2) solve in gf2core.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from errors import InputError
from gf2core import BitMatrix, independent_rows, nullspace, rank, solve
from lattice import Face, Lattice, Region, Vertex

logger = logging.getLogger(__name__)


# ============================================================================
# PauliOperator
# ============================================================================

@dataclass(frozen=True, eq=False)
class PauliOperator:
    """n-qubit Pauli i^phase X^x Z^z."""

    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.uint8).reshape(-1) & 1
        z = np.asarray(self.z, dtype=np.uint8).reshape(-1) & 1
        if x.size != z.size:
            raise InputError(f"x and z parts differ in length ({x.size} vs {z.size})")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), 0)

    @classmethod
    def from_support(cls, n: int, x_edges: Iterable[int] = (), z_edges: Iterable[int] = (),
                     phase: int = 0) -> "PauliOperator":
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q in x_edges:
            x[q] ^= 1
        for q in z_edges:
            z[q] ^= 1
        return cls(x, z, phase)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """'XIZY' style label; Y is stored as i X Z."""
        x = np.zeros(len(label), dtype=np.uint8)
        z = np.zeros(len(label), dtype=np.uint8)
        phase = 0
        for q, ch in enumerate(label.upper()):
            if ch == "X":
                x[q] = 1
            elif ch == "Z":
                z[q] = 1
            elif ch == "Y":
                x[q] = z[q] = 1
                phase += 1
            elif ch != "I":
                raise InputError(f"unknown Pauli letter {ch!r} in {label!r}")
        return cls(x, z, phase)

    @property
    def n(self) -> int:
        return int(self.x.size)

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def support(self) -> Set[int]:
        return set(int(q) for q in np.flatnonzero(self.x | self.z))

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def sympl(self, other: "PauliOperator") -> int:
        self._check(other)
        return int((np.dot(self.x.astype(np.int64), other.z) + np.dot(self.z.astype(np.int64), other.x)) & 1)

    def commutes(self, other: "PauliOperator") -> bool:
        return self.sympl(other) == 0

    def is_hermitian(self) -> bool:
        return self.phase % 2 == int(np.dot(self.x.astype(np.int64), self.z)) % 2

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        self._check(other)
        swap = int(np.dot(self.z.astype(np.int64), other.x)) & 1
        return PauliOperator(self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + 2 * swap)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.x, self.z, self.phase + 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return self.phase == other.phase and np.array_equal(self.x, other.x) and \
            np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    def same_up_to_phase(self, other: "PauliOperator") -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def label(self) -> str:
        letters = "IXZY"
        return "".join(letters[int(a) + 2 * int(b)] for a, b in zip(self.x, self.z))

    def __repr__(self) -> str:
        prefix = ["+", "+i", "-", "-i"][self.phase]
        if self.n <= 24:
            return f"PauliOperator({prefix}{self.label()})"
        return f"PauliOperator({prefix}, n={self.n}, weight={self.weight})"

    def _check(self, other: "PauliOperator") -> None:
        if other.n != self.n:
            raise InputError(f"Pauli operators act on {self.n} and {other.n} qubits")


def product(ops: Sequence[PauliOperator], n: Optional[int] = None) -> PauliOperator:
    """Ordered product of Pauli operators."""
    if not ops:
        if n is None:
            raise InputError("empty product needs an explicit qubit count")
        return PauliOperator.identity(n)
    xs = np.vstack([p.x for p in ops]).astype(np.int64)
    zs = np.vstack([p.z for p in ops]).astype(np.int64)
    phases = np.array([p.phase for p in ops], dtype=np.int64)
    return _product(xs, zs, phases)


def _product(xs: np.ndarray, zs: np.ndarray, phases: np.ndarray) -> PauliOperator:
    # Each X of a later factor passes the Z's of every earlier factor.
    earlier_z = np.cumsum(zs, axis=0) - zs
    swaps = int(np.sum(earlier_z * xs)) & 1
    return PauliOperator(
        (xs.sum(axis=0) & 1).astype(np.uint8),
        (zs.sum(axis=0) & 1).astype(np.uint8),
        int(phases.sum()) + 2 * swaps,
    )


def random_pauli(n: int, support: Iterable[int], rng: np.random.Generator) -> PauliOperator:
    """Uniformly random Hermitian Pauli acting inside ``support``."""
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    qubits = np.fromiter(sorted(support), dtype=np.int64)
    if qubits.size:
        letters = rng.integers(0, 4, size=qubits.size)
        x[qubits] = letters & 1
        z[qubits] = letters >> 1
    ys = int(np.dot(x.astype(np.int64), z))
    sign = 2 * int(rng.integers(0, 2))
    return PauliOperator(x, z, ys + sign)


# ============================================================================
# Stabilizer states
# ============================================================================

@dataclass(frozen=True, eq=False)
class StabilizerState:
    """Pure state fixed by n independent commuting Hermitian Paulis."""

    generators: Tuple[PauliOperator, ...]
    lattice: Optional[Lattice] = None
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise InputError("a stabilizer state needs at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise InputError("generators act on different qubit counts")
        if len(gens) != n:
            raise InputError(f"{len(gens)} generators for {n} qubits; the state would not be pure")
        bad = [k for k, g in enumerate(gens) if not g.is_hermitian()]
        if bad:
            raise InputError(f"generators {bad[:5]} are not Hermitian")
        x = self.x_bits.astype(np.int64)
        z = self.z_bits.astype(np.int64)
        if ((x @ z.T + z @ x.T) & 1).any():
            raise InputError("generators do not pairwise commute")
        if rank(self.matrix) != len(gens):
            raise InputError("generators are not independent over GF(2)")

    @property
    def n(self) -> int:
        return self.generators[0].n

    @cached_property
    def x_bits(self) -> np.ndarray:
        return np.vstack([g.x for g in self.generators])

    @cached_property
    def z_bits(self) -> np.ndarray:
        return np.vstack([g.z for g in self.generators])

    @cached_property
    def phases(self) -> np.ndarray:
        return np.array([g.phase for g in self.generators], dtype=np.int64)

    @cached_property
    def matrix(self) -> BitMatrix:
        """Generators as rows of [x | z]."""
        return BitMatrix(len(self.generators), 2 * self.n, np.hstack([self.x_bits, self.z_bits]))

    def element(self, coefficients) -> PauliOperator:
        """Ordered product of the generators selected by a 0/1 vector."""
        sel = np.flatnonzero(np.asarray(coefficients, dtype=np.uint8) & 1)
        if sel.size == 0:
            return PauliOperator.identity(self.n)
        return _product(self.x_bits[sel].astype(np.int64), self.z_bits[sel].astype(np.int64),
                        self.phases[sel])

    def decompose(self, p: PauliOperator) -> Optional[np.ndarray]:
        """Generator coefficients reproducing p's bits, or None if p is not in the group up to phase."""
        if p.n != self.n:
            raise InputError(f"operator on {p.n} qubits for a state on {self.n}")
        return solve(self.matrix.transpose(), p.symplectic())

    def conjugated(self, u: PauliOperator) -> "StabilizerState":
        """Stabilizer of u|psi>: generators anticommuting with u change sign."""
        flipped = tuple(g if g.commutes(u) else -g for g in self.generators)
        return StabilizerState(flipped, self.lattice, self.labels)


# ============================================================================
# Toric code
# ============================================================================

def star_operator(lat: Lattice, vertex: Vertex) -> PauliOperator:
    return PauliOperator.from_support(lat.n_qubits, x_edges=lat.star(vertex))


def plaquette_operator(lat: Lattice, face: Face) -> PauliOperator:
    return PauliOperator.from_support(lat.n_qubits, z_edges=lat.plaquette(face))


def logical_z_loops(lat: Lattice) -> List[PauliOperator]:
    """Z along row 0 and along column 0; empty on the planar patch."""
    if not lat.is_torus:
        return []
    n, L = lat.n_qubits, lat.L
    return [
        PauliOperator.from_support(n, z_edges=[lat.h(0, j) for j in range(L)]),
        PauliOperator.from_support(n, z_edges=[lat.v(i, 0) for i in range(L)]),
    ]


def logical_x_loops(lat: Lattice) -> List[PauliOperator]:
    """X dual loops conjugate to the Z loops of logical_z_loops."""
    if not lat.is_torus:
        return []
    n, L = lat.n_qubits, lat.L
    return [
        PauliOperator.from_support(n, x_edges=[lat.h(i, 0) for i in range(L)]),
        PauliOperator.from_support(n, x_edges=[lat.v(0, j) for j in range(L)]),
    ]


def _check_generators(lat: Lattice) -> Tuple[List[PauliOperator], List[str]]:
    ops = [star_operator(lat, vx) for vx in lat.vertices]
    ops += [plaquette_operator(lat, f) for f in lat.faces]
    labels = [f"star{vx}" for vx in lat.vertices] + [f"plaquette{f}" for f in lat.faces]
    return ops, labels


def toric_ground_state(lat: Lattice) -> StabilizerState:
    """
    Independent stars and plaquettes, plus on the torus the two Z loops
    through row 0 and column 0 fixed to +1.
    """
    ops, labels = _check_generators(lat)
    keep = independent_rows(BitMatrix.from_rows([p.symplectic() for p in ops]))
    gens = [ops[k] for k in keep]
    names = [labels[k] for k in keep]
    if lat.is_torus:
        gens += logical_z_loops(lat)
        names += ["logical_z_row0", "logical_z_col0"]
    logger.debug("toric ground state on %s L=%d: %d generators", lat.geometry.value, lat.L, len(gens))
    return StabilizerState(tuple(gens), lat, tuple(names))


def product_state(n_or_lattice) -> StabilizerState:
    """|0...0>: single-qubit Z on every qubit."""
    lat = n_or_lattice if isinstance(n_or_lattice, Lattice) else None
    n = lat.n_qubits if lat is not None else int(n_or_lattice)
    gens = tuple(PauliOperator.from_support(n, z_edges=[q]) for q in range(n))
    return StabilizerState(gens, lat, tuple(f"z{q}" for q in range(n)))


def logical_count(lat: Lattice) -> int:
    """Qubits minus the rank of all stars and plaquettes; degeneracy is 2**count."""
    ops, _ = _check_generators(lat)
    return lat.n_qubits - rank(BitMatrix.from_rows([p.symplectic() for p in ops]))


def defects(lat: Lattice, p: PauliOperator) -> Tuple[List[Vertex], List[Face]]:
    """Vertices whose star and faces whose plaquette anticommute with p."""
    x = p.x.astype(bool)
    z = p.z.astype(bool)
    stars = [vx for vx, sup in zip(lat.vertices, lat.stars) if z[list(sup)].sum() % 2]
    plaqs = [f for f, sup in zip(lat.faces, lat.plaquettes) if x[list(sup)].sum() % 2]
    return stars, plaqs


# ============================================================================
# Ribbon paths
# ============================================================================

class RibbonKind(str, Enum):
    DIRECT = "direct"
    DUAL = "dual"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class RibbonPath:
    """
    A Z string along lattice edges, an X string along dual edges, or both.
    Edges listed twice cancel.
    """

    kind: RibbonKind
    edges: Tuple[int, ...] = ()
    dual_edges: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", RibbonKind(self.kind))
        object.__setattr__(self, "edges", tuple(int(q) for q in self.edges))
        object.__setattr__(self, "dual_edges", tuple(int(q) for q in self.dual_edges))

    def endpoints(self, lat: Lattice) -> Tuple[List[Vertex], List[Face]]:
        """Odd-degree vertices of the direct part and odd-degree faces of the dual part."""
        vdeg: dict = {}
        for q in self.edges:
            for vx in lat.edge_endpoints[q]:
                vdeg[vx] = vdeg.get(vx, 0) + 1
        fdeg: dict = {}
        for q in self.dual_edges:
            for f in lat.edge_faces[q]:
                fdeg[f] = fdeg.get(f, 0) + 1
        return (sorted(v for v, d in vdeg.items() if d % 2),
                sorted(f for f, d in fdeg.items() if d % 2))

    def validate(self, lat: Lattice) -> "RibbonPath":
        n = lat.n_qubits
        for q in self.edges + self.dual_edges:
            if q < 0 or q >= n:
                raise InputError(f"path edge {q} is not on the lattice")
        if self.kind == RibbonKind.DIRECT and self.dual_edges:
            raise InputError("direct path carries dual edges")
        if self.kind == RibbonKind.DUAL and self.edges:
            raise InputError("dual path carries direct edges")
        if self.kind == RibbonKind.COMPOSITE and not (self.edges and self.dual_edges):
            raise InputError("composite path needs both a direct and a dual part")
        for a, b in zip(self.edges, self.edges[1:]):
            if not set(lat.edge_endpoints[a]) & set(lat.edge_endpoints[b]):
                raise InputError(f"edges {a} and {b} are not adjacent")
        for a, b in zip(self.dual_edges, self.dual_edges[1:]):
            if not set(lat.edge_faces[a]) & set(lat.edge_faces[b]):
                raise InputError(f"dual edges {a} and {b} do not share a face")
        return self


def _edges_along(graph: nx.MultiGraph, nodes: List) -> Tuple[int, ...]:
    edges = []
    for a, b in zip(nodes, nodes[1:]):
        edges.append(min(graph[a][b]))
    return tuple(edges)


def direct_path(lat: Lattice, u: Vertex, w: Vertex) -> RibbonPath:
    """Shortest Z string from vertex u to vertex w."""
    nodes = nx.shortest_path(lat.vertex_graph, lat.wrap(*u), lat.wrap(*w))
    return RibbonPath(RibbonKind.DIRECT, edges=_edges_along(lat.vertex_graph, nodes))


def dual_path(lat: Lattice, f: Face, g: Face) -> RibbonPath:
    """Shortest X string from face f to face g."""
    nodes = nx.shortest_path(lat.dual_graph, lat.wrap(*f), lat.wrap(*g))
    return RibbonPath(RibbonKind.DUAL, dual_edges=_edges_along(lat.dual_graph, nodes))


def composite_path(direct: RibbonPath, dual: RibbonPath) -> RibbonPath:
    return RibbonPath(RibbonKind.COMPOSITE, edges=direct.edges, dual_edges=dual.dual_edges)


def ribbon_operator(lat: Lattice, path: RibbonPath) -> PauliOperator:
    """X on the dual part times Z on the direct part."""
    path.validate(lat)
    return PauliOperator.from_support(lat.n_qubits, x_edges=path.dual_edges, z_edges=path.edges)


# ============================================================================
# Queries
# ============================================================================

def expectation(state: StabilizerState, p: PauliOperator) -> int:
    """<p> in the state: +1 if p is in S, -1 if -p is, 0 otherwise."""
    coefficients = state.decompose(p)
    if coefficients is None:
        return 0
    element = state.element(coefficients)
    diff = (p.phase - element.phase) % 4
    if diff == 0:
        return 1
    if diff == 2:
        return -1
    raise InputError("operator is i times a stabilizer element; it is not Hermitian")


def _outside_constraints(state: StabilizerState, r: Region) -> Tuple[BitMatrix, np.ndarray]:
    outside = ~r.mask(state.n)
    block = np.vstack([state.x_bits[:, outside].T, state.z_bits[:, outside].T])
    return BitMatrix(block.shape[0], block.shape[1], block), outside


def coset_support_feasible(state: StabilizerState, q: PauliOperator, r: Region) -> Optional[PauliOperator]:
    """
    An element s of S with support(q s) inside r, or None if the coset
    q S has no representative there.
    """
    if q.n != state.n:
        raise InputError(f"operator on {q.n} qubits for a state on {state.n}")
    system, outside = _outside_constraints(state, r)
    rhs = np.concatenate([q.x[outside], q.z[outside]])
    coefficients = solve(system, rhs)
    if coefficients is None:
        return None
    return state.element(coefficients)


def inside_stabilizers(state: StabilizerState, r: Region) -> List[PauliOperator]:
    """Basis of the stabilizer elements supported inside r."""
    system, _ = _outside_constraints(state, r)
    return [state.element(c) for c in nullspace(system)]


def inside_dimension(state: StabilizerState, r: Region) -> int:
    """dim of {s in S : support(s) inside r}."""
    system, _ = _outside_constraints(state, r)
    if system.rows == 0:
        return system.cols
    return len(nullspace(system))
