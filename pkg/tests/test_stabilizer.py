# tests/test_stabilizer.py

"""
Pauli and Stabilizer Engine Tests

Covers:
- Pauli products, phases and commutation
- Toric-code ground states: generator count, logical count, planar patch
- Expectation values of stabilizer elements, logicals and local Paulis
- Ribbon operators and their endpoint defects
- Coset support and inside-region stabilizers
- Deformed strings with shared endpoints differ by a stabilizer
- Membership and coset support against the enumerated group of a small torus
"""

from __future__ import annotations

import numpy as np
import pytest

from errors import InputError
from lattice import Region, build_lattice, rectangle
from stabilizer import (
    PauliOperator, RibbonPath, StabilizerState, coset_support_feasible, defects, direct_path,
    dual_path, expectation, inside_dimension, inside_stabilizers, logical_count,
    logical_x_loops, logical_z_loops, plaquette_operator, product, product_state,
    random_pauli, ribbon_operator, star_operator, toric_ground_state,
)


# ============================================================================
# Pauli algebra
# ============================================================================

def test_xz_products_pick_up_signs():
    """XZ = -ZX and XZ = -iY."""
    x = PauliOperator.from_label("X")
    z = PauliOperator.from_label("Z")
    y = PauliOperator.from_label("Y")
    assert x * z == -(z * x)
    assert not x.commutes(z)
    assert x * z == PauliOperator(y.x, y.z, 0), "XZ should carry no phase"
    assert (y * y).is_identity() and (y * y).phase == 0, f"Y^2 = {y * y}"


def test_hermiticity():
    assert PauliOperator.from_label("XYZ").is_hermitian()
    assert not PauliOperator(np.array([1], np.uint8), np.array([1], np.uint8), 0).is_hermitian()


def test_product_matches_pairwise_multiplication():
    rng = np.random.default_rng(5)
    ops = [random_pauli(6, range(6), rng) for _ in range(5)]
    pairwise = ops[0]
    for p in ops[1:]:
        pairwise = pairwise * p
    assert product(ops) == pairwise


def test_product_of_nothing_needs_n():
    with pytest.raises(InputError):
        product([])
    assert product([], n=3).is_identity()


def test_label_roundtrip_for_a_small_string():
    assert PauliOperator.from_label("IXZY").label() == "IXZY"


# ============================================================================
# Ground states
# ============================================================================

@pytest.mark.parametrize("L", list(range(2, 11)))
def test_logical_count_on_torus(L):
    """Two logical qubits (degeneracy 4) on every torus."""
    assert logical_count(build_lattice("torus", L)) == 2


@pytest.mark.parametrize("L", [2, 3, 5])
def test_logical_count_on_planar_patch(L):
    assert logical_count(build_lattice("planar", L)) == 0


def test_toric_ground_state_is_pure(lattice8, ground8):
    """n independent generators; stars, plaquettes and Z loops are all +1."""
    assert len(ground8.generators) == lattice8.n_qubits
    assert expectation(ground8, star_operator(lattice8, (3, 4))) == 1
    assert expectation(ground8, plaquette_operator(lattice8, (5, 1))) == 1
    for loop in logical_z_loops(lattice8):
        assert expectation(ground8, loop) == 1


def test_x_logicals_and_local_paulis_vanish(lattice8, ground8):
    for loop in logical_x_loops(lattice8):
        assert expectation(ground8, loop) == 0
    single = PauliOperator.from_support(lattice8.n_qubits, z_edges=[0])
    assert expectation(ground8, single) == 0


def test_negated_stabilizer_reads_minus_one(lattice8, ground8):
    s = star_operator(lattice8, (1, 1)) * plaquette_operator(lattice8, (6, 6))
    assert expectation(ground8, -s) == -1


def test_non_commuting_generators_rejected():
    x = PauliOperator.from_label("XI")
    z = PauliOperator.from_label("ZI")
    with pytest.raises(InputError):
        StabilizerState((x, z))


def test_conjugated_flips_anticommuting_generators():
    state = product_state(3)
    flipped = state.conjugated(PauliOperator.from_label("XII"))
    assert expectation(flipped, PauliOperator.from_label("ZII")) == -1
    assert expectation(flipped, PauliOperator.from_label("IZI")) == 1


# ============================================================================
# Ribbons
# ============================================================================

def test_direct_ribbon_creates_charges_at_its_ends(lattice8):
    path = direct_path(lattice8, (1, 1), (1, 4))
    op = ribbon_operator(lattice8, path)
    stars, plaqs = defects(lattice8, op)
    assert sorted(stars) == [(1, 1), (1, 4)]
    assert plaqs == []


def test_dual_ribbon_creates_fluxes_at_its_ends(lattice8):
    path = dual_path(lattice8, (2, 2), (5, 2))
    op = ribbon_operator(lattice8, path)
    stars, plaqs = defects(lattice8, op)
    assert stars == []
    assert sorted(plaqs) == [(2, 2), (5, 2)]


# ============================================================================
# Region queries
# ============================================================================

def test_coset_support_moves_a_star_into_a_region(lattice8, ground8):
    """The coset of a star has a representative on the star's own edges."""
    star = star_operator(lattice8, (4, 4))
    r = Region(set(lattice8.star((4, 4))), "r")
    s = coset_support_feasible(ground8, star, r)
    assert s is not None
    assert (star * s).support() <= r.edges


def test_coset_support_infeasible_for_logical(lattice8, ground8):
    """An X loop cannot be squeezed into a small box."""
    loop = logical_x_loops(lattice8)[0]
    r = Region(set(range(10)), "small")
    assert coset_support_feasible(ground8, loop, r) is None


def test_inside_stabilizers_of_a_rectangle(lattice8, ground8):
    """A 2x2-plaquette rectangle holds 4 plaquettes and 1 interior star."""
    r = rectangle(lattice8, (1, 1), (2, 2))
    assert inside_dimension(ground8, r) == 5
    for s in inside_stabilizers(ground8, r):
        assert s.support() <= r.edges
        assert expectation(ground8, s) == 1


# ============================================================================
# Deformations
# ============================================================================

def _joined(pieces):
    """One ribbon path made of consecutive pieces."""
    kind = pieces[0].kind
    edges = tuple(q for p in pieces for q in p.edges)
    dual = tuple(q for p in pieces for q in p.dual_edges)
    return RibbonPath(kind, edges=edges, dual_edges=dual)


def test_homologous_z_strings_differ_by_a_stabilizer(lattice8, ground8):
    """A straight Z string and a detour one row down close into plaquettes."""
    straight = direct_path(lattice8, (2, 2), (2, 5))
    detour = _joined([
        direct_path(lattice8, (2, 2), (3, 2)),
        direct_path(lattice8, (3, 2), (3, 5)),
        direct_path(lattice8, (3, 5), (2, 5)),
    ])
    assert straight.endpoints(lattice8) == detour.endpoints(lattice8)
    loop = ribbon_operator(lattice8, straight) * ribbon_operator(lattice8, detour)
    assert expectation(ground8, loop) in (1, -1), "Deformed string left the stabilizer group"
    assert expectation(ground8, loop) == 1


def test_homologous_x_strings_differ_by_a_stabilizer(lattice8, ground8):
    straight = dual_path(lattice8, (2, 2), (2, 5))
    detour = _joined([
        dual_path(lattice8, (2, 2), (3, 2)),
        dual_path(lattice8, (3, 2), (3, 5)),
        dual_path(lattice8, (3, 5), (2, 5)),
    ])
    assert straight.endpoints(lattice8) == detour.endpoints(lattice8)
    loop = ribbon_operator(lattice8, straight) * ribbon_operator(lattice8, detour)
    assert expectation(ground8, loop) == 1


def test_strings_around_the_torus_differ_by_a_logical(lattice8, ground8):
    """Same endpoints, other way round the torus: the product is an X logical loop."""
    short = dual_path(lattice8, (2, 2), (2, 5))
    around = _joined([
        dual_path(lattice8, (2, 5), (2, 7)),
        dual_path(lattice8, (2, 7), (2, 1)),
        dual_path(lattice8, (2, 1), (2, 2)),
    ])
    assert short.endpoints(lattice8) == around.endpoints(lattice8)
    loop = ribbon_operator(lattice8, short) * ribbon_operator(lattice8, around)
    assert expectation(ground8, loop) == 0


# ============================================================================
# Exhaustive checks on a small torus
# ============================================================================

@pytest.fixture(scope="module")
def small_group():
    """Every element of the stabilizer group of the L = 2 torus (8 qubits)."""
    lat = build_lattice("torus", 2)
    state = toric_ground_state(lat)
    k = len(state.generators)
    elements = [state.element([(c >> g) & 1 for g in range(k)]) for c in range(1 << k)]
    return lat, state, elements


def test_small_group_is_complete(small_group):
    lat, _, elements = small_group
    assert len(set(elements)) == 1 << lat.n_qubits


def test_expectation_matches_group_membership(small_group):
    lat, state, elements = small_group
    members = set(elements)
    rng = np.random.default_rng(31)
    candidates = [random_pauli(lat.n_qubits, range(lat.n_qubits), rng) for _ in range(150)]
    candidates += [elements[int(i)] for i in rng.integers(0, len(elements), size=50)]
    candidates += [-elements[int(i)] for i in rng.integers(1, len(elements), size=50)]
    for p in candidates:
        expected = 1 if p in members else -1 if -p in members else 0
        assert expectation(state, p) == expected, f"{p.label()} (phase {p.phase}): expected {expected}"


def test_coset_support_matches_enumeration(small_group):
    lat, state, elements = small_group
    n = lat.n_qubits
    xs = np.array([s.x for s in elements], dtype=np.uint8)
    zs = np.array([s.z for s in elements], dtype=np.uint8)
    rng = np.random.default_rng(37)
    feasible_seen = infeasible_seen = 0
    for trial in range(80):
        q = random_pauli(n, range(n), rng)
        inside = rng.choice(n, size=int(rng.integers(1, n)), replace=False)
        r = Region(frozenset(inside.tolist()), f"r{trial}")
        outside = ~r.mask(n)
        spill = ((xs ^ q.x) | (zs ^ q.z))[:, outside]
        exists = bool((~spill.any(axis=1)).any())
        s = coset_support_feasible(state, q, r)
        assert (s is not None) == exists, f"trial {trial}: solver {s is not None}, enumeration {exists}"
        if s is not None:
            feasible_seen += 1
            assert (q * s).support() <= r.edges
            assert s in set(elements)
        else:
            infeasible_seen += 1
    assert feasible_seen and infeasible_seen, "Both outcomes should occur"
