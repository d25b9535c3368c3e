# tests/test_cross_module.py

"""
Stabilizer vs. Dense Cross-Checks

On lattices small enough for full state vectors, the symplectic engine and
the dense backend must agree on:
- expectation values of random Paulis and of stabilizer products
- the symplectic form and dense commutators of random Paulis
- entanglement entropies of random regions
- Wilson-loop signatures of the four code states
"""

from __future__ import annotations

import numpy as np
import pytest

from denseq import (
    apply_pauli, dense_entropy, pauli_expectation, stabilizer_statevector, statevector_ground,
)
from entropy import region_entropy
from lattice import Region, build_lattice
from secretshare import build_code_states, wilson_loops
from stabilizer import (
    expectation, plaquette_operator, random_pauli, star_operator, toric_ground_state,
)

SMALL_LATTICES = [("torus", 2), ("planar", 3)]


def small_ground(geometry, L):
    lat = build_lattice(geometry, L)
    ground = toric_ground_state(lat)
    return lat, ground, stabilizer_statevector(ground)


# ============================================================================
# Expectation values
# ============================================================================

@pytest.mark.acceptance
@pytest.mark.parametrize("geometry, L", SMALL_LATTICES)
def test_random_pauli_expectations_agree(geometry, L):
    lat, ground, vec = small_ground(geometry, L)
    rng = np.random.default_rng(17)
    mismatches = []
    for trial in range(100):
        size = int(rng.integers(1, lat.n_qubits + 1))
        support = rng.choice(lat.n_qubits, size=size, replace=False)
        p = random_pauli(lat.n_qubits, support.tolist(), rng)
        dense = pauli_expectation(vec, p)
        exact = expectation(ground, p)
        if abs(dense - exact) > 1e-9:
            mismatches.append((trial, p.label(), exact, dense))
    assert not mismatches, f"Mismatched expectations: {mismatches[:3]}"


def _dense_matrix(p):
    size = 1 << p.n
    return np.column_stack([apply_pauli(column, p) for column in np.eye(size, dtype=complex)])


@pytest.mark.parametrize("n", [5, 8])
def test_symplectic_form_matches_dense_commutators(n):
    """sympl(P, Q) = 0 exactly when the dense matrices commute, otherwise they anticommute."""
    rng = np.random.default_rng(41 + n)
    outcomes = set()
    for trial in range(30):
        p = random_pauli(n, range(n), rng)
        q = random_pauli(n, range(n), rng)
        mp, mq = _dense_matrix(p), _dense_matrix(q)
        commute = np.allclose(mp @ mq, mq @ mp, atol=1e-12)
        anticommute = np.allclose(mp @ mq, -(mq @ mp), atol=1e-12)
        outcomes.add(p.sympl(q))
        assert commute == (p.sympl(q) == 0), f"{p.label()} vs {q.label()}: sympl {p.sympl(q)}"
        assert commute != anticommute
    assert outcomes == {0, 1}, "Both commuting and anticommuting pairs should be drawn"


@pytest.mark.parametrize("geometry, L", SMALL_LATTICES)
def test_stabilizer_products_are_plus_one_on_the_dense_state(geometry, L):
    lat, ground, vec = small_ground(geometry, L)
    for vx in lat.vertices[:3]:
        for face in lat.faces[:3]:
            s = star_operator(lat, vx) * plaquette_operator(lat, face)
            assert expectation(ground, s) == 1
            assert abs(pauli_expectation(vec, s) - 1.0) < 1e-9


# ============================================================================
# Entropies
# ============================================================================

@pytest.mark.acceptance
@pytest.mark.parametrize("geometry, L", SMALL_LATTICES)
def test_region_entropies_agree(geometry, L):
    lat, ground, vec = small_ground(geometry, L)
    rng = np.random.default_rng(23)
    print(f"\n{'='*70}")
    print(f"ENTROPY CROSS-CHECK {geometry} L={L} ({lat.n_qubits} qubits)")
    print(f"{'='*70}")
    for trial in range(25):
        size = int(rng.integers(1, lat.n_qubits))
        edges = set(rng.choice(lat.n_qubits, size=size, replace=False).tolist())
        r = Region(frozenset(edges), f"r{trial}")
        exact = region_entropy(ground, r)
        dense = dense_entropy(vec, r)
        assert abs(dense - exact) < 1e-9, f"{sorted(edges)}: stabilizer {exact}, dense {dense}"


# ============================================================================
# Code states
# ============================================================================

@pytest.mark.dense
def test_code_state_signatures_agree(lattice3, ground3, layout3):
    omega = stabilizer_statevector(ground3)
    loops = wilson_loops(lattice3, layout3["A"])
    for cc, state in build_code_states(ground3, layout3, min_separation=1):
        vec = apply_pauli(omega, cc.operator)
        for kind, loop in loops.items():
            exact = expectation(state, loop)
            dense = pauli_expectation(vec, loop)
            assert abs(dense - exact) < 1e-9, f"class {cc.label}, {kind} loop: {exact} vs {dense}"


def test_statevector_ground_matches_the_tableau():
    lat, _, vec = small_ground("torus", 2)
    assert abs(abs(np.vdot(statevector_ground(lat), vec)) - 1.0) < 1e-9
