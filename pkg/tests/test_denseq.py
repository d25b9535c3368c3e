# tests/test_denseq.py

"""
Dense Backend Tests

Covers:
- Density-matrix validation, partial traces and qubit ordering
- von Neumann and relative entropies, Holevo chi and its divergence form
- Stabilizer states as dense vectors
- Crossed-product channel checks (conditional expectation, twirl, dual
  action, Schrodinger picture, Pimsner-Popa bound, Stinespring dilation)
- Entropy-gain search against log 4
- Max-entropy states and irreducible correlations of named states
- The chi route to the index on the smallest dense torus
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from denseq import (
    DensityMatrix, Ensemble, apply_pauli, build_crossed_product, chi_secret_check,
    conditional_expectation_check, dual_action_check, embed_operator, entropy_gain,
    entropy_gain_search, holevo_chi, irreducible_correlation, max_entropy_state, named_state,
    partial_trace, pimsner_popa_check, relative_entropy, schrodinger_check, stabilizer_statevector,
    stinespring_verify, twirl_check, vn_entropy,
)
from errors import CapabilityError, InputError
from stabilizer import PauliOperator, product_state

LN2 = math.log(2.0)
LN4 = math.log(4.0)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KETPLUS = np.array([1, 1], dtype=complex) / math.sqrt(2.0)
BELL = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0)


# ============================================================================
# Density matrices and partial traces
# ============================================================================

@pytest.mark.parametrize("matrix", [
    [[1, 1], [0, 0]],
    [[0.6, 0], [0, 0.6]],
    [[1.5, 0], [0, -0.5]],
    [[1, 0, 0]],
])
def test_invalid_density_matrices(matrix):
    with pytest.raises(InputError):
        DensityMatrix(np.array(matrix, dtype=complex))


def test_bell_marginal_is_maximally_mixed():
    rho = partial_trace(BELL, [0])
    assert np.allclose(rho.matrix, np.eye(2) / 2)
    assert abs(vn_entropy(rho) - 1.0) < 1e-12
    assert abs(vn_entropy(rho, "e") - LN2) < 1e-12


def test_partial_trace_keeps_qubit_order():
    """Basis index 1 sets qubit 0; keeping qubit 0 leaves |1><1|."""
    vec = np.zeros(4, dtype=complex)
    vec[1] = 1.0
    assert np.allclose(partial_trace(vec, [0]).matrix, np.diag([0, 1]))
    assert np.allclose(partial_trace(vec, [1]).matrix, np.diag([1, 0]))


def test_embed_operator_places_the_high_qubit_first():
    z = np.diag([1, -1]).astype(complex)
    assert np.allclose(embed_operator(z, [1], 2), np.kron(z, np.eye(2)))
    assert np.allclose(embed_operator(z, [0], 2), np.kron(np.eye(2), z))


def test_partial_trace_rejects_bad_inputs():
    with pytest.raises(InputError):
        partial_trace(np.ones(3), [0])
    with pytest.raises(InputError):
        partial_trace(BELL, [2])
    with pytest.raises(CapabilityError):
        vec = np.zeros(1 << 12, dtype=complex)
        vec[0] = 1.0
        partial_trace(vec, range(11))


# ============================================================================
# Entropies
# ============================================================================

def test_entropy_of_a_tilted_qubit():
    p = (1 + 1 / math.sqrt(2.0)) / 2
    rho = DensityMatrix(np.diag([p, 1 - p]).astype(complex))
    assert abs(vn_entropy(rho) - 0.600876) < 1e-6


def test_relative_entropy():
    pure0 = DensityMatrix.from_vector(KET0)
    mixed = DensityMatrix.maximally_mixed(2)
    assert abs(relative_entropy(pure0, mixed) - 1.0) < 1e-12
    assert relative_entropy(mixed, pure0) == math.inf
    assert relative_entropy(mixed, mixed) < 1e-12


def test_holevo_of_orthogonal_states_is_one_bit():
    ens = Ensemble.uniform([DensityMatrix.from_vector(KET0), DensityMatrix.from_vector(KET1)])
    report = holevo_chi(ens)
    assert abs(report.chi - 1.0) < 1e-12
    assert report.identity_error < 1e-9
    assert not report.flags


def test_holevo_of_non_orthogonal_states():
    """chi of {|0>, |+>} is the entropy of their mean."""
    ens = Ensemble.uniform([DensityMatrix.from_vector(KET0), DensityMatrix.from_vector(KETPLUS)])
    report = holevo_chi(ens)
    assert abs(report.chi - 0.600876) < 1e-6, f"chi = {report.chi}"
    assert abs(report.chi - report.divergence_form) < 1e-9


def test_ensemble_weights_must_sum_to_one():
    with pytest.raises(InputError):
        Ensemble(((0.7, DensityMatrix.from_vector(KET0)), (0.7, DensityMatrix.from_vector(KET1))))


# ============================================================================
# Dense stabilizer states
# ============================================================================

def test_statevector_of_a_product_state():
    vec = stabilizer_statevector(product_state(3))
    assert abs(vec[0]) == pytest.approx(1.0)


def test_statevector_follows_pauli_conjugation():
    flip = PauliOperator.from_label("XII")
    vec = stabilizer_statevector(product_state(3).conjugated(flip))
    assert abs(vec[1]) == pytest.approx(1.0), "X on qubit 0 should set bit 0"
    back = apply_pauli(vec, flip)
    assert abs(back[0]) == pytest.approx(1.0)


# ============================================================================
# Crossed-product channels
# ============================================================================

def test_crossed_product_parameters_are_checked():
    with pytest.raises(InputError):
        build_crossed_product(d=3, k=2)
    with pytest.raises(InputError):
        build_crossed_product(d=2, k=3)
    with pytest.raises(InputError):
        build_crossed_product(d=2, k=16)


def test_multiplication_matches_matrices(crossed_product):
    m = crossed_product
    rng = np.random.default_rng(3)
    x, y = m.random_element(rng), m.random_element(rng)
    assert np.allclose(m.to_matrix(m.multiply(x, y)), m.to_matrix(x) @ m.to_matrix(y))
    assert np.allclose(m.to_matrix(m.adjoint(x)), m.to_matrix(x).conj().T)
    assert m.tau(m.identity()) == pytest.approx(1.0)


def test_decompose_rejects_operators_outside_the_algebra(crossed_product_k4):
    m = crossed_product_k4
    rng = np.random.default_rng(4)
    x = m.random_element(rng)
    assert np.allclose(m.decompose(m.to_matrix(x)), x)
    with pytest.raises(InputError):
        m.decompose(rng.standard_normal((m.dim, m.dim)))


@pytest.mark.parametrize("check", [
    conditional_expectation_check, twirl_check, dual_action_check, schrodinger_check,
])
def test_channel_checks_pass(crossed_product, check):
    report = check(crossed_product, samples=20, seed=7)
    assert report.passed, f"{report.check} violations: {report.violations} {report.errors}"


def test_twirl_fixes_only_scalars(crossed_product):
    values = twirl_check(crossed_product, samples=5).values
    assert values["fixed_point_dim"] == 1
    assert values["p0_rank"] == 1


def test_schrodinger_picture_erases_visible_coherence(crossed_product):
    report = schrodinger_check(crossed_product, samples=20)
    assert report.passed
    assert report.values["coherence_visible"] > 1e-6, "Coherence should be visible before E"


def test_pimsner_popa_bound_is_tight(crossed_product):
    report = pimsner_popa_check(crossed_product, samples=200, seed=7, threads=2)
    values = report.values
    print(f"\n{'='*70}")
    print("PIMSNER-POPA")
    print(f"{'='*70}")
    print(f"  best lambda = {values['best_lambda']}, min sample eig = {values['min_sample_eig']:.3e}")
    assert report.passed, f"Violations: {report.violations}"
    assert values["best_lambda"] == pytest.approx(0.25, abs=1e-9)
    assert values["index"] == pytest.approx(4.0, abs=1e-8)
    assert values["identity_min_eig"] == pytest.approx(0.75, abs=1e-12)


def test_stinespring_with_nontrivial_commutant(crossed_product_k4):
    report = stinespring_verify(crossed_product_k4, samples=20)
    assert report.passed, f"Violations: {report.violations} {report.errors}"
    assert report.values["commutant_dim"] == 4
    assert not report.values["trivial_commutant"]
    assert report.values["dilation_rank"] == crossed_product_k4.represented_dim


def test_stinespring_on_the_smallest_model(crossed_product):
    report = stinespring_verify(crossed_product, samples=10)
    assert report.passed
    assert report.values["trivial_commutant"]


# ============================================================================
# Entropy gain
# ============================================================================

@pytest.mark.acceptance
@pytest.mark.slow
def test_entropy_gain_search_stays_below_log4(crossed_product):
    report = entropy_gain_search(crossed_product, random_povms=20, restarts=2, steps=10, seed=7)
    print(f"\n{'='*70}")
    print("ENTROPY GAIN SEARCH")
    print(f"{'='*70}")
    print(f"  optimum {report.optimum:.9f}, two-outcome {report.two_outcome:.6f}, "
          f"best {report.value:.9f} over {report.evaluations} POVMs")
    assert report.passed, f"{report.exceedances} POVMs exceeded log 4"
    assert report.optimum == pytest.approx(LN4, abs=1e-9)
    assert report.two_outcome == pytest.approx(0.5623, abs=1e-4)
    assert report.value <= LN4 + 1e-9
    assert report.evaluations == 2 + 20 + 2 * 11


@pytest.mark.acceptance
@pytest.mark.slow
def test_channel_bounds_hold_at_full_sample_counts(crossed_product):
    """1000 positive samples for E(X) >= X/4 and 1000 random POVMs below log 4."""
    pp = pimsner_popa_check(crossed_product, samples=1000, seed=11, threads=4)
    assert pp.passed, f"Violations: {pp.violations}"
    assert pp.values["best_lambda"] == pytest.approx(0.25, abs=1e-9)
    search = entropy_gain_search(crossed_product, random_povms=1000, restarts=1, steps=5, seed=11)
    assert search.passed, f"{search.exceedances} POVMs exceeded log 4"
    assert search.value <= LN4 + 1e-9
    assert search.evaluations == 2 + 1000 + 6


def test_trivial_povm_gains_nothing(crossed_product):
    assert entropy_gain(crossed_product, [crossed_product.identity()]) == pytest.approx(0.0, abs=1e-12)


def test_povm_must_sum_to_identity(crossed_product):
    half = crossed_product.identity() / 2
    with pytest.raises(InputError):
        entropy_gain(crossed_product, [half])


def test_single_povm_report(crossed_product):
    povm = list(crossed_product.character_projections().values())
    report = entropy_gain_search(crossed_product, povm=povm)
    assert report.mode == "povm"
    assert report.value == pytest.approx(LN4, abs=1e-9)
    assert report.evaluations == 1


# ============================================================================
# Max-entropy and irreducible correlations
# ============================================================================

def test_no_constraints_gives_the_maximally_mixed_state():
    report = max_entropy_state([], 3)
    assert report.entropies["solution"] == 3.0
    assert np.allclose(report.state.matrix, np.eye(8) / 8)


def test_pure_marginals_pin_the_product_state():
    rho = named_state("product", 3)
    cons = [((q,), partial_trace(rho, [q])) for q in range(3)]
    report = max_entropy_state(cons, 3)
    assert report.residual < 1e-8
    assert report.entropies["solution"] == pytest.approx(0.0, abs=1e-9)


def test_inconsistent_marginals_are_rejected():
    mixed = DensityMatrix.maximally_mixed(4)
    pure = DensityMatrix.from_vector(np.array([1, 0, 0, 0], dtype=complex))
    with pytest.raises(InputError):
        max_entropy_state([((0, 1), mixed), ((1, 2), pure)], 3)


def test_solver_qubit_limit():
    with pytest.raises(CapabilityError):
        max_entropy_state([], 9)


@pytest.mark.acceptance
@pytest.mark.parametrize("name, n, k, expected", [
    ("even-parity", 3, 3, 1.0),
    ("product", 3, 3, 0.0),
    ("bell", 2, 2, 2.0),
    ("ghz", 3, 3, 1.0),
])
def test_irreducible_correlation_of_named_states(name, n, k, expected):
    report = irreducible_correlation(named_state(name, n), k)
    assert report.correlation == pytest.approx(expected, abs=1e-6), \
        f"C({k}) of {name}: {report.correlation}"
    assert "entropy-not-monotone" not in report.flags
    assert report.to_dict()["sign_convention"] == "S(k-1) - S(k)"


def test_parity_has_no_two_body_correlation():
    report = irreducible_correlation(named_state("even-parity", 3), 2)
    assert report.correlation == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("name, n", [("bell", 3), ("ghz", 9), ("even-parity", 1), ("w-state", 3)])
def test_named_state_errors(name, n):
    with pytest.raises(InputError):
        named_state(name, n)


def test_correlation_order_range():
    with pytest.raises(InputError):
        irreducible_correlation(named_state("ghz", 3), 0)


# ============================================================================
# Chi route
# ============================================================================

@pytest.mark.dense
@pytest.mark.acceptance
def test_chi_gives_two_bits_to_alice_and_bob(lattice3, layout3):
    report = chi_secret_check(lattice3, layout3, min_separation=1)
    print(f"\n{'='*70}")
    print("CHI ROUTE (L=3)")
    print(f"{'='*70}")
    print(f"  chi_AB = {report.chi_ab:.9f} bits, chi_E = {report.chi_e:.3e} bits")
    assert report.chi_ab == pytest.approx(2.0, abs=1e-9)
    assert report.chi_e == pytest.approx(0.0, abs=1e-9)
    assert report.eve_blind
    assert report.max_overlap < 1e-9
    assert report.to_dict()["difference_bits"] == pytest.approx(2.0, abs=1e-9)
