# denseq.py

"""
Dense complex linear algebra for small systems.

Three groups of tools live here:

- state vectors and density matrices for lattices of up to
  MAX_DENSE_QUBITS qubits: an independent oracle for the stabilizer
  engine and the Holevo-chi route to the index
- a finite crossed product N < M = N x| (Z2 x Z2) with its conditional
  expectation, Stinespring dilation, twirl and entropy gain
- a max-entropy solver for marginal constraints, and the irreducible
  correlations built on it

Qubit q is bit q of a basis index. Entropies are in bits unless a base
is given; crossed-product entropies use the normalized trace and are
reported in nats.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as spl

from config import SolverConfig, ToleranceConfig, default_workers
from errors import CapabilityError, ConvergenceError, InputError, TqdError
from gf2core import BitMatrix, nullspace, solve
from lattice import Lattice, LayoutKind, Region, RegionLayout, make_layout
from secretshare import CHARGE_LABELS, build_code_states
from stabilizer import PauliOperator, StabilizerState, toric_ground_state

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 18
MAX_KEPT_QUBITS = 10
MAX_SOLVER_QUBITS = 8

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

Qubits = Union[Region, Iterable[int]]


def _log_divisor(base) -> float:
    if base in (2, "2", "bits"):
        return math.log(2.0)
    if base in ("e", "nats") or (isinstance(base, float) and math.isclose(base, math.e)):
        return 1.0
    raise InputError(f"unsupported log base {base!r}; use 2 or 'e'")


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise CapabilityError(f"{n} qubits exceed the dense limit of {MAX_DENSE_QUBITS}")


def _qubit_count(size: int) -> int:
    n = size.bit_length() - 1
    if size < 1 or size != 1 << n:
        raise InputError(f"dimension {size} is not a power of two")
    return n


def _qubits(keep: Qubits, n: int) -> List[int]:
    edges = keep.edges if isinstance(keep, Region) else keep
    qs = sorted({int(q) for q in edges})
    bad = [q for q in qs if q < 0 or q >= n]
    if bad:
        raise InputError(f"qubits {bad[:5]} lie outside a {n}-qubit system")
    return qs


def _axes(qubits: Sequence[int], n: int) -> List[int]:
    # C-order reshape puts qubit n-1 on axis 0.
    return [n - 1 - q for q in reversed(qubits)]


def _kept_first(keep: Sequence[int], n: int) -> List[int]:
    kept = set(keep)
    rest = [q for q in range(n) if q not in kept]
    return _axes(keep, n) + _axes(rest, n)


# ============================================================================
# State vectors
# ============================================================================

def apply_pauli(vec: np.ndarray, p: PauliOperator) -> np.ndarray:
    """p|vec> for p = i^phase X^x Z^z."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.size != 1 << p.n:
        raise InputError(f"vector of length {vec.size} for an operator on {p.n} qubits")
    _check_dense(p.n)
    ks = np.arange(vec.size, dtype=np.int64)
    parity = np.zeros(vec.size, dtype=np.int64)
    for q in np.flatnonzero(p.z):
        parity ^= (ks >> int(q)) & 1
    xmask = 0
    for q in np.flatnonzero(p.x):
        xmask |= 1 << int(q)
    out = np.empty_like(vec)
    out[ks ^ xmask] = _PHASES[p.phase] * (1 - 2 * parity) * vec
    return out


def pauli_expectation(vec: np.ndarray, p: PauliOperator) -> complex:
    return complex(np.vdot(vec, apply_pauli(vec, p)))


def _diagonal_seed(state: StabilizerState) -> int:
    """Basis index on which every diagonal element of the group acts as +1."""
    combos = nullspace(BitMatrix.from_array(state.x_bits.T))
    if not combos:
        return 0
    elements = [state.element(c) for c in combos]
    rows = BitMatrix.from_rows([s.z for s in elements])
    rhs = np.array([(s.phase // 2) & 1 for s in elements], dtype=np.uint8)
    bits = solve(rows, rhs)
    if bits is None:
        raise TqdError("the diagonal subgroup has no common +1 basis state")
    index = 0
    for q in np.flatnonzero(bits):
        index |= 1 << int(q)
    return index


def stabilizer_statevector(state: StabilizerState, atol: Optional[float] = None) -> np.ndarray:
    """
    The unit vector fixed by every generator.

    Projects a basis state that already satisfies the diagonal part of
    the group, so the projection never vanishes.
    """
    n = state.n
    _check_dense(n)
    atol = ToleranceConfig.from_env().state_atol if atol is None else atol
    vec = np.zeros(1 << n, dtype=complex)
    vec[_diagonal_seed(state)] = 1.0
    for g in state.generators:
        vec = 0.5 * (vec + apply_pauli(vec, g))
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        raise TqdError("projection onto the stabilized space vanished")
    vec /= norm
    worst = max(float(np.linalg.norm(apply_pauli(vec, g) - vec)) for g in state.generators)
    if worst > atol:
        raise TqdError(f"state is not stabilized: max |g psi - psi| = {worst:.3e}")
    logger.debug("dense state on %d qubits, stabilizer error %.2e", n, worst)
    return vec


def statevector_ground(lat: Lattice) -> np.ndarray:
    """Dense toric-code ground state."""
    _check_dense(lat.n_qubits)
    return stabilizer_statevector(toric_ground_state(lat))


# ============================================================================
# Density matrices
# ============================================================================

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive, unit trace (all within atol)."""

    matrix: np.ndarray
    atol: float = 1e-10

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"density matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > self.atol:
            raise InputError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        trace = float(np.trace(m).real)
        if abs(trace - 1.0) > self.atol:
            raise InputError(f"density matrix has trace {trace:.12f}")
        lowest = float(spl.eigvalsh(m)[0])
        if lowest < -self.atol:
            raise InputError(f"density matrix has negative eigenvalue {lowest:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.dim)

    def eigenvalues(self) -> np.ndarray:
        return spl.eigvalsh(self.matrix)


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def _as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _reduce(data: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    m = len(keep)
    perm = _kept_first(keep, n)
    if data.ndim == 1:
        t = data.reshape((2,) * n).transpose(perm).reshape(1 << m, -1)
        return t @ t.conj().T
    t = data.reshape((2,) * (2 * n)).transpose(perm + [n + a for a in perm])
    t = t.reshape(1 << m, 1 << (n - m), 1 << m, 1 << (n - m))
    return np.einsum("ajbj->ab", t)


def embed_operator(op: np.ndarray, keep: Qubits, n: int) -> np.ndarray:
    """op on the kept qubits, tensored with the identity elsewhere."""
    qs = _qubits(keep, n)
    op = np.asarray(op, dtype=complex)
    if op.shape != (1 << len(qs), 1 << len(qs)):
        raise InputError(f"operator of shape {op.shape} for {len(qs)} qubits")
    full = np.kron(op, np.eye(1 << (n - len(qs)), dtype=complex))
    inverse = list(np.argsort(_kept_first(qs, n)))
    full = full.reshape((2,) * (2 * n)).transpose(inverse + [n + a for a in inverse])
    return full.reshape(1 << n, 1 << n)


def partial_trace(rho_or_vec, keep: Qubits, n: Optional[int] = None) -> DensityMatrix:
    """Reduced state on the kept qubits, in ascending qubit order."""
    data = _matrix(rho_or_vec)
    if data.ndim not in (1, 2):
        raise InputError("expected a state vector or a density matrix")
    n_sys = _qubit_count(data.shape[0])
    if n is not None and n != n_sys:
        raise InputError(f"state has {n_sys} qubits, caller said {n}")
    qs = _qubits(keep, n_sys)
    if len(qs) > MAX_KEPT_QUBITS:
        raise CapabilityError(f"reduced state on {len(qs)} qubits exceeds {MAX_KEPT_QUBITS}")
    if data.ndim == 2 and len(qs) == n_sys:
        return _as_density(rho_or_vec)
    return DensityMatrix(_reduce(data, qs, n_sys))


def reduced_spectrum(vectors: Sequence[np.ndarray], keep: Qubits,
                     weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    Eigenvalues of sum_x p_x tr_rest |psi_x><psi_x| without forming the
    reduced matrix: the nonzero spectrum equals that of the Gram matrix
    of the stacked blocks, whichever side is smaller.
    """
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vecs:
        raise InputError("no vectors")
    n = _qubit_count(vecs[0].size)
    qs = _qubits(keep, n)
    if weights is None:
        weights = [1.0 / len(vecs)] * len(vecs)
    perm = _kept_first(qs, n)
    blocks = [math.sqrt(w) * v.reshape((2,) * n).transpose(perm).reshape(1 << len(qs), -1)
              for w, v in zip(weights, vecs) if w > 0]
    stacked = np.hstack(blocks)
    if stacked.shape[0] <= stacked.shape[1]:
        gram = stacked @ stacked.conj().T
    else:
        gram = stacked.conj().T @ stacked
    return np.clip(spl.eigvalsh(gram), 0.0, None)


# ============================================================================
# Entropies
# ============================================================================

def entropy_of_spectrum(eigenvalues, base=2, cutoff: Optional[float] = None) -> float:
    cutoff = ToleranceConfig.from_env().eig_cutoff if cutoff is None else cutoff
    lam = np.asarray(eigenvalues, dtype=float)
    lam = lam[lam > cutoff]
    value = float(-np.sum(lam * np.log(lam))) / _log_divisor(base)
    return max(0.0, value)


def vn_entropy(rho, base=2, cutoff: Optional[float] = None) -> float:
    """-sum lambda log lambda; eigenvalues below cutoff count as zero."""
    return entropy_of_spectrum(spl.eigvalsh(_matrix(rho)), base, cutoff)


def dense_entropy(vec: np.ndarray, region: Qubits, base=2) -> float:
    """Entanglement entropy of a pure state across region | rest."""
    return entropy_of_spectrum(reduced_spectrum([vec], region), base)


def relative_entropy(rho, sigma, base=2, cutoff: Optional[float] = None) -> float:
    """S(rho || sigma); infinite when rho has weight outside supp(sigma)."""
    cutoff = ToleranceConfig.from_env().eig_cutoff if cutoff is None else cutoff
    r, s = _matrix(rho), _matrix(sigma)
    if r.shape != s.shape:
        raise InputError(f"shapes differ: {r.shape} vs {s.shape}")
    mu, vecs = spl.eigh(s)
    weights = np.real(np.sum(vecs.conj() * (r @ vecs), axis=0))
    support = mu > cutoff
    if float(np.sum(weights[~support])) > 1e-10:
        return math.inf
    cross = float(np.sum(weights[support] * np.log(mu[support])))
    value = -vn_entropy(r, "e", cutoff) - cross
    return max(0.0, value / _log_divisor(base))


def trace_distance(a, b) -> float:
    diff = _matrix(a) - _matrix(b)
    return 0.5 * float(np.sum(np.abs(spl.eigvalsh(0.5 * (diff + diff.conj().T)))))


@dataclass(frozen=True)
class Ensemble:
    """Weighted states; weights non-negative and summing to one."""

    members: Tuple[Tuple[float, DensityMatrix], ...]

    def __post_init__(self) -> None:
        members = tuple((float(p), _as_density(rho)) for p, rho in self.members)
        if not members:
            raise InputError("empty ensemble")
        if any(p < -1e-10 for p, _ in members):
            raise InputError("negative ensemble weight")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > 1e-10:
            raise InputError(f"ensemble weights sum to {total:.12f}")
        if len({rho.dim for _, rho in members}) != 1:
            raise InputError("ensemble members have different dimensions")
        object.__setattr__(self, "members", members)

    @classmethod
    def uniform(cls, states: Sequence) -> "Ensemble":
        p = 1.0 / len(states)
        return cls(tuple((p, rho) for rho in states))

    def mean(self) -> np.ndarray:
        return sum(p * rho.matrix for p, rho in self.members)


@dataclass
class HolevoReport:
    chi: float
    divergence_form: Optional[float]
    identity_error: Optional[float]
    base: str
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "chi": self.chi,
            "divergence_form": self.divergence_form,
            "identity_error": self.identity_error,
            "base": self.base,
            "flags": list(self.flags),
        }


def holevo_chi(ensemble: Ensemble, base=2, atol: Optional[float] = None) -> HolevoReport:
    """
    S(mean) - sum_x p_x S(rho_x), cross-checked against the equal form
    sum_x p_x S(rho_x || mean).
    """
    atol = ToleranceConfig.from_env().atol if atol is None else atol
    mean = ensemble.mean()
    chi = vn_entropy(mean, base) - sum(p * vn_entropy(rho, base) for p, rho in ensemble.members)
    chi = max(0.0, chi)
    flags: List[str] = []
    divergences = [p * relative_entropy(rho, mean, base) for p, rho in ensemble.members if p > 0]
    if any(math.isinf(d) for d in divergences):
        flags.append("divergence-infinite")
        return HolevoReport(chi, None, None, str(base), flags)
    divergence = float(sum(divergences))
    error = abs(chi - divergence)
    if error > atol:
        flags.append("identity-mismatch")
        logger.warning("holevo identity off by %.3e", error)
    return HolevoReport(chi, divergence, error, str(base), flags)


# ============================================================================
# Chi route to the index
# ============================================================================

@dataclass
class ChiReport:
    """Information Alice+Bob and Eve hold about the charge class (bits)."""

    classes: Tuple[str, ...]
    n_qubits: int
    region_sizes: Dict[str, int]
    chi_ab: float
    chi_e: float
    trace_distances: Dict[str, float]
    max_overlap: float
    eve: HolevoReport
    atol: float

    @property
    def difference(self) -> float:
        return self.chi_ab - self.chi_e

    @property
    def max_trace_distance(self) -> float:
        return max(self.trace_distances.values(), default=0.0)

    @property
    def eve_blind(self) -> bool:
        return self.max_trace_distance <= self.atol and self.chi_e <= self.atol

    def to_dict(self) -> Dict[str, object]:
        ln2 = math.log(2.0)
        return {
            "classes": list(self.classes),
            "n_qubits": self.n_qubits,
            "region_sizes": dict(self.region_sizes),
            "chi_ab_bits": self.chi_ab,
            "chi_ab_nats": self.chi_ab * ln2,
            "chi_e_bits": self.chi_e,
            "chi_e_nats": self.chi_e * ln2,
            "difference_bits": self.difference,
            "difference_nats": self.difference * ln2,
            "trace_distances": dict(self.trace_distances),
            "max_trace_distance": self.max_trace_distance,
            "max_overlap": self.max_overlap,
            "eve_identity_error": self.eve.identity_error,
            "eve_blind": self.eve_blind,
            "flags": list(self.eve.flags),
        }


def chi_secret_check(lat: Lattice, layout: Optional[RegionLayout] = None,
                     min_separation: int = 1,
                     classes: Sequence[str] = CHARGE_LABELS,
                     atol: Optional[float] = None) -> ChiReport:
    """Holevo chi of the uniform code ensemble seen from A u B and from E."""
    _check_dense(lat.n_qubits)
    atol = ToleranceConfig.from_env().atol if atol is None else atol
    ground = toric_ground_state(lat)
    if layout is None:
        layout = make_layout(lat, LayoutKind.TWO_BLOB)
    states = build_code_states(ground, layout, min_separation)
    by_label = {cc.label: cc for cc, _ in states}
    unknown = [c for c in classes if c not in by_label]
    if unknown or not classes:
        raise InputError(f"unknown or empty charge classes: {unknown}")

    omega = stabilizer_statevector(ground)
    vectors = [omega if c == "0" else apply_pauli(omega, by_label[c].operator) for c in classes]
    ab = layout["A"].union(layout["B"], "AB")
    eve = layout["E"]

    p = 1.0 / len(vectors)
    chi_ab = entropy_of_spectrum(reduced_spectrum(vectors, ab)) - \
        sum(p * entropy_of_spectrum(reduced_spectrum([v], ab)) for v in vectors)
    eve_states = [partial_trace(v, eve) for v in vectors]
    eve_report = holevo_chi(Ensemble.uniform(eve_states), 2, atol)

    distances = {f"{classes[i]}|{classes[j]}": trace_distance(eve_states[i], eve_states[j])
                 for i, j in itertools.combinations(range(len(classes)), 2)}
    overlap = max((abs(np.vdot(vectors[i], vectors[j]))
                   for i, j in itertools.combinations(range(len(vectors)), 2)), default=0.0)

    report = ChiReport(tuple(classes), lat.n_qubits,
                       {"A": len(layout["A"]), "B": len(layout["B"]), "E": len(eve)},
                       max(0.0, chi_ab), eve_report.chi, distances, float(overlap), eve_report, atol)
    logger.info("chi_AB=%.6f bits, chi_E=%.3e bits", report.chi_ab, report.chi_e)
    return report


# ============================================================================
# Finite crossed product
# ============================================================================

# Group elements 0, X, Z, Y are indices 0..3; composition is XOR.
GROUP_LABELS: Tuple[str, ...] = ("0", "X", "Z", "Y")

_I2 = np.eye(2, dtype=complex)
_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _block_permutation(g: int) -> np.ndarray:
    perm = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        perm[i, i ^ g] = 1.0
    return perm


@dataclass(frozen=True, eq=False)
class CrossedProductModel:
    """
    N = M_d (x) 1_k acting on H = C^d (x) C^k, extended by the Z2 x Z2
    unitaries V_g = u_g (x) w_g (x) 1. u_X, u_Z flip and phase the system;
    the w_g are the conjugate pair on one multiplicity qubit, so the V_g
    commute and g -> V_g is a representation.

    Elements of M are stored as their coefficients A_g in N, shape (4, d, d),
    meaning X = sum_g (A_g (x) 1_k) V_g.
    """

    d: int
    k: int
    u: Tuple[np.ndarray, ...]
    w: Tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.d * self.k

    @property
    def represented_dim(self) -> int:
        return 4 * self.d * self.k

    @cached_property
    def transporters(self) -> Tuple[np.ndarray, ...]:
        rest = np.eye(self.k // 2, dtype=complex)
        return tuple(np.kron(self.u[g], np.kron(self.w[g], rest)) for g in range(4))

    @cached_property
    def isometry(self) -> np.ndarray:
        e0 = np.zeros((4, 1), dtype=complex)
        e0[0, 0] = 1.0
        return np.kron(e0, np.eye(self.dim, dtype=complex))

    @cached_property
    def p0(self) -> np.ndarray:
        """1/4 sum_g pi(V_g) on the represented space."""
        return sum(self.pi(self.transporter(g)) for g in range(4)) / 4.0

    # -- elements ----------------------------------------------------------

    def element(self, blocks) -> np.ndarray:
        x = np.asarray(blocks, dtype=complex)
        if x.shape != (4, self.d, self.d):
            raise InputError(f"element blocks must have shape (4, {self.d}, {self.d}), got {x.shape}")
        return x

    def identity(self) -> np.ndarray:
        x = np.zeros((4, self.d, self.d), dtype=complex)
        x[0] = np.eye(self.d)
        return x

    def transporter(self, g: int) -> np.ndarray:
        x = np.zeros((4, self.d, self.d), dtype=complex)
        x[g] = np.eye(self.d)
        return x

    def embed(self, a: np.ndarray) -> np.ndarray:
        """a in N as an element of M."""
        x = np.zeros((4, self.d, self.d), dtype=complex)
        x[0] = a
        return x

    def alpha(self, g: int, a: np.ndarray) -> np.ndarray:
        return self.u[g] @ a @ self.u[g].conj().T

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for m in range(4):
            out[m] = sum(x[g] @ self.alpha(g, y[g ^ m]) for g in range(4))
        return out

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        return np.stack([self.alpha(g, x[g].conj().T) for g in range(4)])

    def expectation(self, x: np.ndarray) -> np.ndarray:
        """The conditional expectation: keep A_0."""
        return self.embed(x[0])

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        eye = np.eye(self.k, dtype=complex)
        return sum(np.kron(x[g], eye) @ self.transporters[g] for g in range(4))

    def pi(self, x: np.ndarray) -> np.ndarray:
        """Block matrix whose (i, j) block is A_{i^j} V_{i^j}."""
        eye = np.eye(self.k, dtype=complex)
        return sum(np.kron(_block_permutation(g), np.kron(x[g], eye) @ self.transporters[g])
                   for g in range(4))

    def decompose(self, y: np.ndarray, atol: float = 1e-9) -> np.ndarray:
        """Coefficients of an operator on H; it must lie in M."""
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.dim, self.dim):
            raise InputError(f"operator of shape {y.shape} on a space of dimension {self.dim}")
        blocks = []
        for g in range(4):
            t = (y @ self.transporters[g].conj().T).reshape(self.d, self.k, self.d, self.k)
            blocks.append(np.einsum("ajbj->ab", t) / self.k)
        x = np.stack(blocks)
        if np.max(np.abs(self.to_matrix(x) - y)) > atol:
            raise InputError("operator is not in the crossed product")
        return x

    def tau(self, x: np.ndarray) -> float:
        return float(np.trace(self.pi(x)).real) / self.represented_dim

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        shape = (4, self.d, self.d)
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2 * self.d)

    def random_positive(self, rng: np.random.Generator) -> np.ndarray:
        y = self.random_element(rng)
        return self.multiply(self.adjoint(y), y)

    def character(self, s: int, t: int) -> Tuple[float, ...]:
        """chi(g) = (-1)^(s g_X + t g_Z)."""
        return tuple(float((-1) ** ((s * (g & 1) + t * ((g >> 1) & 1)) % 2)) for g in range(4))

    def character_projections(self) -> Dict[str, np.ndarray]:
        """Q_chi = 1/4 sum_g chi(g) V_g; Q for the trivial character is P_0."""
        out: Dict[str, np.ndarray] = {}
        for s, t in itertools.product((0, 1), repeat=2):
            chi = self.character(s, t)
            out[f"chi{s}{t}"] = np.stack([chi[g] * np.eye(self.d) / 4.0 for g in range(4)])
        return out


def build_crossed_product(d: int = 2, k: int = 2) -> CrossedProductModel:
    if d != 2:
        raise InputError(f"only d = 2 is supported, got d = {d}")
    if k < 2 or k % 2:
        raise InputError(f"k must be even and at least 2, got k = {k}")
    if 4 * d * k > 64:
        raise InputError(f"represented dimension 4*d*k = {4 * d * k} exceeds 64")
    u = (np.eye(d, dtype=complex), _PX, _PZ, _PX @ _PZ)
    w = (_I2, _PZ, _PX, _PZ @ _PX)
    model = CrossedProductModel(d, k, u, w)
    logger.debug("crossed product d=%d k=%d, represented dimension %d", d, k, model.represented_dim)
    return model


def _rngs(seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _maxabs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


@dataclass
class ChannelReport:
    """Named errors against their tolerances, plus informational values."""

    check: str
    errors: Dict[str, float]
    tolerances: Dict[str, float]
    values: Dict[str, object] = field(default_factory=dict)

    @property
    def violations(self) -> List[str]:
        return sorted(name for name, err in self.errors.items()
                      if not err <= self.tolerances.get(name, 0.0))

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {
            "check": self.check,
            "errors": dict(sorted(self.errors.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "values": dict(sorted(self.values.items())),
            "violations": self.violations,
            "passed": self.passed,
        }


def _matrix_units(size: int) -> Iterable[Tuple[int, int, np.ndarray]]:
    for a in range(size):
        for b in range(size):
            e = np.zeros((size, size), dtype=complex)
            e[a, b] = 1.0
            yield a, b, e


def conditional_expectation_check(m: CrossedProductModel, samples: int = 100, seed: int = 7,
                                  atol: Optional[float] = None) -> ChannelReport:
    """
    E is unital, idempotent, an N-bimodule map and completely positive;
    pi is multiplicative and preserves adjoints.
    """
    atol = 1e-10 if atol is None else atol
    errors = {name: 0.0 for name in ("unital", "idempotent", "bimodule", "pi_multiplicative",
                                     "pi_adjoint", "complete_positivity", "twirl_consistency")}
    errors["unital"] = _maxabs(m.expectation(m.identity()) - m.identity())

    for rng in _rngs(seed, samples):
        x, y = m.random_element(rng), m.random_element(rng)
        a = rng.standard_normal((m.d, m.d)) + 1j * rng.standard_normal((m.d, m.d))
        b = rng.standard_normal((m.d, m.d)) + 1j * rng.standard_normal((m.d, m.d))
        ex = m.expectation(x)
        errors["idempotent"] = max(errors["idempotent"], _maxabs(m.expectation(ex) - ex))
        left = m.expectation(m.multiply(m.multiply(m.embed(a), x), m.embed(b)))
        right = m.multiply(m.multiply(m.embed(a), ex), m.embed(b))
        errors["bimodule"] = max(errors["bimodule"], _maxabs(left - right))
        errors["pi_multiplicative"] = max(errors["pi_multiplicative"],
                                          _maxabs(m.pi(m.multiply(x, y)) - m.pi(x) @ m.pi(y)))
        errors["pi_adjoint"] = max(errors["pi_adjoint"],
                                   _maxabs(m.pi(m.adjoint(x)) - m.pi(x).conj().T))

    # Choi matrix of E on the algebra M = M_d (x) M_2 (times an identity).
    size = 2 * m.d
    rest = np.eye(m.k // 2, dtype=complex)
    choi = np.zeros((size * m.d, size * m.d), dtype=complex)
    for _, _, e in _matrix_units(size):
        image = m.expectation(m.decompose(np.kron(e, rest)))[0]
        choi += np.kron(e, image)
    choi_min = float(spl.eigvalsh(choi)[0])
    errors["complete_positivity"] = max(0.0, -choi_min)
    errors["twirl_consistency"] = twirl_check(m, samples=min(samples, 50), seed=seed).errors["implements"]

    report = ChannelReport("conditional_expectation", errors, {name: atol for name in errors},
                           {"choi_min_eig": choi_min, "samples": samples})
    logger.info("conditional expectation check: %s", "ok" if report.passed else report.violations)
    return report


def twirl(m: CrossedProductModel, a: np.ndarray) -> np.ndarray:
    """E_1(A) = 1/4 sum_g V_g A V_g^* on H."""
    return sum(v @ a @ v.conj().T for v in m.transporters) / 4.0


def twirl_check(m: CrossedProductModel, samples: int = 100, seed: int = 7,
                atol: Optional[float] = None) -> ChannelReport:
    """E_1 is a unital idempotent map onto the fixed points, implemented by P_0."""
    atol = 1e-10 if atol is None else atol
    eye_k = np.eye(m.k, dtype=complex)
    p0 = m.to_matrix(np.stack([np.eye(m.d) / 4.0] * 4))
    errors = {
        "projection": _maxabs(p0 @ p0 - p0) + _maxabs(p0 - p0.conj().T),
        "unital": _maxabs(twirl(m, np.eye(m.dim)) - np.eye(m.dim)),
        "idempotent": 0.0,
        "implements": 0.0,
    }
    for rng in _rngs(seed, samples):
        a = np.kron(rng.standard_normal((m.d, m.d)) + 1j * rng.standard_normal((m.d, m.d)), eye_k)
        t = twirl(m, a)
        errors["idempotent"] = max(errors["idempotent"], _maxabs(twirl(m, t) - t))
        errors["implements"] = max(errors["implements"], _maxabs(t @ p0 - p0 @ a @ p0))

    images = [sum(m.u[g] @ e @ m.u[g].conj().T for g in range(4)).reshape(-1) / 4.0
              for _, _, e in _matrix_units(m.d)]
    fixed_dim = int(np.linalg.matrix_rank(np.array(images), tol=1e-9))
    return ChannelReport("twirl", errors, {name: atol for name in errors},
                         {"fixed_point_dim": fixed_dim, "p0_rank": int(round(np.trace(p0).real))})


def dual_action_check(m: CrossedProductModel, samples: int = 100, seed: int = 7,
                      atol: Optional[float] = None) -> ChannelReport:
    """
    E extends to all of B(H) as 1/4 sum_chi W_chi (.) W_chi^*, with W_chi
    the Paulis on the multiplicity qubit; W_chi V_g W_chi^* = chi(g) V_g.
    """
    atol = 1e-10 if atol is None else atol
    rest = np.eye(m.k // 2, dtype=complex)
    paulis = (_I2, _PX, _PZ, _PX @ _PZ)
    unitaries = [np.kron(np.eye(m.d), np.kron(p, rest)) for p in paulis]

    def phi(y: np.ndarray) -> np.ndarray:
        return sum(w @ y @ w.conj().T for w in unitaries) / 4.0

    errors = {"extends": 0.0, "covariance": 0.0}
    for w in unitaries:
        for g, v in enumerate(m.transporters):
            moved = w @ v @ w.conj().T
            sign = 1.0 if np.real(np.vdot(v, moved)) >= 0 else -1.0
            errors["covariance"] = max(errors["covariance"], _maxabs(moved - sign * v))
    for rng in _rngs(seed, samples):
        x = m.random_element(rng)
        errors["extends"] = max(errors["extends"],
                                _maxabs(phi(m.to_matrix(x)) - m.to_matrix(m.expectation(x))))

    values: Dict[str, object] = {"choi_checked": False}
    if m.represented_dim <= 32:
        choi = sum(np.kron(e, phi(e)) for _, _, e in _matrix_units(m.dim))
        choi_min = float(spl.eigvalsh(choi)[0])
        errors["choi"] = max(0.0, -choi_min)
        values.update({"choi_checked": True, "choi_min_eig": choi_min})
    return ChannelReport("dual_action", errors, {name: atol for name in errors}, values)


def schrodinger_check(m: CrossedProductModel, samples: int = 100, seed: int = 7,
                      phase: float = math.pi / 3, atol: Optional[float] = None) -> ChannelReport:
    """
    The code vectors pi(V_g) V psi give states that E_* leaves invariant;
    for a superposition of two of them E_* keeps only the diagonal part.
    """
    atol = 1e-10 if atol is None else atol
    rngs = _rngs(seed, samples + 1)
    psi = rngs[0].standard_normal(m.dim) + 1j * rngs[0].standard_normal(m.dim)
    psi /= np.linalg.norm(psi)
    codes = [m.pi(m.transporter(g)) @ m.isometry @ psi for g in range(4)]
    mixed = (codes[0] + np.exp(1j * phase) * codes[1]) / math.sqrt(2.0)

    errors = {
        "orthogonality": max(abs(np.vdot(codes[i], codes[j]))
                             for i, j in itertools.combinations(range(4), 2)),
        "invariance": 0.0,
        "erasure": 0.0,
    }
    visible = 0.0
    for rng in rngs[1:]:
        x = m.random_element(rng)
        px, pex = m.pi(x), m.pi(m.expectation(x))
        for c in codes:
            errors["invariance"] = max(errors["invariance"],
                                       abs(np.vdot(c, px @ c) - np.vdot(c, pex @ c)))
        diagonal = 0.5 * (np.vdot(codes[0], px @ codes[0]) + np.vdot(codes[1], px @ codes[1]))
        errors["erasure"] = max(errors["erasure"], abs(np.vdot(mixed, pex @ mixed) - diagonal))
        visible = max(visible, abs(np.vdot(mixed, px @ mixed) - np.vdot(mixed, pex @ mixed)))
    return ChannelReport("schrodinger", errors, {name: atol for name in errors},
                         {"coherence_visible": float(visible), "phase": phase})


def _parallel_map(fn: Callable, items: Sequence, threads: Optional[int]) -> List:
    workers = max(1, min(threads or default_workers(), len(items) or 1))
    if workers == 1:
        return [fn(item) for item in items]
    results: Dict[int, object] = {}
    executor = ThreadPoolExecutor(max_workers=workers)
    try:
        futures = {executor.submit(fn, item): i for i, item in enumerate(items)}
        for future in as_completed(futures):
            i = futures[future]
            try:
                results[i] = future.result()
            except Exception:
                logger.exception("sample %d failed", i)
                raise
    finally:
        executor.shutdown(wait=True)
    return [results[i] for i in range(len(items))]


def _best_lambda(ex: np.ndarray, x: np.ndarray) -> Optional[float]:
    """Largest lambda with E(X) >= lambda X, or None when E(X) is singular."""
    lam, vecs = spl.eigh(ex)
    if lam[0] < 1e-12:
        return None
    inv_sqrt = (vecs / np.sqrt(lam)) @ vecs.conj().T
    top = float(spl.eigvalsh(inv_sqrt @ x @ inv_sqrt)[-1])
    return 1.0 / top if top > 0 else None


def pimsner_popa_check(m: CrossedProductModel, samples: int = 1000, seed: int = 7,
                       atol: float = 1e-9, strict_atol: Optional[float] = None,
                       threads: Optional[int] = None) -> ChannelReport:
    """
    E(X) >= X/4 on sampled positive X; the witness X = P_0 has E(P_0) = I/4,
    so no larger constant works and the index is 4.
    """
    strict_atol = ToleranceConfig.from_env().strict_atol if strict_atol is None else strict_atol
    bound = 1.0 / 4.0

    def sample(rng: np.random.Generator) -> Tuple[float, Optional[float]]:
        x = m.random_positive(rng)
        xm = m.to_matrix(x)
        scale = float(spl.eigvalsh(0.5 * (xm + xm.conj().T))[-1])
        xm = xm / scale
        exm = m.to_matrix(m.expectation(x)) / scale
        gap = float(spl.eigvalsh(exm - bound * xm)[0])
        return gap, _best_lambda(exm, xm)

    results = _parallel_map(sample, _rngs(seed, samples), threads)
    min_gap = min((g for g, _ in results), default=0.0)

    eye = np.eye(m.dim, dtype=complex)
    identity_gap = float(spl.eigvalsh(m.to_matrix(m.expectation(m.identity())) - bound * eye)[0])
    p0 = np.stack([np.eye(m.d) / 4.0] * 4)
    p0m, ep0m = m.to_matrix(p0), m.to_matrix(m.expectation(p0))
    witness_gap = float(spl.eigvalsh(ep0m - bound * p0m)[0])
    lambdas = [lam for _, lam in results if lam is not None]
    witness_lambda = _best_lambda(ep0m, p0m)
    if witness_lambda is not None:
        lambdas.append(witness_lambda)
    best = min(lambdas) if lambdas else None

    errors = {
        "sample_violation": max(0.0, -min_gap),
        "witness_error": _maxabs(ep0m - bound * eye),
        "witness_tightness": abs(witness_gap),
    }
    tolerances = {"sample_violation": atol, "witness_error": strict_atol, "witness_tightness": strict_atol}
    values = {
        "samples": samples,
        "min_sample_eig": min_gap,
        "identity_min_eig": identity_gap,
        "witness_min_eig": witness_gap,
        "best_lambda": best,
        "index": (1.0 / best) if best else None,
    }
    report = ChannelReport("pimsner_popa", errors, tolerances, values)
    logger.info("pimsner-popa: best lambda %s over %d samples", best, samples)
    return report


def stinespring_verify(m: CrossedProductModel, samples: int = 100, seed: int = 7,
                       atol: Optional[float] = None) -> ChannelReport:
    """
    (pi, V, H_S) dilates E; R(N) = diag(N, N, N, N) lands in pi(M)' and
    V^* R(N) V = N for N commuting with N and the transporters.
    """
    atol = ToleranceConfig.from_env().strict_atol if atol is None else atol
    v = m.isometry
    errors = {
        "isometry": _maxabs(v.conj().T @ v - np.eye(m.dim)),
        "representation": max(_maxabs(m.transporters[g] @ m.transporters[h] - m.transporters[g ^ h])
                              for g in range(4) for h in range(4)),
        "dilation": 0.0,
        "correction_commutes": 0.0,
        "correction_inverse": 0.0,
    }
    half = m.k // 2
    for rng in _rngs(seed, samples):
        x = m.random_element(rng)
        px = m.pi(x)
        errors["dilation"] = max(errors["dilation"],
                                 _maxabs(v.conj().T @ px @ v - m.to_matrix(m.expectation(x))))
        g = rng.standard_normal((half, half)) + 1j * rng.standard_normal((half, half))
        n_op = np.kron(np.eye(2 * m.d), g)
        r_op = np.kron(np.eye(4), n_op)
        errors["correction_commutes"] = max(errors["correction_commutes"], _maxabs(r_op @ px - px @ r_op))
        errors["correction_inverse"] = max(errors["correction_inverse"],
                                           _maxabs(v.conj().T @ r_op @ v - n_op))

    columns = []
    for g in range(4):
        for _, _, e in _matrix_units(m.d):
            x = np.zeros((4, m.d, m.d), dtype=complex)
            x[g] = e
            columns.append(m.pi(x) @ v)
    dilation_rank = int(np.linalg.matrix_rank(np.hstack(columns), tol=1e-9))
    errors["minimality"] = float(m.represented_dim - dilation_rank)

    values = {"dilation_rank": dilation_rank, "commutant_dim": half * half,
              "trivial_commutant": half == 1}
    return ChannelReport("stinespring", errors, {name: atol for name in errors}, values)


# ============================================================================
# Entropy gain
# ============================================================================

def _tau_entropy(rho: np.ndarray, cutoff: float) -> float:
    """-tau(rho log rho) for a tau-density on the represented space."""
    lam = spl.eigvalsh(0.5 * (rho + rho.conj().T))
    lam = lam[lam > cutoff]
    return float(-np.sum(lam * np.log(lam))) / rho.shape[0]


def _validate_povm(m: CrossedProductModel, povm: Sequence[np.ndarray], atol: float) -> None:
    if not povm:
        raise InputError("empty POVM")
    total = sum(m.element(x) for x in povm)
    if _maxabs(total - m.identity()) > atol:
        raise InputError("POVM elements do not sum to the identity")
    for i, x in enumerate(povm):
        px = m.pi(x)
        if float(spl.eigvalsh(0.5 * (px + px.conj().T))[0]) < -atol:
            raise InputError(f"POVM element {i} is not positive")


def _gain(m: CrossedProductModel, povm: Sequence[np.ndarray], cutoff: float) -> Tuple[float, float]:
    """Entropy gain in nats and the worst tau-preservation error."""
    total, tau_error = 0.0, 0.0
    for x in povm:
        px = m.pi(x)
        pex = m.pi(m.expectation(x))
        t = float(np.trace(px).real) / m.represented_dim
        tau_error = max(tau_error, abs(float(np.trace(pex).real) / m.represented_dim - t))
        if t <= cutoff:
            continue
        total += t * (_tau_entropy(pex / t, cutoff) - _tau_entropy(px / t, cutoff))
    return total, tau_error


def entropy_gain(m: CrossedProductModel, povm: Sequence[np.ndarray],
                 atol: float = 1e-9) -> float:
    """sum_i tau(x_i) [S(E(rho_i)) - S(rho_i)] in nats, rho_i = x_i / tau(x_i)."""
    _validate_povm(m, povm, atol)
    return _gain(m, povm, ToleranceConfig.from_env().eig_cutoff)[0]


def _povm_from(m: CrossedProductModel, generators: Sequence[np.ndarray]) -> List[np.ndarray]:
    """x_i = T^-1/2 Y_i^* Y_i T^-1/2 with T = sum_i Y_i^* Y_i."""
    squares = [m.multiply(m.adjoint(y), y) for y in generators]
    t = m.to_matrix(sum(squares))
    lam, vecs = spl.eigh(0.5 * (t + t.conj().T))
    root = m.decompose((vecs / np.sqrt(np.clip(lam, 1e-15, None))) @ vecs.conj().T)
    return [m.multiply(m.multiply(root, s), root) for s in squares]


@dataclass
class EntropyGainReport:
    mode: str
    value: float
    bound: float
    evaluations: int
    max_value: float
    exceedances: int
    tau_error: float
    optimum: Optional[float] = None
    two_outcome: Optional[float] = None
    atol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.exceedances == 0 and self.tau_error <= 1e-12

    def to_dict(self) -> Dict[str, object]:
        ln2 = math.log(2.0)
        return {
            "mode": self.mode,
            "value_nats": self.value,
            "value_bits": self.value / ln2,
            "bound_nats": self.bound,
            "evaluations": self.evaluations,
            "max_value_nats": self.max_value,
            "exceedances": self.exceedances,
            "tau_error": self.tau_error,
            "optimum_nats": self.optimum,
            "two_outcome_nats": self.two_outcome,
            "passed": self.passed,
        }


def entropy_gain_search(m: CrossedProductModel, povm: Optional[Sequence[np.ndarray]] = None,
                        random_povms: Optional[int] = None, restarts: Optional[int] = None,
                        steps: Optional[int] = None, seed: int = 7,
                        atol: float = 1e-9) -> EntropyGainReport:
    """
    Evaluate one POVM, or search: the character projections, {P_0, 1 - P_0},
    random POVMs, then random restarts with local ascent. Every value is
    compared with log 4.
    """
    cutoff = ToleranceConfig.from_env().eig_cutoff
    bound = math.log(4.0)
    seen: List[float] = []
    tau_error = 0.0

    def evaluate(elements: Sequence[np.ndarray]) -> float:
        nonlocal tau_error
        value, err = _gain(m, elements, cutoff)
        tau_error = max(tau_error, err)
        seen.append(value)
        return value

    if povm is not None:
        _validate_povm(m, povm, atol)
        value = evaluate(povm)
        report = EntropyGainReport("povm", value, bound, 1, value, int(value > bound + atol), tau_error,
                                   atol=atol)
        logger.info("entropy gain %.9f nats (bound %.9f)", value, bound)
        return report

    solver = SolverConfig.from_env()
    random_povms = solver.random_povms if random_povms is None else random_povms
    restarts = solver.search_restarts if restarts is None else restarts
    steps = solver.search_steps if steps is None else steps

    optimum = evaluate(list(m.character_projections().values()))
    p0 = np.stack([np.eye(m.d) / 4.0] * 4)
    two_outcome = evaluate([p0, m.identity() - p0])

    rngs = _rngs(seed, random_povms + restarts)
    for rng in rngs[:random_povms]:
        size = int(rng.integers(2, 5))
        evaluate(_povm_from(m, [m.random_element(rng) for _ in range(size)]))

    for rng in rngs[random_povms:]:
        size = int(rng.integers(2, 5))
        gens = [m.random_element(rng) for _ in range(size)]
        best = evaluate(_povm_from(m, gens))
        step = 0.3
        for _ in range(steps):
            trial = [y + step * m.random_element(rng) for y in gens]
            value = evaluate(_povm_from(m, trial))
            if value > best:
                gens, best = trial, value
            else:
                step *= 0.9

    top = max(seen)
    exceed = sum(1 for v in seen if v > bound + atol)
    report = EntropyGainReport("search", top, bound, len(seen), top, exceed, tau_error,
                               optimum=optimum, two_outcome=two_outcome, atol=atol)
    if exceed:
        logger.warning("%d POVMs exceeded log 4", exceed)
    logger.info("entropy gain search: best %.9f nats over %d POVMs", top, len(seen))
    return report


# ============================================================================
# Max-entropy states
# ============================================================================

Constraint = Tuple[Tuple[int, ...], DensityMatrix]


@dataclass
class MaxEntropyReport:
    k: Optional[int]
    state: DensityMatrix
    residual: float
    iterations: int
    entropies: Dict[str, float]
    correlation: Optional[float] = None
    local_checks: int = 0
    local_violations: int = 0
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        ln2 = math.log(2.0)
        out: Dict[str, object] = {
            "k": self.k,
            "residual": self.residual,
            "iterations": self.iterations,
            "entropies_bits": dict(self.entropies),
            "entropies_nats": {key: value * ln2 for key, value in self.entropies.items()},
            "local_checks": self.local_checks,
            "local_violations": self.local_violations,
            "flags": list(self.flags),
        }
        if self.correlation is not None:
            out["correlation_bits"] = self.correlation
            out["correlation_nats"] = self.correlation * ln2
            out["sign_convention"] = "S(k-1) - S(k)"
        return out


def _support_projector(rho: np.ndarray, cutoff: float) -> Tuple[np.ndarray, np.ndarray]:
    lam, vecs = spl.eigh(rho)
    keep = lam > cutoff
    proj = vecs[:, keep] @ vecs[:, keep].conj().T
    logs = (vecs[:, keep] * np.log(lam[keep])) @ vecs[:, keep].conj().T
    return proj, logs


def _gibbs(h: np.ndarray) -> np.ndarray:
    lam, vecs = spl.eigh(0.5 * (h + h.conj().T))
    weights = np.exp(lam - lam.max())
    weights /= weights.sum()
    return (vecs * weights) @ vecs.conj().T


def _normalize_constraints(constraints: Sequence, n: int) -> List[Constraint]:
    out: List[Constraint] = []
    for region, rho in constraints:
        qs = tuple(_qubits(region, n))
        rho = _as_density(rho)
        if rho.dim != 1 << len(qs):
            raise InputError(f"marginal of dimension {rho.dim} for {len(qs)} qubits")
        out.append((qs, rho))
    for (qa, ra), (qb, rb) in itertools.combinations(out, 2):
        common = sorted(set(qa) & set(qb))
        if not common:
            continue
        pos_a = [qa.index(q) for q in common]
        pos_b = [qb.index(q) for q in common]
        da = _reduce(ra.matrix, pos_a, len(qa))
        db = _reduce(rb.matrix, pos_b, len(qb))
        if trace_distance(da, db) > 1e-8:
            raise InputError(f"marginals on {qa} and {qb} disagree on qubits {common}")
    return out


def marginal_constraints(rho, n: int, k: int) -> List[Constraint]:
    """All k-body marginals of rho."""
    return [(qs, partial_trace(rho, qs, n)) for qs in itertools.combinations(range(n), k)]


def _local_optimality(sigma: np.ndarray, regions: Sequence[Tuple[int, ...]], n: int,
                      rng: np.random.Generator, samples: int) -> Tuple[int, int]:
    """Feasible perturbations (all constrained marginals zero) never raise the entropy."""
    lam_min = float(spl.eigvalsh(sigma)[0])
    if lam_min < 1e-9:
        return 0, 0
    base = vn_entropy(sigma, "e")
    dim = 1 << n
    checks = violations = 0
    for _ in range(samples):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        delta = 0.5 * (g + g.conj().T)
        # The partial-trace projections commute, so one sweep suffices.
        for qs in regions:
            rest = n - len(qs)
            delta = delta - embed_operator(_reduce(delta, list(qs), n) / (1 << rest), qs, n)
        delta -= np.trace(delta) * np.eye(dim) / dim
        size = float(np.max(np.abs(spl.eigvalsh(delta))))
        if size < 1e-12:
            continue
        eps = 0.5 * lam_min / size
        checks += 1
        if vn_entropy(sigma + eps * delta, "e") > base + 1e-10:
            violations += 1
    return checks, violations


def max_entropy_state(constraints: Sequence, n_qubits: int, tolerance: Optional[float] = None,
                      damping: Optional[float] = None, max_iter: Optional[int] = None,
                      local_samples: int = 8, seed: int = 7) -> MaxEntropyReport:
    """
    The state of largest entropy with the given marginals.

    Works in the Gibbs family exp(sum_R h_R (x) 1) restricted to the common
    support of the marginals, updating one region at a time with
    h_R += damping * (log rho_R - log sigma_R).
    """
    solver = SolverConfig.from_env()
    tolerance = solver.tolerance if tolerance is None else tolerance
    damping = solver.damping if damping is None else damping
    max_iter = solver.max_iter if max_iter is None else max_iter
    cutoff = ToleranceConfig.from_env().eig_cutoff
    n = int(n_qubits)
    if n > MAX_SOLVER_QUBITS:
        raise CapabilityError(f"max-entropy solver handles at most {MAX_SOLVER_QUBITS} qubits, got {n}")
    dim = 1 << n
    cons = _normalize_constraints(constraints, n)
    if not cons:
        state = DensityMatrix.maximally_mixed(dim)
        return MaxEntropyReport(None, state, 0.0, 0, {"solution": float(n)})

    supports, target_logs = zip(*[_support_projector(rho.matrix, cutoff) for _, rho in cons])
    outside = sum(embed_operator(np.eye(p.shape[0]) - p, qs, n) for (qs, _), p in zip(cons, supports))
    lam, vecs = spl.eigh(outside)
    w = vecs[:, lam < 1e-9]
    if w.shape[1] == 0:
        raise InputError("marginals admit no common support")

    fields = [np.zeros((1 << len(qs),) * 2, dtype=complex) for qs, _ in cons]

    def assemble() -> np.ndarray:
        h = sum(embed_operator(f, qs, n) for f, (qs, _) in zip(fields, cons))
        g = _gibbs(w.conj().T @ h @ w)
        return w @ g @ w.conj().T

    def residual_of(sigma: np.ndarray) -> float:
        return max(2.0 * trace_distance(_reduce(sigma, list(qs), n), rho.matrix) for qs, rho in cons)

    sigma = assemble()
    iterations = 0
    residual = residual_of(sigma)
    while residual > tolerance:
        if iterations >= max_iter:
            raise ConvergenceError("max-entropy iteration did not converge", residual, iterations,
                                   state=sigma)
        for i, (qs, _) in enumerate(cons):
            marginal = _reduce(sigma, list(qs), n)
            lam_s, vec_s = spl.eigh(0.5 * (marginal + marginal.conj().T))
            log_s = (vec_s * np.log(np.clip(lam_s, 1e-300, None))) @ vec_s.conj().T
            fields[i] = fields[i] + damping * supports[i] @ (target_logs[i] - log_s) @ supports[i]
            sigma = assemble()
        iterations += 1
        residual = residual_of(sigma)

    state = DensityMatrix(sigma)
    checks, bad = _local_optimality(sigma, [qs for qs, _ in cons], n,
                                    np.random.default_rng(seed), local_samples)
    flags = ["local-optimality-violated"] if bad else []
    if checks == 0:
        flags.append("local-check-skipped")
    logger.debug("max-entropy: %d constraints, %d iterations, residual %.2e", len(cons), iterations, residual)
    return MaxEntropyReport(None, state, residual, iterations, {"solution": vn_entropy(state)},
                            local_checks=checks, local_violations=bad, flags=flags)


def irreducible_correlation(rho, k: int, n: Optional[int] = None, tolerance: Optional[float] = None,
                            seed: int = 7) -> MaxEntropyReport:
    """
    C^(k) = S(rho~(k-1)) - S(rho~(k)) in bits, rho~(l) being the max-entropy
    state with rho's l-body marginals. Non-negative.
    """
    rho = _as_density(rho)
    n = rho.n_qubits if n is None else int(n)
    if n != rho.n_qubits:
        raise InputError(f"state has {rho.n_qubits} qubits, caller said {n}")
    if not 1 <= k <= n:
        raise InputError(f"k must lie in 1..{n}, got {k}")

    def solve_level(level: int) -> MaxEntropyReport:
        if level == n:
            return MaxEntropyReport(level, rho, 0.0, 0, {"solution": vn_entropy(rho)})
        if level == 0:
            mixed = DensityMatrix.maximally_mixed(1 << n)
            return MaxEntropyReport(level, mixed, 0.0, 0, {"solution": float(n)})
        return max_entropy_state(marginal_constraints(rho, n, level), n, tolerance, seed=seed)

    upper = solve_level(k)
    lower = solve_level(k - 1)
    s_input = vn_entropy(rho)
    s_upper = upper.entropies["solution"]
    s_lower = lower.entropies["solution"]
    flags = sorted(set(upper.flags) | set(lower.flags))
    if s_lower < s_upper - 1e-9 or s_upper < s_input - 1e-9:
        flags.append("entropy-not-monotone")
    report = MaxEntropyReport(
        k, upper.state, max(upper.residual, lower.residual), upper.iterations + lower.iterations,
        {"input": s_input, f"order_{k - 1}": s_lower, f"order_{k}": s_upper},
        correlation=max(0.0, s_lower - s_upper),
        local_checks=upper.local_checks + lower.local_checks,
        local_violations=upper.local_violations + lower.local_violations,
        flags=flags,
    )
    logger.info("irreducible correlation C(%d) = %.9f bits", k, report.correlation)
    return report


NAMED_STATES = ("even-parity", "product", "bell", "ghz")


def named_state(name: str, n: Optional[int] = None) -> DensityMatrix:
    """
    Small reference states for correlation runs:
    even-parity (uniform mixture of even-weight bit strings, n >= 2),
    product (|0...0>), bell (2 qubits), ghz (n >= 2).
    """
    key = name.strip().lower()
    if key == "bell":
        n = 2 if n is None else n
        if n != 2:
            raise InputError(f"the bell state has 2 qubits, not {n}")
    n = 3 if n is None else int(n)
    if not 1 <= n <= MAX_SOLVER_QUBITS:
        raise InputError(f"named states take 1..{MAX_SOLVER_QUBITS} qubits, got {n}")
    dim = 1 << n
    if key == "even-parity":
        if n < 2:
            raise InputError("the even-parity state needs at least 2 qubits")
        even = np.array([bin(b).count("1") % 2 == 0 for b in range(dim)], dtype=float)
        return DensityMatrix(np.diag(even / even.sum()).astype(complex))
    if key == "product":
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        return DensityMatrix.from_vector(vec)
    if key in ("bell", "ghz"):
        vec = np.zeros(dim, dtype=complex)
        vec[0] = vec[-1] = 1.0 / math.sqrt(2.0)
        return DensityMatrix.from_vector(vec)
    raise InputError(f"unknown state {name!r}; choose from {', '.join(NAMED_STATES)}")
