# secretshare.py

"""
Classical secret sharing with anyonic charges.

Alice holds region A, Bob region B, Eve the rest (E). The dealer picks
one of four charge classes {0, X, Z, Y} and applies the matching
transporter, a string operator with one end in each blob. The module
checks the three properties that make this a secret-sharing code and
counts how many classes Alice and Bob can tell apart:

- unauthorized: no operator Eve can measure (bounded support inside E)
  distinguishes the code states or connects two of them
- authorized: Alice's Wilson loops read the charge class
- index: Eve-invisible Pauli classes modulo stabilizers and local
  operators on A and B, graded by their charge in A

Transporter dictionary: V_Z is a Z string along lattice edges (star
defects, charge e), V_X an X string along dual edges (plaquette
defects, flux m), V_Y = V_X V_Z.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import VerificationConfig, default_workers
from errors import InputError, LayoutError
from gf2core import BitMatrix, rank
from lattice import (
    Lattice,
    LayoutKind,
    Region,
    RegionLayout,
    plaquette_loop,
    star_loop,
    support_diameter,
    vertex_box,
)
from metrics import CheckLedger, CheckSample
from stabilizer import (
    PauliOperator,
    RibbonPath,
    StabilizerState,
    coset_support_feasible,
    defects,
    direct_path,
    dual_path,
    expectation,
    inside_stabilizers,
    logical_count,
    random_pauli,
    ribbon_operator,
)

logger = logging.getLogger(__name__)

CHARGE_LABELS: Tuple[str, ...] = ("0", "X", "Z", "Y")

# (e, m) loop eigenvalues each class shows in either blob.
EXPECTED_SIGNATURES: Dict[str, Tuple[int, int]] = {
    "0": (1, 1),
    "Z": (-1, 1),
    "X": (1, -1),
    "Y": (-1, -1),
}


# ============================================================================
# Charge classes
# ============================================================================

@dataclass(frozen=True, eq=False)
class ChargeClass:
    """A charge label and the transporter that deals it."""

    label: str
    operator: PauliOperator
    paths: Tuple[RibbonPath, ...] = ()
    endpoints: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.label not in CHARGE_LABELS:
            raise InputError(f"unknown charge label {self.label!r}")


CodeState = Tuple[ChargeClass, StabilizerState]


def _require_two_blob(layout: RegionLayout) -> None:
    if layout.kind != LayoutKind.TWO_BLOB:
        raise InputError(f"secret sharing needs a two-blob layout, got {layout.kind.value}")


def _blob_centers(lat: Lattice, layout: RegionLayout) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    centers = layout.params["centers"]
    ca = lat.wrap(*centers[0])  # type: ignore[index]
    cb = lat.wrap(*centers[1])  # type: ignore[index]
    for name, c in (("A", ca), ("B", cb)):
        if c is None:
            raise LayoutError(f"blob {name} center is off the lattice")
        blob = layout[name]
        if not set(lat.star(c)) <= blob.edges:
            raise LayoutError(f"blob {name} does not hold the star at its center {c}")
        if not set(lat.plaquette(c)) <= blob.edges:
            raise LayoutError(f"blob {name} does not hold the plaquette at its center {c}")
    return ca, cb  # type: ignore[return-value]


def charge_transporters(lat: Lattice, layout: RegionLayout) -> Dict[str, ChargeClass]:
    """Representatives of the four classes, strings running from A's center to B's."""
    _require_two_blob(layout)
    ca, cb = _blob_centers(lat, layout)
    z_path = direct_path(lat, ca, cb)
    x_path = dual_path(lat, ca, cb)
    v_z = ribbon_operator(lat, z_path)
    v_x = ribbon_operator(lat, x_path)
    ends = {"A": list(ca), "B": list(cb)}
    return {
        "0": ChargeClass("0", PauliOperator.identity(lat.n_qubits), (), ends),
        "X": ChargeClass("X", v_x, (x_path,), ends),
        "Z": ChargeClass("Z", v_z, (z_path,), ends),
        "Y": ChargeClass("Y", v_x * v_z, (x_path, z_path), ends),
    }


def _check_defects(lat: Lattice, layout: RegionLayout, cc: ChargeClass) -> None:
    a, b = layout["A"].edges, layout["B"].edges
    stars, faces = defects(lat, cc.operator)
    for vx in stars:
        sup = set(lat.star(vx))
        if not (sup <= a or sup <= b):
            raise LayoutError(f"transporter {cc.label} leaves a charge at vertex {vx} in Eve's region")
    for f in faces:
        sup = set(lat.plaquette(f))
        if not (sup <= a or sup <= b):
            raise LayoutError(f"transporter {cc.label} leaves a flux at face {f} in Eve's region")


def build_code_states(state: StabilizerState, layout: RegionLayout,
                      min_separation: Optional[int] = None) -> List[CodeState]:
    """
    Omega and the three transported states, as stabilizer states of
    V_k Omega (generators anticommuting with V_k flip sign).
    """
    lat = state.lattice
    if lat is None:
        raise InputError("code states need a state that carries its lattice")
    _require_two_blob(layout)
    if min_separation is None:
        min_separation = VerificationConfig.from_env().min_separation
    if layout.separation is None or layout.separation < min_separation:
        raise LayoutError(f"blobs are {layout.separation} apart; code states need at least {min_separation}")

    classes = charge_transporters(lat, layout)
    out: List[CodeState] = []
    for label in CHARGE_LABELS:
        cc = classes[label]
        _check_defects(lat, layout, cc)
        psi = state if label == "0" else state.conjugated(cc.operator)
        out.append((cc, psi))
    logger.debug("built %d code states, V_Z weight %d, V_X weight %d",
                 len(out), classes["Z"].operator.weight, classes["X"].operator.weight)
    return out


# ============================================================================
# Wilson loops and authorized reads
# ============================================================================

def wilson_loops(lat: Lattice, region: Region) -> Dict[str, PauliOperator]:
    """
    Charge loop (product of stars lying inside the region) and flux loop
    (product of plaquettes lying inside it). Both are supported in the region.
    """
    inside_stars = [vx for vx, sup in zip(lat.vertices, lat.stars) if set(sup) <= region.edges]
    inside_faces = [f for f, sup in zip(lat.faces, lat.plaquettes) if set(sup) <= region.edges]
    if not inside_stars or not inside_faces:
        raise LayoutError(f"region {region.name} holds no closed star loop or no closed plaquette loop")
    n = lat.n_qubits
    return {
        "e": PauliOperator.from_support(n, x_edges=sorted(star_loop(lat, inside_stars))),
        "m": PauliOperator.from_support(n, z_edges=sorted(plaquette_loop(lat, inside_faces))),
    }


def encircling_loops(lat: Lattice, region: Region) -> Dict[str, PauliOperator]:
    """Smallest star and plaquette loops running just outside the region."""
    touched_faces = {f for q in region.edges for f in lat.edge_faces[q]}
    n = lat.n_qubits
    return {
        "e": PauliOperator.from_support(n, x_edges=sorted(star_loop(lat, lat.vertices_of(region.edges)))),
        "m": PauliOperator.from_support(n, z_edges=sorted(plaquette_loop(lat, touched_faces))),
    }


def encircling_diameter(lat: Lattice, region: Region) -> int:
    """Support diameter of the smaller of the two encircling loops."""
    loops = encircling_loops(lat, region)
    return min(support_diameter(lat, op.support()) for op in loops.values())


@dataclass
class AuthorizedReport:
    """Loop eigenvalues per code state, read in each blob."""

    signatures: Dict[str, Dict[str, Tuple[int, int]]]
    ledger: CheckLedger

    @property
    def distinct(self) -> int:
        return len({sig["A"] for sig in self.signatures.values()})

    @property
    def clean(self) -> bool:
        return not self.ledger.violations and self.distinct == len(self.signatures)

    def to_dict(self) -> Dict[str, object]:
        return {
            "signatures": {k: {side: list(v) for side, v in sig.items()}
                           for k, sig in self.signatures.items()},
            "distinct_signatures": self.distinct,
            "clean": self.clean,
            "checks": self.ledger.snapshot(),
        }


def verify_authorized(states: Sequence[CodeState], layout: RegionLayout) -> AuthorizedReport:
    """Wilson-loop signature of every code state in A and in B."""
    lat = states[0][1].lattice
    if lat is None:
        raise InputError("code states carry no lattice")
    loops = {side: wilson_loops(lat, layout[side]) for side in ("A", "B")}
    ledger = CheckLedger()
    signatures: Dict[str, Dict[str, Tuple[int, int]]] = {}
    for cc, psi in states:
        sig = {side: (expectation(psi, loops[side]["e"]), expectation(psi, loops[side]["m"]))
               for side in ("A", "B")}
        signatures[cc.label] = sig
        want = EXPECTED_SIGNATURES[cc.label]
        ledger.record(CheckSample(
            check="signature",
            probe="wilson",
            passed=sig["A"] == want and sig["B"] == sig["A"],
            classes=(cc.label,),
            detail=None if sig["A"] == want else f"A reads {sig['A']}, expected {want}",
        ))
    report = AuthorizedReport(signatures, ledger)
    logger.info("authorized read: %d distinct signatures", report.distinct)
    return report


# ============================================================================
# Eve's probes
# ============================================================================

@dataclass
class EveProbeFamily:
    """
    Regions inside E on which Eve may measure anything, plus individual
    Pauli probes (sampled, or supplied by the caller).
    """

    dmax: int
    boxes: List[Region] = field(default_factory=list)
    sampled: List[Tuple[str, PauliOperator]] = field(default_factory=list)
    extra: List[Tuple[str, PauliOperator]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.boxes) + len(self.sampled) + len(self.extra)


def _box_regions(lat: Lattice, eve: Region, d: int) -> List[Region]:
    d = max(1, min(d, lat.L - 1 if lat.is_torus else lat.L))
    span = lat.L if lat.is_torus else lat.L - d + 1
    seen = set()
    regions: List[Region] = []
    for i in range(span):
        for j in range(span):
            edges = vertex_box(lat, i, j, d, d).edges & eve.edges
            if not edges or edges in seen:
                continue
            seen.add(edges)
            regions.append(Region(edges, f"box({i},{j})"))
    return regions


def build_probe_family(state: StabilizerState, layout: RegionLayout, dmax: int,
                       sampled: Optional[int] = None, seed: int = 7,
                       extra: Sequence[Tuple[str, PauliOperator]] = ()) -> EveProbeFamily:
    """
    Every d-max x d-max vertex box clipped to E, plus ``sampled`` random
    Paulis drawn inside those boxes. Extra probes are checked as given;
    their support must still lie in E.
    """
    lat = state.lattice
    if lat is None:
        raise InputError("probe family needs a state that carries its lattice")
    if dmax < 1:
        raise InputError(f"d-max must be at least 1, got {dmax}")
    eve = layout["E"]
    boxes = _box_regions(lat, eve, dmax)
    if sampled is None:
        sampled = VerificationConfig.from_env().sampled_probes

    probes: List[Tuple[str, PauliOperator]] = []
    if boxes and sampled > 0:
        children = np.random.SeedSequence(seed).spawn(sampled)
        for k, child in enumerate(children):
            rng = np.random.default_rng(child)
            box = boxes[int(rng.integers(0, len(boxes)))]
            probes.append((f"sample{k:04d}", random_pauli(state.n, box.edges, rng)))

    for name, op in extra:
        if not op.support() <= eve.edges:
            raise InputError(f"probe {name} acts outside Eve's region")
    return EveProbeFamily(dmax, boxes, probes, list(extra))


def _witness(p: PauliOperator) -> Dict[str, object]:
    return {
        "x_support": [int(q) for q in np.flatnonzero(p.x)],
        "z_support": [int(q) for q in np.flatnonzero(p.z)],
        "phase": p.phase,
        "weight": p.weight,
    }


def _check_region(ground: StabilizerState, ops: Dict[str, PauliOperator],
                  region: Region, ledger: CheckLedger) -> None:
    """Every operator Eve can build on the region, decided exactly."""
    basis = inside_stabilizers(ground, region)
    for label, v in ops.items():
        if label == "0":
            continue
        bad = next((s for s in basis if not s.commutes(v)), None)
        ledger.record(CheckSample(
            "diagonal", region.name, bad is None, (label,),
            witness=None if bad is None else _witness(bad),
        ))
    labels = list(ops)
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            q = ops[labels[a]] * ops[labels[b]]
            s = coset_support_feasible(ground, q, region)
            ledger.record(CheckSample(
                "off-diagonal", region.name, s is None, (labels[a], labels[b]),
                witness=None if s is None else _witness(q * s),
            ))


def _check_probe(states: Sequence[CodeState], name: str, p: PauliOperator,
                 ledger: CheckLedger) -> None:
    ground = states[0][1]
    base = expectation(ground, p)
    for cc, psi in states[1:]:
        value = expectation(psi, p)
        ledger.record(CheckSample(
            "diagonal", name, value == base, (cc.label,),
            witness=None if value == base else _witness(p),
            detail=None if value == base else f"<P> = {value} against {base} in the ground state",
        ))
    for a in range(len(states)):
        for b in range(a + 1, len(states)):
            va, vb = states[a][0].operator, states[b][0].operator
            connected = ground.decompose(va * p * vb) is not None
            ledger.record(CheckSample(
                "off-diagonal", name, not connected, (states[a][0].label, states[b][0].label),
                witness=_witness(p) if connected else None,
            ))


@dataclass
class UnauthorizedReport:
    dmax: int
    n_probes: int
    ledger: CheckLedger

    @property
    def violations(self) -> List[CheckSample]:
        return self.ledger.violations

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {"dmax": self.dmax, "n_probes": self.n_probes, "clean": self.clean,
                "checks": self.ledger.snapshot()}


def verify_unauthorized(states: Sequence[CodeState], probes: EveProbeFamily,
                        threads: Optional[int] = None) -> UnauthorizedReport:
    """
    Diagonal and transition conditions for every probe. Probe regions
    are independent and run on a thread pool; violations are recorded,
    never raised.
    """
    ground = states[0][1]
    ops = {cc.label: cc.operator for cc, _ in states}
    ledger = CheckLedger()
    tasks = [("region", r.name, r) for r in probes.boxes]
    tasks += [("pauli", name, p) for name, p in probes.sampled + probes.extra]
    workers = max(1, min(threads or default_workers(), len(tasks) or 1))

    def run(task) -> None:
        kind, _, payload = task
        if kind == "region":
            _check_region(ground, ops, payload, ledger)
        else:
            _check_probe(states, task[1], payload, ledger)

    executor = ThreadPoolExecutor(max_workers=workers)
    try:
        futures = {executor.submit(run, t): t[1] for t in tasks}
        for future in as_completed(futures):
            try:
                future.result()
            except Exception:
                logger.exception("probe %s failed", futures[future])
                raise
    finally:
        executor.shutdown(wait=True)

    report = UnauthorizedReport(probes.dmax, probes.size, ledger)
    logger.info("unauthorized check: %d probes, %d checks, %d violations",
                probes.size, ledger.total, len(report.violations))
    return report


# ============================================================================
# Index
# ============================================================================

@dataclass
class CodeSpaceReport:
    """Dimensions of the Eve-invisible class space and its charge grading."""

    raw_bits: int
    charge_bits: int
    kernel_bits: int
    invisible_dim: int
    local_dim: int
    logical_count: int
    dmax: Optional[int]
    encircling: int
    separation: Optional[int]
    signatures: int

    @property
    def index(self) -> int:
        return 2 ** self.charge_bits

    @property
    def log_index_bits(self) -> float:
        return float(self.charge_bits)

    @property
    def log_index_nats(self) -> float:
        return self.charge_bits * math.log(2.0)

    @property
    def degeneracy(self) -> int:
        return 2 ** self.logical_count

    def to_dict(self) -> Dict[str, object]:
        return {
            "index": self.index,
            "charge_bits": self.charge_bits,
            "kernel_bits": self.kernel_bits,
            "raw_bits": self.raw_bits,
            "log_index_bits": self.log_index_bits,
            "log_index_nats": self.log_index_nats,
            # log dim V-hat minus log dim V for the maximally mixed ensembles
            "entropy_difference_bits": float(self.raw_bits - self.kernel_bits),
            "invisible_dim": self.invisible_dim,
            "local_dim": self.local_dim,
            "logical_count": self.logical_count,
            "degeneracy": self.degeneracy,
            "dmax": self.dmax,
            "unrestricted": self.dmax is None,
            "encircling_diameter": self.encircling,
            "separation": self.separation,
            "distinct_signatures": self.signatures,
        }


def _commutation_rows(ops: Sequence[PauliOperator]) -> np.ndarray:
    """Rows r with r . symplectic(p) = sympl(op, p)."""
    if not ops:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.vstack([np.concatenate([op.z, op.x]) for op in ops]).astype(np.uint8)


def compute_index(state: StabilizerState, layout: RegionLayout,
                  dmax: Optional[int] = 3, threads: Optional[int] = None) -> CodeSpaceReport:
    """
    Index of the two-blob code space.

    Eve-invisible classes are Paulis commuting with every star and
    plaquette not contained in A or B. When Eve's probes reach the
    encircling diameter (or ``dmax`` is None, Eve unrestricted) they must
    also commute with every stabilizer element Eve can measure. Classes
    are taken modulo S times Paulis on A and B and graded by their charge
    in A; the index is the size of the grading's image.
    """
    lat = state.lattice
    if lat is None or not lat.is_torus:
        raise InputError("the index is computed on the torus")
    _require_two_blob(layout)
    a, b, eve = layout["A"], layout["B"], layout["E"]
    n = state.n

    e_centered: List[PauliOperator] = []
    for sup in lat.stars:
        if not (set(sup) <= a.edges or set(sup) <= b.edges):
            e_centered.append(PauliOperator.from_support(n, x_edges=sup))
    for sup in lat.plaquettes:
        if not (set(sup) <= a.edges or set(sup) <= b.edges):
            e_centered.append(PauliOperator.from_support(n, z_edges=sup))

    encircling = min(encircling_diameter(lat, a), encircling_diameter(lat, b))
    measurable: List[PauliOperator] = []
    if dmax is None:
        measurable = inside_stabilizers(state, eve)
    elif dmax >= encircling:
        boxes = _box_regions(lat, eve, dmax)
        workers = max(1, min(threads or default_workers(), len(boxes) or 1))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for basis in executor.map(lambda r: inside_stabilizers(state, r), boxes):
                measurable.extend(basis)
        logger.info("d-max %d reaches the encircling diameter %d; adding %d measurable stabilizers",
                    dmax, encircling, len(measurable))

    constraints = _commutation_rows(e_centered + measurable)
    m = BitMatrix(constraints.shape[0], 2 * n, constraints)
    rank_m = rank(m)
    invisible_dim = 2 * n - rank_m

    local_rows = [np.asarray(state.matrix.bits)]
    ab = sorted(a.edges | b.edges)
    single = np.zeros((2 * len(ab), 2 * n), dtype=np.uint8)
    for k, q in enumerate(ab):
        single[2 * k, q] = 1
        single[2 * k + 1, n + q] = 1
    local_rows.append(single)
    local = np.vstack(local_rows)
    rank_local = rank(BitMatrix(local.shape[0], 2 * n, local))
    # dim(G-hat & W) = rank(W) - rank(M W^T)
    mw = (constraints.astype(np.int64) @ local.T.astype(np.int64)) & 1
    local_dim = rank_local - rank(BitMatrix(mw.shape[0], mw.shape[1], mw.astype(np.uint8)))
    raw_bits = invisible_dim - local_dim

    loops = wilson_loops(lat, a)
    grading = _commutation_rows([loops["e"], loops["m"]])
    stacked = np.vstack([constraints, grading])
    charge_bits = rank(BitMatrix(stacked.shape[0], 2 * n, stacked)) - rank_m

    classes = charge_transporters(lat, layout)
    signatures = {(cc.operator.sympl(loops["e"]), cc.operator.sympl(loops["m"])) for cc in classes.values()}

    report = CodeSpaceReport(
        raw_bits=raw_bits,
        charge_bits=charge_bits,
        kernel_bits=raw_bits - charge_bits,
        invisible_dim=invisible_dim,
        local_dim=local_dim,
        logical_count=logical_count(lat),
        dmax=dmax,
        encircling=encircling,
        separation=layout.separation,
        signatures=len(signatures),
    )
    logger.info("index %d (charge %d bits, kernel %d bits)", report.index, charge_bits, report.kernel_bits)
    return report


# ============================================================================
# Superpositions
# ============================================================================

@dataclass
class SuperpositionReport:
    pair: Tuple[str, str]
    phases: Tuple[float, ...]
    n_operators: int
    max_deviation: float
    wilson_expectation: float
    atol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.atol

    def to_dict(self) -> Dict[str, object]:
        return {
            "pair": list(self.pair),
            "phases": list(self.phases),
            "n_operators": self.n_operators,
            "max_deviation": self.max_deviation,
            "wilson_expectation": self.wilson_expectation,
            "atol": self.atol,
            "passed": self.passed,
        }


def superposition_check(states: Sequence[CodeState], layout: RegionLayout,
                        samples: Optional[int] = None,
                        phases: Sequence[float] = (0.0, math.pi / 2, math.pi),
                        pair: Tuple[str, str] = ("0", "Z"),
                        seed: int = 7, atol: float = 1e-9) -> SuperpositionReport:
    """
    Alice cannot see the relative phase of a superposition of two code
    states: for A supported in her blob, <psi|A|psi> is the average of the
    two diagonal values. Runs on the dense backend.
    """
    import denseq

    ground = states[0][1]
    lat = ground.lattice
    if lat is None:
        raise InputError("code states carry no lattice")
    if samples is None:
        samples = VerificationConfig.from_env().superposition_samples
    by_label = {cc.label: cc for cc, _ in states}
    try:
        first, second = by_label[pair[0]], by_label[pair[1]]
    except KeyError as exc:
        raise InputError(f"unknown charge label in pair {pair}") from exc

    omega = denseq.stabilizer_statevector(ground)
    psi_i = denseq.apply_pauli(omega, first.operator)
    psi_j = denseq.apply_pauli(omega, second.operator)

    alice = layout["A"]
    loops = wilson_loops(lat, alice)
    operators: List[PauliOperator] = [PauliOperator.identity(ground.n), loops["e"], loops["m"]]
    for child in np.random.SeedSequence(seed).spawn(samples):
        operators.append(random_pauli(ground.n, alice.edges, np.random.default_rng(child)))

    worst = 0.0
    for p in operators:
        a_i = denseq.pauli_expectation(psi_i, p)
        a_j = denseq.pauli_expectation(psi_j, p)
        for phi in phases:
            psi = (psi_i + np.exp(1j * phi) * psi_j) / math.sqrt(2.0)
            value = denseq.pauli_expectation(psi, p)
            worst = max(worst, abs(value - 0.5 * a_i - 0.5 * a_j))

    # The loop separating the pair.
    distinguishing = loops["e"] if first.operator.sympl(loops["e"]) != second.operator.sympl(loops["e"]) else loops["m"]
    mixed = (psi_i + psi_j) / math.sqrt(2.0)
    wilson = float(np.real(denseq.pauli_expectation(mixed, distinguishing)))

    report = SuperpositionReport(tuple(pair), tuple(float(p) for p in phases), len(operators),
                                 float(worst), wilson, atol)
    logger.info("superposition check %s: max deviation %.3e over %d operators",
                pair, worst, len(operators))
    return report
