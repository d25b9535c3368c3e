# entropy.py

"""
Exact entanglement entropies of stabilizer states and the
topological-entropy combinations built from them.

For a stabilizer state the entropy of a region (in bits) is

    S(R) = |R| - dim{ s in S : support(s) inside R }

so every number in this module is an integer or an exact rational.
Region entropies are independent of each other and are evaluated on a
thread pool capped by TQD_THREADS.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from config import default_workers
from errors import InputError, LayoutError
from lattice import (
    LayoutKind,
    Region,
    RegionLayout,
    annulus,
    boundary_components,
    boundary_size,
    rectangle,
)
from stabilizer import StabilizerState, inside_dimension

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

DEFAULT_RECT_SIZES: Tuple[Tuple[int, int], ...] = (
    (2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (4, 5), (5, 5),
)


def bits_to_nats(bits: float) -> float:
    return float(bits) * LN2


# ============================================================================
# Region entropies
# ============================================================================

def region_entropy(state: StabilizerState, r: Region) -> int:
    """Entropy of the reduced state on r, in bits."""
    if state.lattice is not None:
        r.validate(state.lattice)
    elif any(q < 0 or q >= state.n for q in r.edges):
        raise LayoutError(f"region {r.name} reaches outside {state.n} qubits")
    if not r.edges:
        return 0
    return len(r) - inside_dimension(state, r)


def evaluate_entropies(state: StabilizerState, regions: Mapping[str, Region],
                       threads: Optional[int] = None) -> Dict[str, int]:
    """Entropies of several regions, computed concurrently; keyed like the input."""
    workers = max(1, min(threads or default_workers(), len(regions) or 1))
    results: Dict[str, int] = {}
    if workers == 1:
        for name, region in regions.items():
            results[name] = region_entropy(state, region)
        return results

    executor = ThreadPoolExecutor(max_workers=workers)
    try:
        futures = {executor.submit(region_entropy, state, region): name
                   for name, region in regions.items()}
        for future in as_completed(futures):
            name = futures[future]
            try:
                results[name] = future.result()
            except Exception:
                logger.exception("entropy of region %s failed", name)
                raise
    finally:
        executor.shutdown(wait=True)
    return {name: results[name] for name in regions}


# ============================================================================
# Reports
# ============================================================================

@dataclass
class TeeReport:
    """Entropies and the topological term extracted from one layout or fit."""

    layout_kind: str
    entropies: Dict[str, int] = field(default_factory=dict)
    boundary_sizes: Dict[str, int] = field(default_factory=dict)
    n_boundary: Dict[str, int] = field(default_factory=dict)
    combination: Optional[int] = None
    s_top: Optional[Fraction] = None
    gamma: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    residual: Optional[Fraction] = None
    pairs: List[Dict[str, object]] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    @property
    def gamma_bits(self) -> Optional[float]:
        return None if self.gamma is None else float(self.gamma)

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "layout_kind": self.layout_kind,
            "entropies_bits": dict(self.entropies),
            "boundary_sizes": dict(self.boundary_sizes),
            "n_boundary": dict(self.n_boundary),
            "flags": list(self.flags),
        }
        if self.combination is not None:
            out["combination_bits"] = self.combination
        if self.s_top is not None:
            out["s_top_bits"] = float(self.s_top)
            out["s_top_nats"] = bits_to_nats(self.s_top)
        if self.gamma is not None:
            out["gamma_bits"] = float(self.gamma)
            out["gamma_nats"] = bits_to_nats(self.gamma)
            out["gamma_exact"] = str(self.gamma)
        if self.beta is not None:
            out["beta"] = float(self.beta)
            out["beta_exact"] = str(self.beta)
        if self.residual is not None:
            out["residual"] = float(self.residual)
        if self.pairs:
            out["pairs"] = [dict(p) for p in self.pairs]
        return out


# ============================================================================
# Topological combinations
# ============================================================================

# Signed region sums; the topological term is minus the sum divided by
# the number of boundary components the construction doubles.
_KP_TERMS = (("A", 1), ("B", 1), ("C", 1), ("AB", -1), ("BC", -1), ("CA", -1), ("ABC", 1))
_LW_TERMS = (("ring", 1), ("cut_top", -1), ("cut_bottom", -1), ("cut_both", 1))


def _kp_regions(layout: RegionLayout) -> Dict[str, Region]:
    a, b, c = layout["A"], layout["B"], layout["C"]
    return {
        "A": a, "B": b, "C": c,
        "AB": a.union(b, "AB"),
        "BC": b.union(c, "BC"),
        "CA": c.union(a, "CA"),
        "ABC": a.union(b, "AB").union(c, "ABC"),
    }


def tee_combination(state: StabilizerState, layout: RegionLayout,
                    threads: Optional[int] = None) -> TeeReport:
    """
    Kitaev-Preskill: S_top = -(S_A + S_B + S_C - S_AB - S_BC - S_CA + S_ABC), gamma = S_top.
    Levin-Wen: S_top = -(S_ring - S_cut_top - S_cut_bottom + S_cut_both), gamma = S_top / 2.
    """
    if layout.kind == LayoutKind.KITAEV_PRESKILL:
        regions, terms, per_gamma = _kp_regions(layout), _KP_TERMS, 1
    elif layout.kind == LayoutKind.LEVIN_WEN:
        regions = {name: layout[name] for name, _ in _LW_TERMS}
        terms, per_gamma = _LW_TERMS, 2
    else:
        raise InputError(
            f"topological combination needs a kitaev-preskill or levin-wen layout, got {layout.kind.value}"
        )

    entropies = evaluate_entropies(state, regions, threads)
    combination = sum(sign * entropies[name] for name, sign in terms)
    s_top = Fraction(-combination)
    report = TeeReport(
        layout_kind=layout.kind.value,
        entropies=entropies,
        combination=combination,
        s_top=s_top,
        gamma=s_top / per_gamma,
        flags=list(layout.flags),
    )
    if state.lattice is not None:
        lat = state.lattice
        report.boundary_sizes = {name: boundary_size(lat, r) for name, r in regions.items()}
        report.n_boundary = {name: boundary_components(lat, r) for name, r in regions.items()}
    logger.info("%s combination %d bits, gamma %s", layout.kind.value, combination, report.gamma)
    return report


# ============================================================================
# Area-law fit
# ============================================================================

@dataclass(frozen=True)
class _Sample:
    name: str
    region: Region
    boundary: int
    components: int


def _solve_normal_equations(samples: Sequence[_Sample],
                            entropies: Mapping[str, int]) -> Tuple[Fraction, Fraction, Fraction]:
    """Exact least squares for S = beta*|d| - n*gamma."""
    s11 = s12 = s22 = t1 = t2 = Fraction(0)
    for smp in samples:
        u, w, s = Fraction(smp.boundary), Fraction(-smp.components), Fraction(entropies[smp.name])
        s11 += u * u
        s12 += u * w
        s22 += w * w
        t1 += u * s
        t2 += w * s
    det = s11 * s22 - s12 * s12
    if det == 0:
        raise InputError("area-law family does not separate the slope from the topological term")
    beta = (t1 * s22 - t2 * s12) / det
    gamma = (s11 * t2 - s12 * t1) / det
    residual = sum(
        ((beta * smp.boundary - gamma * smp.components) - entropies[smp.name]) ** 2
        for smp in samples
    )
    return beta, gamma, Fraction(residual)


def _matching_rectangle(lat, origin: Sequence[int], target: int,
                        family: Sequence[_Sample]) -> Optional[_Sample]:
    for smp in family:
        if smp.components == 1 and smp.boundary == target:
            return smp
    limit = lat.L - 2 if lat.is_torus else lat.L - 1
    shapes = sorted(((a, b) for a in range(1, limit + 1) for b in range(a, limit + 1)),
                    key=lambda ab: (ab[1] - ab[0], ab[0]))
    for a, b in shapes:
        try:
            region = rectangle(lat, origin, (a, b), f"rect{a}x{b}")
        except LayoutError:
            continue
        if boundary_size(lat, region) == target:
            return _Sample(region.name, region, target, boundary_components(lat, region))
    return None


def area_law_fit(state: StabilizerState,
                 rect_sizes: Optional[Sequence[Sequence[int]]] = None,
                 annulus_specs: Sequence[Sequence[int]] = (),
                 origin: Sequence[int] = (1, 1),
                 threads: Optional[int] = None,
                 built_annuli: Sequence[Region] = ()) -> TeeReport:
    """
    Fit S = beta*|d| - n*gamma over rectangles (one boundary component)
    and annuli (two), exactly.

    ``annulus_specs`` holds (inner, outer) pairs; each annulus is placed
    so that its outer box starts at ``origin``. ``built_annuli`` adds regions
    that were already built, such as the ring of an annulus layout, and
    fits them where they sit. For every annulus the
    rectangle with the same boundary size is also evaluated and the
    difference of the two entropies is reported as a matched pair.
    """
    lat = state.lattice
    if lat is None:
        raise InputError("area-law fit needs a state that carries its lattice")
    sizes = [tuple(int(x) for x in s) for s in (rect_sizes or DEFAULT_RECT_SIZES)]
    oi, oj = int(origin[0]), int(origin[1])

    samples: List[_Sample] = []
    for a, b in sizes:
        region = rectangle(lat, (oi, oj), (a, b), f"rect{a}x{b}")
        samples.append(_Sample(region.name, region, boundary_size(lat, region),
                               boundary_components(lat, region)))
    annuli: List[_Sample] = []
    for spec in annulus_specs:
        inner, outer = int(spec[0]), int(spec[1])
        region = annulus(lat, (oi + outer, oj + outer), inner, outer, f"annulus{inner}-{outer}")
        annuli.append(_Sample(region.name, region, boundary_size(lat, region),
                              boundary_components(lat, region)))
    for region in built_annuli:
        ring = _Sample(region.name, region, boundary_size(lat, region), boundary_components(lat, region))
        if ring.components != 2:
            raise LayoutError(f"{region.name} has {ring.components} boundary components, expected 2")
        annuli.append(ring)

    if len({smp.boundary for smp in samples + annuli}) < 2:
        raise InputError("area-law fit needs at least two distinct boundary sizes")

    matched: List[Tuple[_Sample, _Sample]] = []
    for ann in annuli:
        rect = _matching_rectangle(lat, (oi, oj), ann.boundary, samples)
        if rect is not None:
            matched.append((rect, ann))
        else:
            logger.warning("no rectangle matches the boundary of %s (|d|=%d)", ann.name, ann.boundary)

    everything: Dict[str, Region] = {smp.name: smp.region for smp in samples + annuli}
    for rect, _ in matched:
        everything.setdefault(rect.name, rect.region)
    entropies = evaluate_entropies(state, everything, threads)

    fitted = samples + annuli
    beta, gamma, residual = _solve_normal_equations(fitted, entropies)

    pairs = []
    for rect, ann in matched:
        pairs.append({
            "rectangle": rect.name,
            "annulus": ann.name,
            "boundary": ann.boundary,
            "gamma_bits": entropies[rect.name] - entropies[ann.name],
        })
    report = TeeReport(
        layout_kind="area-law",
        entropies=entropies,
        boundary_sizes={smp.name: smp.boundary for smp in fitted},
        n_boundary={smp.name: smp.components for smp in fitted},
        gamma=gamma,
        beta=beta,
        residual=residual,
        pairs=pairs,
    )
    logger.info("area-law fit: beta=%s gamma=%s residual=%s", beta, gamma, residual)
    return report


def layout_tee(state: StabilizerState, layout: RegionLayout,
               rect_sizes: Optional[Sequence[Sequence[int]]] = None,
               threads: Optional[int] = None) -> TeeReport:
    """TEE for any layout kind: combinations for KP/LW, the area-law fit for the rest."""
    if layout.kind in (LayoutKind.KITAEV_PRESKILL, LayoutKind.LEVIN_WEN):
        return tee_combination(state, layout, threads)
    if layout.kind == LayoutKind.ANNULUS:
        ci, cj = layout.params["center"]  # type: ignore[misc]
        inner, outer = layout.params["inner"], layout.params["outer"]
        ring = Region(layout["R"].edges, f"annulus{inner}-{outer}@{ci},{cj}")
        return area_law_fit(state, rect_sizes, threads=threads, built_annuli=[ring])
    if layout.kind == LayoutKind.RECTANGLE:
        corner = layout.params["corner"]
        return area_law_fit(state, rect_sizes, [], origin=corner, threads=threads)  # type: ignore[arg-type]
    raise InputError(f"no entropy combination for a {layout.kind.value} layout")
