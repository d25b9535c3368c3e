# config.py

"""
Central configuration for tqd runs and tests.

Handles configuration for:
- Lattice defaults (geometry, linear size)
- Secret-sharing verification (probe diameter, sampling, threads)
- Numerical tolerances
- Iterative solvers (max-entropy fitting, POVM search)

Values may be overridden with environment variables (.env file).
Command-line flags override both (see RunConfig.from_args).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional


# ============================================================================
# Helper Functions
# ============================================================================

def _env_str(name: str, default: Optional[str] = None) -> Optional[str]:
    """Safely read string environment variable."""
    value = os.getenv(name)
    return value if value is not None else default


def _env_int(name: str, default: int) -> int:
    """Safely read integer environment variable with fallback."""
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        return default


def _env_float(name: str, default: float) -> float:
    """Safely read float environment variable with fallback."""
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        return default


def resolve_threads(requested: int) -> int:
    """0 or negative means one worker per CPU."""
    if requested and requested > 0:
        return requested
    return os.cpu_count() or 1


def default_workers() -> int:
    """Worker count from TQD_THREADS."""
    return resolve_threads(_env_int("TQD_THREADS", 0))


# ============================================================================
# Configuration Classes
# ============================================================================

@dataclass
class LatticeDefaults:
    """
    Lattice used when a command does not name one.

    Used by: index, verify, tee, chi
    """
    geometry: str = "torus"
    L: int = 8

    @classmethod
    def from_env(cls) -> "LatticeDefaults":
        return cls(
            geometry=_env_str("TQD_GEOMETRY", "torus") or "torus",
            L=_env_int("TQD_L", 8),
        )


@dataclass
class VerificationConfig:
    """
    Secret-sharing verification - HOW HARD Eve probes.

    Used by: secretshare (probe families, index), tests
    """
    dmax: int = 3
    min_separation: int = 4
    sampled_probes: int = 64
    superposition_samples: int = 200
    threads: int = 0

    @classmethod
    def from_env(cls) -> "VerificationConfig":
        return cls(
            dmax=_env_int("TQD_DMAX", 3),
            min_separation=_env_int("TQD_MIN_SEPARATION", 4),
            sampled_probes=_env_int("TQD_SAMPLED_PROBES", 64),
            superposition_samples=_env_int("TQD_SUPERPOSITION_SAMPLES", 200),
            threads=_env_int("TQD_THREADS", 0),
        )

    @property
    def workers(self) -> int:
        return resolve_threads(self.threads)


@dataclass
class ToleranceConfig:
    """
    Numerical acceptance thresholds - WHAT counts as equal.

    Used by: denseq, secretshare.superposition_check
    """
    atol: float = 1e-9
    strict_atol: float = 1e-12
    state_atol: float = 1e-10
    eig_cutoff: float = 1e-12

    @classmethod
    def from_env(cls) -> "ToleranceConfig":
        return cls(
            atol=_env_float("TQD_ATOL", 1e-9),
            strict_atol=_env_float("TQD_STRICT_ATOL", 1e-12),
            state_atol=_env_float("TQD_STATE_ATOL", 1e-10),
            eig_cutoff=_env_float("TQD_EIG_CUTOFF", 1e-12),
        )

    def as_dict(self) -> Dict[str, float]:
        return {
            "atol": self.atol,
            "strict_atol": self.strict_atol,
            "state_atol": self.state_atol,
            "eig_cutoff": self.eig_cutoff,
        }


@dataclass
class SolverConfig:
    """
    Iterative solvers - HOW LONG to keep going.

    Used by: denseq.max_entropy_state, denseq.entropy_gain_search
    """
    damping: float = 0.5
    max_iter: int = 10_000
    tolerance: float = 1e-8
    search_restarts: int = 20
    search_steps: int = 50
    random_povms: int = 1000

    @classmethod
    def from_env(cls) -> "SolverConfig":
        return cls(
            damping=_env_float("TQD_DAMPING", 0.5),
            max_iter=_env_int("TQD_MAX_ITER", 10_000),
            tolerance=_env_float("TQD_SOLVER_TOL", 1e-8),
            search_restarts=_env_int("TQD_SEARCH_RESTARTS", 20),
            search_steps=_env_int("TQD_SEARCH_STEPS", 50),
            random_povms=_env_int("TQD_RANDOM_POVMS", 1000),
        )


# ============================================================================
# Master Configuration
# ============================================================================

@dataclass
class Settings:
    """
    Master configuration object.

    Structure:
    - lattice: default geometry and size
    - verification: Eve's probe family and parallelism
    - tolerances: numerical thresholds
    - solver: iteration caps and damping
    - seed: master seed for every sampled quantity
    - log_level: root logging level
    """
    lattice: LatticeDefaults = field(default_factory=LatticeDefaults)
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 7
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        """Load complete configuration from environment variables."""
        return cls(
            lattice=LatticeDefaults.from_env(),
            verification=VerificationConfig.from_env(),
            tolerances=ToleranceConfig.from_env(),
            solver=SolverConfig.from_env(),
            seed=_env_int("TQD_SEED", 7),
            log_level=_env_str("TQD_LOG_LEVEL", "WARNING") or "WARNING",
        )


@dataclass
class RunConfig:
    """
    One CLI invocation, fully resolved.

    Every field lands in the report so the run can be repeated exactly.
    """
    command: str
    geometry: str
    L: int
    layout_kind: Optional[str] = None
    layout_params: Dict[str, Any] = field(default_factory=dict)
    layout_file: Optional[Path] = None
    dmax: Optional[int] = None
    seed: int = 7
    log_base: str = "2"
    output_format: str = "json"
    output_path: Optional[Path] = None
    options: Dict[str, Any] = field(default_factory=dict)
    settings: Settings = field(default_factory=Settings)

    @classmethod
    def from_args(cls, args, settings: Optional[Settings] = None) -> "RunConfig":
        """Merge parsed argparse arguments over environment defaults."""
        settings = settings or Settings.from_env()
        geometry = getattr(args, "geometry", None) or settings.lattice.geometry
        L = getattr(args, "L", None)
        seed = getattr(args, "seed", None)
        dmax = getattr(args, "dmax", None)
        output = getattr(args, "output", None)
        layout_file = getattr(args, "layout_file", None)
        reserved = {"command", "geometry", "L", "seed", "dmax", "output", "format",
                    "layout_file", "layout", "base", "verbose"}
        options = {k: v for k, v in vars(args).items() if k not in reserved}
        return cls(
            command=args.command,
            geometry=geometry,
            L=int(L) if L is not None else settings.lattice.L,
            layout_kind=getattr(args, "layout", None),
            layout_file=Path(layout_file) if layout_file else None,
            dmax=dmax if dmax is not None else settings.verification.dmax,
            seed=int(seed) if seed is not None else settings.seed,
            log_base=getattr(args, "base", None) or "2",
            output_format=getattr(args, "format", None) or "json",
            output_path=Path(output) if output else None,
            options=options,
            settings=settings,
        )

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "command": self.command,
            "geometry": self.geometry,
            "L": self.L,
            "seed": self.seed,
            "log_base": self.log_base,
        }
        if self.layout_kind:
            out["layout"] = self.layout_kind
        if self.layout_params:
            out["layout_params"] = self.layout_params
        if self.dmax is not None:
            out["dmax"] = self.dmax
        out.update({k: v for k, v in sorted(self.options.items()) if v is not None})
        return out
