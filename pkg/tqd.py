# tqd.py

"""
Command-line front door.

One subcommand per quantity:
    index        secret-sharing index of the two-blob code space
    verify       authorized / unauthorized checks (optionally superpositions)
    tee          topological entanglement entropy of a layout
    fusion       fusion-space counting ratio of an anyon model
    channel      conditional-expectation suite on the finite crossed product
    chi          Holevo-chi route to the index (dense, small tori)
    correlation  irreducible k-body correlation of a small state

Every run writes one report document (JSON or CSV) to stdout or --output.
Exit status: 0 success, 1 verification violations or solver failure,
2 input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from enum import Enum
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv

import denseq
import entropy
import fusion
import secretshare
from config import RunConfig, Settings
from data_loader import load_fusion_model, load_layout_document
from errors import CapabilityError, ConvergenceError, InputError, TqdError
from lattice import Lattice, LayoutKind, RegionLayout, build_lattice, make_layout
from stabilizer import toric_ground_state

__version__ = "1.0.0"

SCHEMA = "tqd-report/1"
COMMANDS = ("index", "verify", "tee", "fusion", "channel", "chi", "correlation")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger("tqd")

# Commands that never look at a lattice drop the probe diameter from the report.
_USES_DMAX = {"index", "verify"}
# chi builds 2^(2L^2) amplitudes; only L=3 fits the dense backend.
_DEFAULT_L = {"chi": 3}


# ============================================================================
# Report plumbing
# ============================================================================

def package_versions() -> Dict[str, str]:
    versions: Dict[str, str] = {}
    for name in ("numpy", "scipy", "networkx", "pandas"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    versions["tqd"] = __version__
    return versions


def _normalize(value: Any) -> Any:
    """JSON-ready copy with floats fixed to 12 significant digits."""
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_normalize(v) for v in items]
    if isinstance(value, np.ndarray):
        return _normalize(value.tolist())
    if isinstance(value, np.generic):
        return _normalize(value.item())
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return float(f"{value:.12g}") + 0.0
    if isinstance(value, complex):
        return {"re": _normalize(value.real), "im": _normalize(value.imag)}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return str(value)


def build_report(config: RunConfig, results: Dict[str, Any]) -> Dict[str, Any]:
    return _normalize({
        "schema": SCHEMA,
        "command": config.command,
        "inputs": config.describe(),
        "seed": config.seed,
        "tolerances": config.settings.tolerances.as_dict(),
        "versions": package_versions(),
        "results": results,
    })


def render_report(report: Dict[str, Any], output_format: str = "json") -> str:
    """Serialize a report; identical reports give identical text."""
    if output_format == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output_format == "csv":
        frame = pd.json_normalize(report["results"])
        frame = frame.reindex(sorted(frame.columns), axis=1)
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False)
        return buffer.getvalue()
    raise InputError(f"unknown output format {output_format!r}")


def write_report(text: str, output_path: Optional[Path]) -> None:
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text, encoding="utf-8")
    logger.info("report written to %s", output_path)


def _headline(name: str, bits: Optional[float], base: str) -> Dict[str, Any]:
    """The command's main quantity in the unit selected with --base."""
    if bits is None:
        return {"name": name, "value": None, "unit": "bits" if base == "2" else "nats"}
    if base == "2":
        return {"name": name, "value": bits, "unit": "bits"}
    return {"name": name, "value": bits * math.log(2.0), "unit": "nats"}


# ============================================================================
# Lattice and layout resolution
# ============================================================================

def _lattice_and_layout(config: RunConfig, default_kind: LayoutKind) -> Tuple[Lattice, RegionLayout]:
    """
    Build the lattice and layout from --layout-file, or from --geometry/--L
    and --layout. The resolved values are written back into the config so
    the report records what actually ran.
    """
    if config.layout_file is not None:
        doc = load_layout_document(config.layout_file)
        lat, layout = doc.build(config.geometry, config.L)
        config.layout_params = dict(doc.params)
    else:
        lat = build_lattice(config.geometry, config.L)
        layout = make_layout(lat, config.layout_kind or default_kind)
        config.layout_params = dict(layout.params)
    config.geometry = lat.geometry.value
    config.L = lat.L
    config.layout_kind = layout.kind.value
    logger.debug("lattice %s L=%d, layout %s", config.geometry, config.L, config.layout_kind)
    return lat, layout


# ============================================================================
# Subcommands
# ============================================================================

CommandResult = Tuple[int, Dict[str, Any]]


def cmd_index(config: RunConfig) -> CommandResult:
    lat, layout = _lattice_and_layout(config, LayoutKind.TWO_BLOB)
    opts = config.options
    dmax = None if opts.get("unrestricted") else config.dmax
    report = secretshare.compute_index(toric_ground_state(lat), layout, dmax, opts.get("threads"))
    results = report.to_dict()
    results["layout"] = layout.describe()
    results["headline"] = _headline("log_index", report.log_index_bits, config.log_base)
    return 0, results


def cmd_verify(config: RunConfig) -> CommandResult:
    lat, layout = _lattice_and_layout(config, LayoutKind.TWO_BLOB)
    opts = config.options
    settings = config.settings
    min_sep = opts.get("min_separation")
    if min_sep is None:
        min_sep = settings.verification.min_separation
    ground = toric_ground_state(lat)
    states = secretshare.build_code_states(ground, layout, min_sep)

    authorized = secretshare.verify_authorized(states, layout)
    extra = []
    if opts.get("encircling"):
        loops = secretshare.encircling_loops(lat, layout["A"])
        extra = [(f"encircle_A_{kind}", op) for kind, op in sorted(loops.items())]
    sampled = opts.get("sampled")
    probes = secretshare.build_probe_family(
        ground, layout, config.dmax,
        sampled if sampled is not None else settings.verification.sampled_probes,
        config.seed, extra,
    )
    unauthorized = secretshare.verify_unauthorized(states, probes, opts.get("threads"))

    results: Dict[str, Any] = {
        "layout": layout.describe(),
        "authorized": authorized.to_dict(),
        "unauthorized": unauthorized.to_dict(),
    }
    clean = authorized.clean and unauthorized.clean
    if opts.get("superposition"):
        superposition = secretshare.superposition_check(
            states, layout, settings.verification.superposition_samples,
            seed=config.seed, atol=settings.tolerances.atol,
        )
        results["superposition"] = superposition.to_dict()
        clean = clean and superposition.passed
    results["clean"] = clean
    if not clean:
        logger.warning("verification found %d unauthorized violations",
                       len(unauthorized.violations))
    return (0 if clean else 1), results


def cmd_tee(config: RunConfig) -> CommandResult:
    lat, layout = _lattice_and_layout(config, LayoutKind.ANNULUS)
    report = entropy.layout_tee(toric_ground_state(lat), layout, threads=config.options.get("threads"))
    results = report.to_dict()
    results["layout"] = layout.describe()
    results["headline"] = _headline("gamma", report.gamma_bits, config.log_base)
    return 0, results


def cmd_fusion(config: RunConfig) -> CommandResult:
    opts = config.options
    model = load_fusion_model(opts.get("model") or "fibonacci")
    counts = fusion.secret_ratio(model, opts["nA"], opts["nE"], opts["nB"], opts.get("site"))
    dims = fusion.quantum_dims(model, config.settings.tolerances.atol)
    results = counts.to_dict()
    results["quantum_dims"] = dims.to_dict()
    ratio = counts.ratio_float
    results["headline"] = _headline("log_ratio", math.log2(ratio) if ratio else None, config.log_base)
    return 0, results


def cmd_channel(config: RunConfig) -> CommandResult:
    opts = config.options
    tol = config.settings.tolerances
    solver = config.settings.solver
    model = denseq.build_crossed_product(d=2, k=opts.get("k") or 2)
    samples = opts.get("samples") or 100
    seed = config.seed

    checks = [
        denseq.conditional_expectation_check(model, samples, seed),
        denseq.twirl_check(model, samples, seed),
        denseq.dual_action_check(model, samples, seed),
        denseq.schrodinger_check(model, samples, seed),
        denseq.pimsner_popa_check(model, opts.get("pp_samples") or 1000, seed, tol.atol,
                                  tol.strict_atol, opts.get("threads")),
        denseq.stinespring_verify(model, samples, seed, tol.strict_atol),
    ]
    gain = denseq.entropy_gain_search(
        model,
        random_povms=opts.get("random_povms") or solver.random_povms,
        restarts=opts.get("restarts") or solver.search_restarts,
        steps=opts.get("steps") or solver.search_steps,
        seed=seed, atol=tol.atol,
    )
    results: Dict[str, Any] = {
        "model": {"d": model.d, "k": model.k, "dim": model.dim,
                  "represented_dim": model.represented_dim, "index": 4},
        "checks": {report.check: report.to_dict() for report in checks},
        "entropy_gain": gain.to_dict(),
    }
    passed = all(report.passed for report in checks) and gain.passed
    results["passed"] = passed
    best = gain.optimum if gain.optimum is not None else gain.max_value
    results["headline"] = _headline("entropy_gain_optimum", best / math.log(2.0), config.log_base)
    return (0 if passed else 1), results


def cmd_chi(config: RunConfig) -> CommandResult:
    lat, layout = _lattice_and_layout(config, LayoutKind.TWO_BLOB)
    min_sep = config.options.get("min_separation")
    report = denseq.chi_secret_check(lat, layout, 1 if min_sep is None else min_sep,
                                     atol=config.settings.tolerances.atol)
    results = report.to_dict()
    results["layout"] = layout.describe()
    results["headline"] = _headline("chi_difference", report.difference, config.log_base)
    return (0 if report.eve_blind else 1), results


def cmd_correlation(config: RunConfig) -> CommandResult:
    opts = config.options
    rho = denseq.named_state(opts.get("state") or "even-parity", opts.get("n"))
    k = opts.get("k") or rho.n_qubits
    report = denseq.irreducible_correlation(rho, k, tolerance=config.settings.solver.tolerance,
                                            seed=config.seed)
    results = report.to_dict()
    results["n_qubits"] = rho.n_qubits
    results["headline"] = _headline("irreducible_correlation", report.correlation, config.log_base)
    return 0, results


HANDLERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "index": cmd_index,
    "verify": cmd_verify,
    "tee": cmd_tee,
    "fusion": cmd_fusion,
    "channel": cmd_channel,
    "chi": cmd_chi,
    "correlation": cmd_correlation,
}


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """
    Dispatch one run. Returns the exit status and the report document.
    Input and capability errors propagate; a solver that fails to
    converge yields a report describing the failure and status 1.
    """
    handler = HANDLERS.get(config.command)
    if handler is None:
        raise InputError(f"unknown command {config.command!r}")
    if config.command not in _USES_DMAX:
        config.dmax = None
    try:
        status, results = handler(config)
    except ConvergenceError as exc:
        logger.error("%s", exc)
        status, results = 1, {"error": "convergence", "message": str(exc),
                              "residual": exc.residual, "iterations": exc.iterations}
    return status, build_report(config, results)


# ============================================================================
# Argument parsing
# ============================================================================

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--geometry", choices=["torus", "planar"], default=None,
                        help="Lattice geometry (default: TQD_GEOMETRY or torus)")
    common.add_argument("--L", type=int, default=None, help="Linear lattice size (default: TQD_L or 8)")
    common.add_argument("--seed", type=int, default=None, help="Master seed (default: TQD_SEED or 7)")
    common.add_argument("--base", choices=["2", "e"], default="2",
                        help="Unit of the headline quantity: bits (2) or nats (e)")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="Report format")
    common.add_argument("-o", "--output", default=None, help="Write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=None,
                        help="Cap on worker threads (default: TQD_THREADS or CPU count)")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="Log progress to stderr (-vv for debug)")
    return common


def _layout_arguments(sub: argparse.ArgumentParser, kinds: Sequence[str]) -> None:
    sub.add_argument("--layout", choices=list(kinds), default=None, help="Region layout kind")
    sub.add_argument("--layout-file", default=None,
                     help="JSON layout document; its geometry and L win over the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tqd",
        description="Total quantum dimension of the toric code and friends, computed three ways.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  tqd index --geometry torus --L 8 --dmax 3 --seed 7
  tqd verify --L 8 --encircling
  tqd tee --layout annulus --L 12
  tqd fusion --model fibonacci --nA 30 --nB 30 --nE 30
  tqd channel --k 2 --format csv --output channel.csv
  tqd chi --L 3
  tqd correlation --state even-parity --k 3
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_parser()
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    index = subparsers.add_parser("index", parents=[common], help="Secret-sharing index")
    _layout_arguments(index, ["two-blob"])
    index.add_argument("--dmax", type=int, default=None, help="Diameter of Eve's probes (default: 3)")
    index.add_argument("--unrestricted", action="store_true", help="Let Eve measure anything in E")

    verify = subparsers.add_parser("verify", parents=[common], help="Authorized/unauthorized checks")
    _layout_arguments(verify, ["two-blob"])
    verify.add_argument("--dmax", type=int, default=None, help="Diameter of Eve's probes (default: 3)")
    verify.add_argument("--sampled", type=int, default=None, help="Random Pauli probes (default: 64)")
    verify.add_argument("--min-separation", type=int, default=None,
                        help="Smallest allowed blob separation (default: 4)")
    verify.add_argument("--encircling", action="store_true",
                        help="Add the loops encircling A to Eve's probes")
    verify.add_argument("--superposition", action="store_true",
                        help="Also check superpositions on the dense backend (small lattices)")

    tee = subparsers.add_parser("tee", parents=[common], help="Topological entanglement entropy")
    _layout_arguments(tee, ["kitaev-preskill", "levin-wen", "annulus", "rectangle"])

    fus = subparsers.add_parser("fusion", parents=[common], help="Fusion-space counting ratio")
    fus.add_argument("--model", default="fibonacci",
                     help="fibonacci, toric, trivial, zn:N, or a JSON model file")
    fus.add_argument("--nA", type=int, required=True, help="Anyons in A")
    fus.add_argument("--nE", type=int, required=True, help="Anyons in E")
    fus.add_argument("--nB", type=int, required=True, help="Anyons in B")
    fus.add_argument("--site", default=None, help="Label carried by every site (default: model's own)")

    channel = subparsers.add_parser("channel", parents=[common], help="Crossed-product channel suite")
    channel.add_argument("--k", type=int, default=2, help="Multiplicity (even, default 2)")
    channel.add_argument("--samples", type=int, default=100, help="Random elements per check")
    channel.add_argument("--pp-samples", type=int, default=1000, help="Positive samples for E(X) >= X/4")
    channel.add_argument("--random-povms", type=int, default=None, help="Random POVMs in the gain search")
    channel.add_argument("--restarts", type=int, default=None, help="Local-ascent restarts")
    channel.add_argument("--steps", type=int, default=None, help="Steps per restart")

    chi = subparsers.add_parser("chi", parents=[common], help="Holevo-chi route to the index (L=3)")
    _layout_arguments(chi, ["two-blob"])
    chi.add_argument("--min-separation", type=int, default=None, help="Smallest allowed blob separation")

    corr = subparsers.add_parser("correlation", parents=[common], help="Irreducible k-body correlation")
    corr.add_argument("--state", choices=list(denseq.NAMED_STATES), default="even-parity")
    corr.add_argument("--n", type=int, default=None, help="Qubits (default 3; bell has 2)")
    corr.add_argument("--k", type=int, default=None, help="Order (default: n)")
    return parser


def configure_logging(verbose: int, settings: Settings) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    root = logging.getLogger()
    for old in [h for h in root.handlers if getattr(h, "_tqd", False)]:
        root.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._tqd = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(level)


def main(argv: Optional[List[str]] = None) -> None:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = Settings.from_env()
    configure_logging(args.verbose, settings)
    if getattr(args, "L", None) is None and args.command in _DEFAULT_L:
        args.L = _DEFAULT_L[args.command]

    try:
        config = RunConfig.from_args(args, settings)
        status, report = run(config)
        write_report(render_report(report, config.output_format), config.output_path)
    except (InputError, CapabilityError) as exc:
        print(f"tqd: error: {exc}", file=sys.stderr)
        sys.exit(2)
    except TqdError as exc:
        logger.exception("run failed")
        print(f"tqd: error: {exc}", file=sys.stderr)
        sys.exit(1)
    sys.exit(status)


if __name__ == "__main__":
    main()
