# errors.py

"""
Error taxonomy shared by every tqd module.

Library code raises these; only the command-line front door (tqd.py)
turns them into exit statuses:

- InputError / LayoutError / CapabilityError -> exit 2
- ConvergenceError and verification violations -> exit 1
"""

from __future__ import annotations

from typing import Optional


class TqdError(Exception):
    """Base class for all tqd failures."""


class InputError(TqdError, ValueError):
    """Malformed arguments, dimension mismatches, unknown labels."""


class LayoutError(InputError):
    """Regions that overlap, leave the lattice, or sit too close together."""


class CapabilityError(TqdError, RuntimeError):
    """The dense backend was asked for more than it can hold."""


class ConvergenceError(TqdError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message: str, residual: float, iterations: int,
                 state: Optional[object] = None) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations
        self.state = state
