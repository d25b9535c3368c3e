# metrics.py

"""
Thread-safe tally of verification checks.

Probe workers record one CheckSample per decision; reports read back:
- total checks run
- passes / violations
- violations grouped by kind, with their witnesses
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass
class CheckSample:
    """One verification decision."""

    check: str
    probe: str
    passed: bool
    classes: Tuple[str, ...] = ()
    witness: Optional[Dict[str, object]] = None
    detail: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "check": self.check,
            "probe": self.probe,
            "passed": self.passed,
            "classes": list(self.classes),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class CheckLedger:
    """Aggregated, thread-safe check results."""

    _samples: List[CheckSample] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def record(self, sample: CheckSample) -> None:
        with self._lock:
            self._samples.append(sample)

    def extend(self, samples: List[CheckSample]) -> None:
        with self._lock:
            self._samples.extend(samples)

    @property
    def samples(self) -> List[CheckSample]:
        with self._lock:
            return list(self._samples)

    @property
    def total(self) -> int:
        return len(self.samples)

    @property
    def passes(self) -> int:
        return sum(1 for s in self.samples if s.passed)

    @property
    def violations(self) -> List[CheckSample]:
        return [s for s in self.samples if not s.passed]

    @property
    def violation_rate(self) -> float:
        if self.total == 0:
            return 0.0
        return len(self.violations) / float(self.total)

    def by_check(self) -> Dict[str, int]:
        return dict(sorted(Counter(s.check for s in self.samples).items()))

    def snapshot(self) -> dict:
        """
        JSON-serializable summary. Violations are listed in probe order so
        that reruns with the same seed produce the same document.
        """
        violations = sorted(self.violations, key=lambda s: (s.probe, s.check, s.classes))
        return {
            "total": self.total,
            "passes": self.passes,
            "violations": len(violations),
            "violation_rate": self.violation_rate,
            "by_check": self.by_check(),
            "violation_list": [v.to_dict() for v in violations],
        }
