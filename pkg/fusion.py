# fusion.py

"""
Fusion-rule combinatorics.

A FusionModel is a label set with a vacuum (the first label), a dual
map and multiplicities N[a][b][c]. From it we get quantum dimensions
(Perron-Frobenius eigenvalues of the fusion matrices) and fusion-space
dimensions: the number of fusion trees of a chain of anyons with a
given total charge, counted by a transfer matrix in exact integers.

secret_ratio compares two counts for three groups of anyons A, E, B.
V fixes the total charge of every group to the vacuum; V-hat only fixes
E and lets A and B carry conjugate charges. Their ratio tends to D^2.

Built-in models: "fibonacci", "toric" (Z2 x Z2, labels 1 e m f),
"trivial" and "zn:N" (quantum double of Z_N).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from errors import InputError

logger = logging.getLogger(__name__)

# A site is one label, a {label: multiplicity} superposition, or "regular"
# (every label once).
Site = Union[str, Mapping[str, int]]

REGULAR = "regular"


# ============================================================================
# FusionModel
# ============================================================================

@dataclass(frozen=True, eq=False)
class FusionModel:
    """Labels, duals and fusion multiplicities; validated on construction."""

    name: str
    labels: Tuple[str, ...]
    dual: Dict[str, str]
    table: np.ndarray
    default_site: Site = REGULAR

    def __post_init__(self) -> None:
        labels = tuple(str(a) for a in self.labels)
        object.__setattr__(self, "labels", labels)
        table = np.asarray(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        self.validate()

    @property
    def vacuum(self) -> str:
        return self.labels[0]

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError as exc:
            raise InputError(f"unknown anyon label {label!r} in model {self.name}") from exc

    def N(self, a: str, b: str, c: str) -> int:
        return int(self.table[self.index(a), self.index(b), self.index(c)])

    def fusion_matrix(self, a: str) -> np.ndarray:
        """(N_a)[b, c] = N[a][b][c]."""
        return np.array(self.table[self.index(a)], dtype=np.int64)

    def validate(self) -> None:
        n = self.rank
        if n == 0:
            raise InputError("fusion model has no labels")
        if len(set(self.labels)) != n:
            raise InputError(f"duplicate labels in {self.labels}")
        t = self.table
        if t.shape != (n, n, n):
            raise InputError(f"fusion table of shape {t.shape} for {n} labels")
        if (t < 0).any():
            raise InputError("fusion multiplicities must be non-negative")
        if set(self.dual) != set(self.labels):
            raise InputError("dual map must name every label exactly once")
        for a, abar in self.dual.items():
            if abar not in self.labels or self.dual[abar] != a:
                raise InputError(f"dual of {a!r} is {abar!r}, which is not an involution on the labels")

        eye = np.eye(n, dtype=np.int64)
        if not (np.array_equal(t[:, 0, :], eye) and np.array_equal(t[0, :, :], eye)):
            raise InputError(f"vacuum {self.vacuum!r} is not a fusion unit")
        if not np.array_equal(t, t.transpose(1, 0, 2)):
            raise InputError("fusion rules are not commutative")
        # sum_e N[a][b][e] N[e][c][d] == sum_f N[b][c][f] N[a][f][d]
        left = np.einsum("abe,ecd->abcd", t, t)
        right = np.einsum("bcf,afd->abcd", t, t)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            raise InputError(
                "fusion rules are not associative at "
                f"({', '.join(self.labels[k] for k in bad)})"
            )
        for a in self.labels:
            if self.N(a, self.dual[a], self.vacuum) != 1:
                raise InputError(f"{a!r} and its dual do not fuse to the vacuum exactly once")

    @property
    def multiplicity_free(self) -> bool:
        return bool((self.table <= 1).all())

    @classmethod
    def from_rules(cls, name: str, labels: Sequence[str], dual: Mapping[str, str],
                   rules: Sequence[Sequence[object]], default_site: Optional[Site] = None) -> "FusionModel":
        """
        Build from listed channels [a, b, c] (multiplicity 1) or
        [a, b, c, m]. Vacuum rules and the b-a mirror of each rule are
        filled in.
        """
        labels = [str(a) for a in labels]
        if not labels:
            raise InputError("fusion model has no labels")
        pos = {a: k for k, a in enumerate(labels)}
        n = len(labels)
        table = np.zeros((n, n, n), dtype=np.int64)
        for k in range(n):
            table[0, k, k] = table[k, 0, k] = 1
        for rule in rules:
            if len(rule) not in (3, 4):
                raise InputError(f"fusion rule {rule!r} must be [a, b, c] or [a, b, c, multiplicity]")
            a, b, c = (str(x) for x in rule[:3])
            for x in (a, b, c):
                if x not in pos:
                    raise InputError(f"fusion rule {rule!r} names unknown label {x!r}")
            mult = int(rule[3]) if len(rule) == 4 else 1  # type: ignore[arg-type]
            table[pos[a], pos[b], pos[c]] = mult
            table[pos[b], pos[a], pos[c]] = mult
        return cls(name, tuple(labels), {str(k): str(v) for k, v in dual.items()}, table,
                   default_site if default_site is not None else REGULAR)

    @classmethod
    def from_document(cls, doc: Mapping[str, object], name: str = "custom") -> "FusionModel":
        """{"labels": [...], "dual": {...}, "table": [[a, b, c], ...], "site": ...}"""
        try:
            labels = doc["labels"]
            dual = doc["dual"]
            rules = doc["table"]
        except KeyError as exc:
            raise InputError(f"fusion document lacks field {exc.args[0]!r}") from exc
        site = doc.get("site")
        return cls.from_rules(str(doc.get("name", name)), labels, dual, rules, site)  # type: ignore[arg-type]


# ============================================================================
# Built-in models
# ============================================================================

def fibonacci() -> FusionModel:
    return FusionModel.from_rules(
        "fibonacci", ["1", "t"], {"1": "1", "t": "t"},
        [["t", "t", "1"], ["t", "t", "t"]], default_site="t",
    )


def trivial() -> FusionModel:
    return FusionModel("trivial", ("1",), {"1": "1"}, np.ones((1, 1, 1), dtype=np.int64), "1")


def abelian_double(N: int) -> FusionModel:
    """D(Z_N): labels (charge, flux) in Z_N x Z_N, componentwise addition."""
    if N < 1:
        raise InputError(f"Z_N needs N >= 1, got {N}")
    pairs = [(a, b) for a in range(N) for b in range(N)]
    if N == 2:
        names = {(0, 0): "1", (1, 0): "e", (0, 1): "m", (1, 1): "f"}
        name = "toric"
    else:
        names = {p: f"{p[0]},{p[1]}" for p in pairs}
        name = f"zn:{N}"
    labels = [names[p] for p in pairs]
    dual = {names[(a, b)]: names[((-a) % N, (-b) % N)] for a, b in pairs}
    rules = [
        [names[p], names[q], names[((p[0] + q[0]) % N, (p[1] + q[1]) % N)]]
        for p, q in itertools.product(pairs, repeat=2)
    ]
    return FusionModel.from_rules(name, labels, dual, rules, REGULAR)


def toric() -> FusionModel:
    return abelian_double(2)


def builtin_model(name: str) -> FusionModel:
    key = name.strip().lower()
    if key == "fibonacci":
        return fibonacci()
    if key == "toric":
        return toric()
    if key == "trivial":
        return trivial()
    if key.startswith("zn:"):
        try:
            return abelian_double(int(key[3:]))
        except ValueError as exc:
            raise InputError(f"bad Z_N model name {name!r}") from exc
    raise InputError(f"unknown built-in fusion model {name!r}")


# ============================================================================
# Quantum dimensions
# ============================================================================

@dataclass
class QuantumDims:
    dims: Dict[str, float]
    D2: float
    abelian: bool
    consistency_error: float

    def to_dict(self) -> Dict[str, object]:
        return {"dims": dict(self.dims), "D2": self.D2, "D": float(np.sqrt(self.D2)),
                "abelian": self.abelian, "consistency_error": self.consistency_error}


def quantum_dims(model: FusionModel, atol: float = 1e-9) -> QuantumDims:
    """d_a as the largest eigenvalue of N_a; D^2 = sum d_a^2."""
    dims: Dict[str, float] = {}
    for a in model.labels:
        eigenvalues = np.linalg.eigvals(model.fusion_matrix(a).astype(float))
        dims[a] = float(np.max(eigenvalues.real))
    d = np.array([dims[a] for a in model.labels])
    # sum_c N[a][b][c] d_c == d_a d_b
    error = float(np.max(np.abs(model.table @ d - np.outer(d, d)))) if model.rank else 0.0
    if error > atol:
        raise InputError(f"quantum dimensions do not satisfy the fusion rules (error {error:.3e})")
    return QuantumDims(dims, float(np.sum(d ** 2)), bool(np.allclose(d, 1.0, atol=atol)), error)


# ============================================================================
# Fusion spaces
# ============================================================================

def _site_weights(model: FusionModel, site: Site) -> List[int]:
    if isinstance(site, str):
        if site == REGULAR:
            return [1] * model.rank
        weights = [0] * model.rank
        weights[model.index(site)] = 1
        return weights
    weights = [0] * model.rank
    for label, mult in site.items():
        if int(mult) < 0:
            raise InputError(f"negative multiplicity for {label!r} in site {dict(site)}")
        weights[model.index(label)] += int(mult)
    return weights


def _site_matrix(model: FusionModel, site: Site) -> List[List[int]]:
    """T[b][c] = sum_a w_a N[b][a][c], in Python ints."""
    w = _site_weights(model, site)
    n = model.rank
    t = model.table
    return [[sum(w[a] * int(t[b, a, c]) for a in range(n)) for c in range(n)] for b in range(n)]


def _sites(model: FusionModel, n: int, site: Optional[Union[Site, Sequence[Site]]]) -> List[Site]:
    if n < 0:
        raise InputError(f"anyon count must be non-negative, got {n}")
    if site is None:
        site = model.default_site
    if isinstance(site, (str, Mapping)):
        return [site] * n
    sites = list(site)
    if len(sites) != n:
        raise InputError(f"{len(sites)} site objects for a chain of {n} anyons")
    return sites


def charge_vector(model: FusionModel, n: int, site: Optional[Union[Site, Sequence[Site]]] = None,
                  bracketing: str = "left") -> List[int]:
    """Number of fusion trees of the chain ending in each total charge."""
    sites = _sites(model, n, site)
    vec = [0] * model.rank
    vec[0] = 1
    if bracketing == "left":
        # ((s1 s2) s3) ...
        order = sites
    elif bracketing == "right":
        # s1 (s2 (s3 ...)); fusing from the right end inwards
        order = list(reversed(sites))
    else:
        raise InputError(f"bracketing must be 'left' or 'right', got {bracketing!r}")
    for s in order:
        if bracketing == "left":
            m = _site_matrix(model, s)
            vec = [sum(vec[b] * m[b][c] for b in range(model.rank)) for c in range(model.rank)]
        else:
            # new site a on the left of the accumulated charge b: N[a][b][c]
            w = _site_weights(model, s)
            t = model.table
            vec = [sum(w[a] * int(t[a, b, c]) * vec[b] for a in range(model.rank) for b in range(model.rank))
                   for c in range(model.rank)]
    return vec


def fusion_dim(model: FusionModel, n: int, total: Optional[str] = None,
               site: Optional[Union[Site, Sequence[Site]]] = None, bracketing: str = "left") -> int:
    """Fusion trees of n anyons (default site of the model) with total charge ``total``."""
    total = model.vacuum if total is None else total
    idx = model.index(total)
    return charge_vector(model, n, site, bracketing)[idx]


@dataclass
class FusionCountResult:
    model: str
    n_A: int
    n_E: int
    n_B: int
    dim_V: int
    dim_V_hat: int
    ratio: Optional[Fraction] = None
    D2: Optional[float] = None
    flags: List[str] = field(default_factory=list)

    @property
    def ratio_float(self) -> Optional[float]:
        return None if self.ratio is None else float(self.ratio)

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "model": self.model,
            "nA": self.n_A, "nE": self.n_E, "nB": self.n_B,
            "dim_V": self.dim_V,
            "dim_V_hat": self.dim_V_hat,
            "ratio": self.ratio_float,
            "flags": list(self.flags),
        }
        if self.ratio is not None:
            out["ratio_exact"] = str(self.ratio)
        if self.D2 is not None:
            out["D2"] = self.D2
        return out


def secret_ratio(model: FusionModel, n_A: int, n_E: int, n_B: int,
                 site: Optional[Site] = None) -> FusionCountResult:
    """
    dim V     = F_A(1) F_E(1) F_B(1)
    dim V-hat = sum_c F_A(c) F_E(1) F_B(c-bar)
    where F_g(c) counts fusion trees of group g with total charge c.
    """
    vac = model.index(model.vacuum)
    fa = charge_vector(model, n_A, site)
    fe = charge_vector(model, n_E, site)
    fb = charge_vector(model, n_B, site)
    dim_v = fa[vac] * fe[vac] * fb[vac]
    dim_v_hat = sum(
        fa[k] * fe[vac] * fb[model.index(model.dual[c])]
        for k, c in enumerate(model.labels)
    )
    result = FusionCountResult(model.name, n_A, n_E, n_B, dim_v, dim_v_hat)
    if dim_v == 0:
        result.flags.append("undefined-ratio")
        logger.info("secret ratio undefined: no vacuum fusion tree for (%d, %d, %d)", n_A, n_E, n_B)
    else:
        result.ratio = Fraction(dim_v_hat, dim_v)
    result.D2 = quantum_dims(model).D2
    return result
