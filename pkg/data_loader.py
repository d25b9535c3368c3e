# data_loader.py

"""
Helpers for reading input documents from disk.

Two document kinds:
- layout documents: lattice plus one named region layout
    {"geometry": "torus", "L": 8,
     "layout": {"kind": "two-blob", "centers": [[0, 0], [4, 4]], "radius": 1}}
- fusion-model documents
    {"labels": ["1", "t"], "dual": {"1": "1", "t": "t"},
     "table": [["t", "t", "1"], ["t", "t", "t"]]}

Both are plain JSON. Malformed files raise InputError so the CLI can
exit with status 2.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from errors import InputError
from fusion import FusionModel, builtin_model
from lattice import Lattice, RegionLayout, build_lattice, make_layout

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    """Parse a JSON file, reporting missing or malformed files as input errors."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file does not exist: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# ============================================================================
# Layout documents
# ============================================================================

@dataclass
class LayoutDocument:
    """Parsed layout document; every field except kind may be omitted."""

    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    geometry: Optional[str] = None
    L: Optional[int] = None
    source: Optional[Path] = None

    @classmethod
    def from_mapping(cls, doc: Mapping[str, Any], source: Optional[Path] = None) -> "LayoutDocument":
        if not isinstance(doc, Mapping):
            raise InputError("layout document must be a JSON object")
        layout = doc.get("layout")
        if not isinstance(layout, Mapping) or "kind" not in layout:
            raise InputError("layout document needs a 'layout' object with a 'kind'")
        params = {k: v for k, v in layout.items() if k != "kind"}
        L = doc.get("L")
        if L is not None and (not isinstance(L, int) or isinstance(L, bool)):
            raise InputError(f"L must be an integer, got {L!r}")
        return cls(str(layout["kind"]), params, doc.get("geometry"), L, source)

    def build(self, geometry: Optional[str] = None, L: Optional[int] = None) -> Tuple[Lattice, RegionLayout]:
        """Lattice and layout; the document's geometry and L win over the fallbacks."""
        geometry = self.geometry or geometry
        L = self.L if self.L is not None else L
        if geometry is None or L is None:
            raise InputError("layout document gives no lattice and none was supplied")
        lat = build_lattice(geometry, L)
        return lat, make_layout(lat, self.kind, self.params)


def load_layout_document(path: PathLike) -> LayoutDocument:
    path = Path(path)
    doc = LayoutDocument.from_mapping(read_json(path), source=path)
    logger.debug("layout %s from %s", doc.kind, path)
    return doc


# ============================================================================
# Fusion-model documents
# ============================================================================

def load_fusion_model(name_or_path: PathLike) -> FusionModel:
    """
    A built-in model by name ("fibonacci", "toric", "zn:3", ...) or a
    model read from a JSON file.
    """
    text = str(name_or_path)
    path = Path(text)
    if path.suffix.lower() == ".json" or path.is_file():
        doc = read_json(path)
        if not isinstance(doc, Mapping):
            raise InputError(f"{path}: fusion document must be a JSON object")
        model = FusionModel.from_document(doc, name=path.stem)
        logger.debug("fusion model %s from %s (%d labels)", model.name, path, model.rank)
        return model
    return builtin_model(text)
