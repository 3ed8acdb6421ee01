"""Dataset ingestion, normalization, synthetic benchmark generators and
model persistence.

CSV layout: one sample per row, comma separated, optional single header row
(auto-detected when the first row is non-numeric); when labels are present
they occupy the last column as integers.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._util import atomic_write_text
from .errors import CsvParseError, InvalidInputError, ModelSchemaError
from .model import Dataset, Hypergraph, Simplicial

SYNTHETIC_KINDS = (
    "cluster-in-cluster",
    "two-spirals",
    "half-kernel",
    "crescent-full-moon",
    "corners",
    "outliers",
)

# Four-class generators; the rest are binary.
_FOUR_CLASS = {"corners", "outliers"}


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-feature affine map recorded from training data.

    ``minmax`` maps each feature to [0, 1] via (x - offset) / scale with
    offset = min and scale = max - min; ``zscore`` uses mean and standard
    deviation. Degenerate features (scale 0) map to 0 and invert back to
    their constant value.
    """

    mode: str
    offset: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if self.mode not in ("minmax", "zscore"):
            raise InvalidInputError(f"unknown normalization mode {self.mode!r}")

    def transform(self, points: np.ndarray) -> np.ndarray:
        safe = np.where(self.scale == 0.0, 1.0, self.scale)
        out = (points - self.offset[:, None]) / safe[:, None]
        out[self.scale == 0.0, :] = 0.0
        return out

    def inverse(self, points: np.ndarray) -> np.ndarray:
        return points * self.scale[:, None] + self.offset[:, None]


def normalize(data: Dataset, mode: str = "minmax") -> tuple[Dataset, NormalizationSpec]:
    """Fit a normalization on the data and apply it."""
    pts = data.points
    if mode == "minmax":
        offset = pts.min(axis=1)
        scale = pts.max(axis=1) - offset
    elif mode == "zscore":
        offset = pts.mean(axis=1)
        scale = pts.std(axis=1)
    else:
        raise InvalidInputError(f"unknown normalization mode {mode!r}")
    spec = NormalizationSpec(mode, offset, scale)
    return apply_normalization(spec, data), spec


def apply_normalization(spec: NormalizationSpec, data: Dataset) -> Dataset:
    """Apply a previously fitted normalization (e.g. to test data; values
    may leave [0, 1])."""
    if spec.offset.shape[0] != data.dim:
        raise InvalidInputError("normalization was fitted for a different dimension")
    return Dataset(spec.transform(data.points), data.labels)


# --- CSV -------------------------------------------------------------------


def _is_numeric_row(row: list[str]) -> bool:
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return False
    return True


def load_csv(path: str, has_labels: bool = False) -> Dataset:
    """Load samples (and optionally labels) from a CSV file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    except OSError as exc:
        raise CsvParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise CsvParseError(f"{path}: file contains no data rows")
    if not _is_numeric_row(rows[0][1]):
        rows = rows[1:]
        if not rows:
            raise CsvParseError(f"{path}: only a header row present")
    width = len(rows[0][1])
    if has_labels and width < 2:
        raise CsvParseError(f"{path}: need at least one feature column plus labels")
    values = np.empty((len(rows), width))
    for r, (line_no, row) in enumerate(rows):
        if len(row) != width:
            raise CsvParseError(
                f"{path}: row {line_no} has {len(row)} fields, expected {width}"
            )
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise CsvParseError(
                    f"{path}: row {line_no}, column {c + 1}: non-numeric value {cell!r}"
                ) from None
    if not has_labels:
        return Dataset(values.T)
    raw_labels = values[:, -1]
    labels = raw_labels.astype(int)
    if not np.array_equal(labels, raw_labels):
        bad = int(np.nonzero(labels != raw_labels)[0][0])
        raise CsvParseError(
            f"{path}: row {rows[bad][0]}: label column must hold integers"
        )
    return Dataset(values[:, :-1].T, labels)


def save_csv(data: Dataset, path: str) -> None:
    """Write a dataset as CSV with a generated header; labels go last."""
    header = [f"x{i}" for i in range(data.dim)]
    if data.labels is not None:
        header.append("label")
    lines = [",".join(header)]
    for i in range(data.n_samples):
        cells = [repr(float(v)) for v in data.points[:, i]]
        if data.labels is not None:
            cells.append(str(int(data.labels[i])))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


# --- synthetic generators ----------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic 2-D benchmark set."""

    kind: str
    n_per_class: int
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise InvalidInputError(
                f"unknown kind {self.kind!r}; valid kinds: {', '.join(SYNTHETIC_KINDS)}"
            )
        if self.n_per_class < 1:
            raise InvalidInputError("n_per_class must be positive")
        if self.noise < 0:
            raise InvalidInputError("noise must be non-negative")
        if self.seed < 0:
            raise InvalidInputError("seed must be non-negative")

    @property
    def n_classes(self) -> int:
        return 4 if self.kind in _FOUR_CLASS else 2


def _gen_cluster_in_cluster(n, rng):
    # Tight inner blob (radius capped) inside a uniform annulus.
    inner = rng.normal(scale=0.5, size=(2, n))
    norms = np.linalg.norm(inner, axis=0)
    inner *= np.minimum(1.0, 1.3 / np.maximum(norms, 1e-12))
    angle = rng.uniform(0.0, 2.0 * math.pi, n)
    radius = rng.uniform(2.0, 3.0, n)
    outer = np.vstack([radius * np.cos(angle), radius * np.sin(angle)])
    return [inner, outer]


def _gen_two_spirals(n, rng):
    # Archimedean arm, second class rotated half a turn. The sqrt draw
    # thins the sampling near the origin where both arms converge.
    growth = 3.0 / (3.0 * math.pi)
    classes = []
    for _ in range(2):
        theta = 3.0 * math.pi * np.sqrt(rng.uniform(0.0, 1.0, n))
        radius = growth * theta
        classes.append(np.vstack([radius * np.cos(theta), radius * np.sin(theta)]))
    classes[1] = -classes[1]
    return classes

def _gen_half_kernel(n, rng):
    # Two concentric half-annuli opening the same way.
    classes = []
    for lo, hi in ((0.7, 1.3), (2.2, 2.8)):
        angle = rng.uniform(0.0, math.pi, n)
        radius = rng.uniform(lo, hi, n)
        classes.append(np.vstack([radius * np.cos(angle), radius * np.sin(angle)]))
    return classes


def _gen_crescent_full_moon(n, rng):
    disc_r = np.sqrt(rng.uniform(0.0, 1.0, n))
    disc_a = rng.uniform(0.0, 2.0 * math.pi, n)
    disc = np.vstack([disc_r * np.cos(disc_a), disc_r * np.sin(disc_a)])
    arc_a = rng.uniform(0.0, math.pi, n)
    arc_r = rng.uniform(2.0, 2.8, n)
    crescent = np.vstack([arc_r * np.cos(arc_a), arc_r * np.sin(arc_a)])
    return [disc, crescent]


def _gen_corners(n, rng):
    # Base L-strip in the first quadrant, rotated by 90 degrees per class.
    classes = []
    for q in range(4):
        horizontal = rng.random(n) < 0.5
        x = np.where(horizontal, rng.uniform(0.5, 2.5, n), rng.uniform(0.5, 0.8, n))
        y = np.where(horizontal, rng.uniform(0.5, 0.8, n), rng.uniform(0.5, 2.5, n))
        pts = np.vstack([x, y])
        for _ in range(q):
            pts = np.vstack([-pts[1], pts[0]])
        classes.append(pts)
    return classes


def _gen_outliers(n, rng):
    # Dense corner-cluster pairs (left and right corners) far from two
    # sparse uniform background strips along the vertical axis; the strips
    # never reach the corners, so their hulls stay clear of the clusters.
    left = [(-2.4, -2.4), (-2.4, 2.4)]
    right = [(2.4, -2.4), (2.4, 2.4)]
    classes = []
    for centers in (left, right):
        counts = [n - n // 2, n // 2]
        parts = [
            np.array(c)[:, None] + rng.normal(scale=0.15, size=(2, cnt))
            for c, cnt in zip(centers, counts)
        ]
        classes.append(np.column_stack(parts))
    for y_lo, y_hi in ((0.0, 3.0), (-3.0, 0.0)):
        classes.append(
            np.vstack([rng.uniform(-0.8, 0.8, n), rng.uniform(y_lo, y_hi, n)])
        )
    return classes


_GENERATORS = {
    "cluster-in-cluster": _gen_cluster_in_cluster,
    "two-spirals": _gen_two_spirals,
    "half-kernel": _gen_half_kernel,
    "crescent-full-moon": _gen_crescent_full_moon,
    "corners": _gen_corners,
    "outliers": _gen_outliers,
}


def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """Generate one of the six synthetic 2-D benchmark sets.

    Deterministic for a fixed spec; every class has exactly ``n_per_class``
    points; ``noise`` adds isotropic Gaussian jitter on top.
    """
    rng = np.random.default_rng(spec.seed)
    classes = _GENERATORS[spec.kind](spec.n_per_class, rng)
    points = np.column_stack(classes)
    if spec.noise > 0:
        points = points + rng.normal(scale=spec.noise, size=points.shape)
    labels = np.repeat(np.arange(len(classes)), spec.n_per_class)
    return Dataset(points, labels)


def build_mnist8(images: Dataset, scale: float = 0.25) -> Dataset:
    """Bright/pale intensity pair from digit images with pixels in [0, 1].

    The originals are labeled 1 (bright); dimmed copies (pixel * scale) are
    labeled 0 (pale). Both classes span the same pixel subspace, differing
    only in magnitude.
    """
    if not (0.0 < scale < 1.0):
        raise InvalidInputError("scale must lie strictly between 0 and 1")
    pts = images.points
    if pts.min() < 0.0 or pts.max() > 1.0:
        raise InvalidInputError("pixel values must lie in [0, 1]")
    n = images.n_samples
    points = np.column_stack([pts, pts * scale])
    labels = np.concatenate([np.ones(n, dtype=int), np.zeros(n, dtype=int)])
    return Dataset(points, labels)


# --- model persistence -------------------------------------------------------


def _norm_to_json(spec: Optional[NormalizationSpec]):
    if spec is None:
        return None
    # Any per-feature affine map is stored as pseudo min/max so the schema
    # stays mode-independent: apply = (x - min) / (max - min).
    return {
        "mode": spec.mode,
        "min": [float(v) for v in spec.offset],
        "max": [float(v) for v in spec.offset + spec.scale],
    }


def _norm_from_json(doc) -> Optional[NormalizationSpec]:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ModelSchemaError("field 'normalization' must be an object or null")
    for key in ("mode", "min", "max"):
        if key not in doc:
            raise ModelSchemaError(f"field 'normalization.{key}' is missing")
    lo = np.asarray(doc["min"], dtype=float)
    hi = np.asarray(doc["max"], dtype=float)
    if lo.ndim != 1 or lo.shape != hi.shape:
        raise ModelSchemaError("fields 'normalization.min'/'max' must be equal-length arrays")
    return NormalizationSpec(str(doc["mode"]), lo, hi - lo)


def save_model(
    s: Simplicial,
    path: str,
    normalization: Optional[NormalizationSpec] = None,
    meta: Optional[dict] = None,
) -> None:
    """Serialize a simplicial (plus optional normalization and metadata) as
    a single JSON document with round-trip float precision."""
    meta = dict(meta or {})
    meta.setdefault("beta", 0.05)
    meta.setdefault("gamma", 10.0)
    meta.setdefault("seed", 0)
    doc = {
        "dim": s.dim,
        "vertices": [[float(v) for v in s.vertices[:, j]] for j in range(s.vertex_count)],
        "hyperedges": [list(edge) for edge in s.hypergraph.edges],
        "normalization": _norm_to_json(normalization),
        "meta": {"beta": float(meta["beta"]), "gamma": float(meta["gamma"]),
                 "seed": int(meta["seed"])},
    }
    atomic_write_text(path, json.dumps(doc) + "\n")


def load_model_document(path: str) -> tuple[Simplicial, Optional[NormalizationSpec], dict]:
    """Parse and validate a model file; returns (simplicial, normalization,
    meta). Raises ModelSchemaError naming the bad field."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelSchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelSchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelSchemaError("model document must be a JSON object")
    for key in ("dim", "vertices", "hyperedges"):
        if key not in doc:
            raise ModelSchemaError(f"field {key!r} is missing")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ModelSchemaError("field 'dim' must be a positive integer")
    rows = doc["vertices"]
    if not isinstance(rows, list) or not rows:
        raise ModelSchemaError("field 'vertices' must be a non-empty array")
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ModelSchemaError(f"field 'vertices[{j}]' must hold {dim} floats")
    try:
        vertices = np.asarray(rows, dtype=float).T
    except (TypeError, ValueError):
        raise ModelSchemaError("field 'vertices' must hold numbers") from None
    edges = doc["hyperedges"]
    if not isinstance(edges, list) or not edges:
        raise ModelSchemaError("field 'hyperedges' must be a non-empty array")
    for j, edge in enumerate(edges):
        if not isinstance(edge, list) or not edge:
            raise ModelSchemaError(f"field 'hyperedges[{j}]' must be a non-empty array")
        for i in edge:
            if not isinstance(i, int) or i < 0 or i >= len(rows):
                raise ModelSchemaError(
                    f"field 'hyperedges[{j}]' has vertex index {i!r} outside "
                    f"[0, {len(rows)})"
                )
    try:
        simplicial = Simplicial(vertices, Hypergraph(tuple(tuple(e) for e in edges), len(rows)))
    except InvalidInputError as exc:
        raise ModelSchemaError(f"invalid model structure: {exc}") from exc
    norm = _norm_from_json(doc.get("normalization"))
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise ModelSchemaError("field 'meta' must be an object")
    return simplicial, norm, meta


def load_model(path: str) -> Simplicial:
    """Load just the simplicial from a model file."""
    return load_model_document(path)[0]
