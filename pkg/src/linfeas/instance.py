"""Linear feasibility instances and the geometric primitives shared by all solvers.

An instance is a bundle of n points (the columns) in R^d. Downstream code
works off three cached views of it: the Gram matrix, an orthonormal basis of
the column span, and convex combinations of the columns. Instances and every
derived value are immutable after construction, so they can be shared across
threads without locking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "IngestError",
    "SimplexPoint",
    "PrimalDirection",
    "ColumnSpaceBasis",
    "ProblemInstance",
    "ingest",
    "gram",
    "column_space_basis",
    "combine",
    "project_to_column_space",
    "gram_norm",
    "instance_to_dict",
    "instance_from_dict",
    "load_instance",
    "save_instance",
]

# Entries this close to zero are clamped so support sets are deterministic.
WEIGHT_CLAMP = 1e-12

# Default relative cutoff for the numerical rank of the column span.
RANK_TOL_SCALE = 1e-10


class IngestError(ValueError):
    """Raised when raw columns cannot form a valid instance."""


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(eq=False)
class SimplexPoint:
    """Probability vector over the n columns (convex combination weights)."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must form a nonempty vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < -WEIGHT_CLAMP):
            raise ValueError(f"negative weight beyond tolerance: min={w.min():.3e}")
        w[np.abs(w) <= WEIGHT_CLAMP] = 0.0
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_CLAMP:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        w /= total
        self.weights = _readonly(w)

    @classmethod
    def unit_mass(cls, n: int, index: int) -> "SimplexPoint":
        w = np.zeros(n)
        w[index] = 1.0
        return cls(w)

    @classmethod
    def from_approximate(cls, weights: Iterable[float], tol: float = 1e-9) -> "SimplexPoint":
        """Build a point from slightly-off weights (e.g. LP output or iterate drift).

        Entries in [-tol, 0) are clamped and the vector is renormalized; anything
        worse than ``tol`` is still rejected.
        """
        w = np.array(list(weights) if not isinstance(weights, np.ndarray) else weights, dtype=float)
        if np.any(w < -tol):
            raise ValueError(f"negative weight beyond repair tolerance: min={w.min():.3e}")
        w[w < 0.0] = 0.0
        total = float(w.sum())
        if not np.isfinite(total) or total <= 0.0:
            raise ValueError("weights must have positive total mass")
        return cls(w / total)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.weights)[0])


@dataclass(eq=False)
class PrimalDirection:
    """A direction w in R^d, optionally certified to lie in the column span."""

    vector: np.ndarray
    in_column_space: bool = False

    def __post_init__(self) -> None:
        v = np.array(self.vector, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("direction must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("direction must be finite")
        self.vector = _readonly(v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def unit(self) -> "PrimalDirection":
        nrm = self.norm
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero direction")
        return PrimalDirection(self.vector / nrm, in_column_space=self.in_column_space)


@dataclass(eq=False)
class ColumnSpaceBasis:
    """Orthonormal basis of the span of the columns, with the rank cutoff used."""

    basis: np.ndarray  # (d, rank), orthonormal columns
    rank: int
    tolerance: float

    def __post_init__(self) -> None:
        self.basis = _readonly(self.basis)

    def project(self, w: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(w, dtype=float))

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of d-dim vectors (columns) in the basis frame."""
        return self.basis.T @ np.asarray(vectors, dtype=float)

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.basis @ np.asarray(coords, dtype=float)


@dataclass(eq=False)
class ProblemInstance:
    """n points in R^d stored as the columns of a (d, n) array."""

    columns: np.ndarray
    name: str = "instance"
    normalized: bool = False

    def __post_init__(self) -> None:
        cols = np.array(self.columns, dtype=float)
        if cols.ndim != 2 or cols.shape[0] < 1 or cols.shape[1] < 1:
            raise IngestError("columns must form a (d, n) array with d, n >= 1")
        if not np.all(np.isfinite(cols)):
            raise IngestError("columns must have finite entries")
        if self.normalized:
            norms = np.linalg.norm(cols, axis=0)
            if np.any(np.abs(norms - 1.0) > 1e-12):
                raise IngestError("normalized flag set but columns are not unit length")
        self.columns = _readonly(cols)

    @property
    def d(self) -> int:
        return int(self.columns.shape[0])

    @property
    def n(self) -> int:
        return int(self.columns.shape[1])

    def column(self, i: int) -> np.ndarray:
        return self.columns[:, i]

    @cached_property
    def gram(self) -> np.ndarray:
        g = self.columns.T @ self.columns
        g = 0.5 * (g + g.T)
        return _readonly(g)

    @cached_property
    def basis(self) -> ColumnSpaceBasis:
        return _compute_basis(self.columns, self.default_rank_tol)

    @property
    def default_rank_tol(self) -> float:
        return RANK_TOL_SCALE * float(np.linalg.norm(self.columns, axis=0).max())

    @property
    def rank(self) -> int:
        return self.basis.rank

    def has_unit_columns(self, tol: float = 1e-9) -> bool:
        norms = np.linalg.norm(self.columns, axis=0)
        return bool(np.all(np.abs(norms - 1.0) <= tol))


def _compute_basis(columns: np.ndarray, tol: float) -> ColumnSpaceBasis:
    """Rank-revealing orthogonalization with greedy pivoting on residual norms."""
    if tol <= 0.0:
        raise ValueError("rank tolerance must be positive")
    d, n = columns.shape
    work = columns.copy()
    vectors: list[np.ndarray] = []
    for _ in range(min(d, n)):
        norms = np.linalg.norm(work, axis=0)
        j = int(np.argmax(norms))
        if norms[j] <= tol:
            break
        q = work[:, j] / norms[j]
        # one re-orthogonalization pass keeps the basis clean at desk scale
        for b in vectors:
            q = q - (b @ q) * b
        qn = np.linalg.norm(q)
        if qn <= tol:
            break
        q /= qn
        vectors.append(q)
        work -= np.outer(q, q @ work)
    if vectors:
        basis = np.column_stack(vectors)
    else:
        basis = np.zeros((d, 0))
    return ColumnSpaceBasis(basis=basis, rank=len(vectors), tolerance=tol)


def ingest(
    raw_columns: Sequence[Sequence[float]],
    normalize: bool = True,
    name: str = "instance",
) -> ProblemInstance:
    """Build an instance from a list of column vectors.

    With ``normalize`` set (the default), every column is rescaled to unit
    Euclidean norm; zero columns are rejected by index since they cannot be
    rescaled.
    """
    if len(raw_columns) == 0:
        raise IngestError("need at least one column")
    lengths = {len(col) for col in raw_columns}
    if len(lengths) != 1:
        raise IngestError(f"ragged column dimensions: {sorted(lengths)}")
    cols = np.array(raw_columns, dtype=float).T  # outer list indexes columns
    if not np.all(np.isfinite(cols)):
        raise IngestError("columns must have finite entries")
    if normalize:
        norms = np.linalg.norm(cols, axis=0)
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise IngestError(f"cannot normalize zero column at index {int(zero[0])}")
        cols = cols / norms
    return ProblemInstance(columns=cols, name=name, normalized=normalize)


def gram(instance: ProblemInstance) -> np.ndarray:
    """The n-by-n matrix of pairwise column dot products (cached)."""
    return instance.gram


def column_space_basis(instance: ProblemInstance, tol: float | None = None) -> ColumnSpaceBasis:
    """Orthonormal basis of the column span at the given rank cutoff.

    The default cutoff is the instance-scaled one; passing ``tol`` recomputes
    the basis, since the reported rank (and hence the negative margin) can be
    sensitive to it.
    """
    if tol is None:
        return instance.basis
    return _compute_basis(instance.columns, tol)


def combine(instance: ProblemInstance, p: SimplexPoint | np.ndarray) -> np.ndarray:
    """The point of the convex hull selected by the weights: columns @ p."""
    w = p.weights if isinstance(p, SimplexPoint) else np.asarray(p, dtype=float)
    if w.shape != (instance.n,):
        raise ValueError(f"weights have shape {w.shape}, expected ({instance.n},)")
    return instance.columns @ w


def project_to_column_space(instance: ProblemInstance, w: np.ndarray) -> PrimalDirection:
    """Orthogonal projection of w onto the span of the columns."""
    w = np.asarray(w, dtype=float)
    if w.shape != (instance.d,):
        raise ValueError(f"vector has shape {w.shape}, expected ({instance.d},)")
    return PrimalDirection(instance.basis.project(w), in_column_space=True)


def gram_norm(instance: ProblemInstance, alpha: np.ndarray) -> float:
    """The seminorm sqrt(alpha' G alpha), equal to the norm of columns @ alpha."""
    alpha = np.asarray(alpha, dtype=float)
    value = float(alpha @ (instance.gram @ alpha))
    return float(np.sqrt(max(value, 0.0)))


def instance_to_dict(instance: ProblemInstance) -> dict:
    return {
        "name": instance.name,
        "columns": [list(map(float, instance.columns[:, i])) for i in range(instance.n)],
        "normalize": bool(instance.normalized),
    }


def instance_from_dict(payload: dict) -> ProblemInstance:
    try:
        columns = payload["columns"]
    except KeyError as exc:
        raise IngestError("instance payload is missing 'columns'") from exc
    return ingest(
        columns,
        normalize=bool(payload.get("normalize", True)),
        name=str(payload.get("name", "instance")),
    )


def load_instance(path: str | Path) -> ProblemInstance:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return instance_from_dict(payload)


def save_instance(
    instance: ProblemInstance,
    path: str | Path,
    metadata: dict | None = None,
) -> Path:
    payload = instance_to_dict(instance)
    if metadata is not None:
        payload["metadata"] = metadata
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
