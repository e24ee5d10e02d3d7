"""Independent brute-force oracles for the test suite.

Nothing here shares code with the library paths it checks: distances come
from dense parameter grids, LP answers from exhaustive basic-solution
enumeration. Slow and exact at tiny sizes, which is the point.
"""

from __future__ import annotations

import itertools

import numpy as np


def segment_min_norm(a: np.ndarray, b: np.ndarray, step: float = 1e-6) -> float:
    """min ||t a + (1-t) b|| over a dense grid of t in [0, 1]."""
    ts = np.arange(0.0, 1.0 + step, step)
    points = np.outer(ts, a) + np.outer(1.0 - ts, b)
    return float(np.linalg.norm(points, axis=1).min())


def angular_margin(columns_2d: np.ndarray, count: int = 360_000) -> float:
    """sup over a dense angle grid of min_i w . a_i, for 2-dimensional columns."""
    angles = 2.0 * np.pi * np.arange(count) / count
    grid = np.column_stack([np.cos(angles), np.sin(angles)])
    return float((grid @ columns_2d).min(axis=1).max())


def _independent_rows(matrix: np.ndarray, tol: float = 1e-9) -> list[int]:
    "Indices of a maximal set of linearly independent rows (greedy Gram-Schmidt)."
    kept: list[int] = []
    basis: list[np.ndarray] = []
    for i in range(matrix.shape[0]):
        residual = matrix[i].astype(float).copy()
        for q in basis:
            residual -= (q @ matrix[i]) * q
        norm = np.linalg.norm(residual)
        if norm > tol * max(1.0, np.linalg.norm(matrix[i])):
            basis.append(residual / norm)
            kept.append(i)
    return kept


def enumerate_standard_form(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    tol: float = 1e-9,
) -> tuple[str, float | None]:
    """Solve min c@x, Ax = b, x >= 0 by enumerating basic solutions.

    Redundant rows are dropped first (an inconsistent redundancy is an
    immediate infeasibility), so square bases exist whenever the system is
    consistent. Conclusive for bounded feasible regions (the optimum sits at
    a vertex); the caller is responsible for ensuring boundedness. Returns
    ("infeasible", None) when no basic feasible solution exists, which
    settles feasibility because the standard-form cone is pointed.
    """
    keep = _independent_rows(A)
    if len(_independent_rows(np.hstack([A, b[:, None]]))) > len(keep):
        return "infeasible", None
    A = A[keep]
    b = b[keep]
    m, n = A.shape
    best = None
    for cols in itertools.combinations(range(n), min(m, n)):
        sub = A[:, cols]
        try:
            x_sub = np.linalg.solve(sub, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x_sub)):
            continue
        if np.max(np.abs(sub @ x_sub - b)) > 1e-7:
            continue
        if np.any(x_sub < -tol):
            continue
        x = np.zeros(n)
        x[list(cols)] = np.clip(x_sub, 0.0, None)
        if np.max(np.abs(A @ x - b)) > 1e-7:
            continue
        value = float(c @ x)
        if best is None or value < best:
            best = value
    if best is None:
        return "infeasible", None
    return "optimal", best


def halfplane_projection_grid(
    point: np.ndarray,
    normals: np.ndarray,
    offsets: np.ndarray,
    span: float = 6.0,
    resolution: int = 2001,
) -> float:
    """Euclidean distance to {y | normals.T y >= offsets} by a dense 2-d grid."""
    assert point.size == 2
    xs = np.linspace(point[0] - span, point[0] + span, resolution)
    ys = np.linspace(point[1] - span, point[1] + span, resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    feasible = np.all(pts @ normals >= offsets[None, :] - 1e-12, axis=1)
    if not feasible.any():
        return np.inf
    return float(np.linalg.norm(pts[feasible] - point[None, :], axis=1).min())
