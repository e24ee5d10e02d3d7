"""Dense two-phase simplex and the distance subroutines built on it.

Desk scale only: tableaus are small dense arrays and exactness of the
reported status matters more than speed. The pivot loop starts with the
most-negative-reduced-cost rule and falls back to Bland's rule once the
count of degenerate pivots suggests stalling, which guarantees termination.
All tolerances live in one record so callers (and tests) can tighten them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LpSizeError",
    "DegenerateFaceError",
    "LpTolerances",
    "LinearProgram",
    "LpSolution",
    "solve",
    "dist_l1_to_polyhedron",
    "dist_l2_to_halfspaces",
    "min_norm_on_face",
    "batched_solve",
    "DEFAULT_TOLERANCES",
]

SIZE_BUDGET = 100  # max variables and max rows accepted by solve()


class LpSizeError(ValueError):
    """Raised when a program exceeds the desk-scale size budget."""


class DegenerateFaceError(RuntimeError):
    """Raised when the bordered system of a face subproblem is singular."""


@dataclass(frozen=True)
class LpTolerances:
    feasibility: float = 1e-9
    reduced_cost: float = 1e-9
    pivot: float = 1e-11


DEFAULT_TOLERANCES = LpTolerances()

Bound = tuple[float | None, float | None]


@dataclass
class LinearProgram:
    """min objective @ x subject to equality rows, inequality rows (<=), and bounds.

    Bounds default to (0, None) per variable; ``None`` means unbounded on
    that side.
    """

    objective: np.ndarray
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ub_matrix: np.ndarray | None = None
    ub_rhs: np.ndarray | None = None
    bounds: list[Bound] | None = None


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective_value: float | None = None
    basis: list[int] | None = None
    ray: np.ndarray | None = None  # certificate direction when unbounded


def _as_matrix(m, rhs, n, label):
    if m is None:
        return np.zeros((0, n)), np.zeros(0)
    m = np.asarray(m, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if m.ndim != 2 or m.shape[1] != n or rhs.shape != (m.shape[0],):
        raise ValueError(f"inconsistent {label} block: matrix {m.shape}, rhs {rhs.shape}")
    return m, rhs


def _standardize(lp: LinearProgram):
    """Rewrite as min c@y, A y = b, y >= 0 plus an affine map back to x."""
    c = np.asarray(lp.objective, dtype=float)
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise ValueError("objective must be a finite vector")
    n = c.size
    eq, eq_rhs = _as_matrix(lp.eq_matrix, lp.eq_rhs, n, "equality")
    ub, ub_rhs = _as_matrix(lp.ub_matrix, lp.ub_rhs, n, "inequality")
    bounds = lp.bounds if lp.bounds is not None else [(0.0, None)] * n
    if len(bounds) != n:
        raise ValueError("bounds length must match the number of variables")

    offsets = np.zeros(n)
    var_map: list[tuple[int, float]] = []  # standard var -> (original var, sign)
    caps: list[tuple[int, float]] = []  # (standard var, upper cap) rows
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            offsets[j] = lo
            var_map.append((j, 1.0))
            if hi is not None:
                if hi < lo - 1e-15:
                    return None  # contradictory bounds: trivially infeasible
                caps.append((len(var_map) - 1, hi - lo))
        elif hi is not None:
            offsets[j] = hi
            var_map.append((j, -1.0))
        else:
            var_map.append((j, 1.0))
            var_map.append((j, -1.0))

    width = len(var_map)
    T = np.zeros((n, width))
    for k, (j, sign) in enumerate(var_map):
        T[j, k] = sign

    eq_std = eq @ T
    eq_rhs_std = eq_rhs - eq @ offsets
    ub_rows = [ub @ T] if ub.shape[0] else []
    ub_rhs_parts = [ub_rhs - ub @ offsets] if ub.shape[0] else []
    if caps:
        cap_rows = np.zeros((len(caps), width))
        for r, (k, _) in enumerate(caps):
            cap_rows[r, k] = 1.0
        ub_rows.append(cap_rows)
        ub_rhs_parts.append(np.array([cap for _, cap in caps]))
    ub_std = np.vstack(ub_rows) if ub_rows else np.zeros((0, width))
    ub_rhs_std = np.concatenate(ub_rhs_parts) if ub_rhs_parts else np.zeros(0)

    m_eq, m_ub = eq_std.shape[0], ub_std.shape[0]
    total = width + m_ub
    A = np.zeros((m_eq + m_ub, total))
    A[:m_eq, :width] = eq_std
    A[m_eq:, :width] = ub_std
    A[m_eq:, width:] = np.eye(m_ub)
    b = np.concatenate([eq_rhs_std, ub_rhs_std])
    c_std = np.concatenate([T.T @ c, np.zeros(m_ub)])
    const = float(c @ offsets)
    return A, b, c_std, T, offsets, const, width


def _pivot(tableau: np.ndarray, crow: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row])
    crow -= crow[col] * tableau[row]


def _pivot_loop(tableau, basis, crow, ncols, tol, degenerate_threshold, max_pivots):
    """Run simplex pivots until optimal or unbounded. Returns (status, entering)."""
    m = tableau.shape[0]
    degenerate = 0
    bland = False
    for _ in range(max_pivots):
        reduced = crow[:ncols]
        if bland:
            eligible = np.nonzero(reduced < -tol.reduced_cost)[0]
            if eligible.size == 0:
                return "optimal", -1
            col = int(eligible[0])
        else:
            col = int(np.argmin(reduced)) if ncols else 0
            if ncols == 0 or reduced[col] >= -tol.reduced_cost:
                return "optimal", -1
        column = tableau[:, col]
        positive = column > tol.pivot
        if not positive.any():
            return "unbounded", col
        ratios = np.full(m, np.inf)
        ratios[positive] = tableau[positive, -1] / column[positive]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))[0]
        # leaving-variable tie-break by smallest basis label (Bland-compatible)
        row = int(min(ties, key=lambda r: basis[r]))
        if best <= tol.feasibility:
            degenerate += 1
            if degenerate > degenerate_threshold:
                bland = True
        _pivot(tableau, crow, row, col)
        basis[row] = col
    raise RuntimeError("simplex did not terminate within the pivot budget")


def _two_phase(A, b, c, tol, max_pivots):
    """Solve min c@y, A y = b, y >= 0. Returns (status, y, basis, ray)."""
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # phase 1: artificial identity basis minimizing total infeasibility
    tableau = np.hstack([A, np.eye(m), b[:, None]])
    basis = list(range(n, n + m))
    crow = np.concatenate([np.zeros(n), np.ones(m), [0.0]])
    for i in range(m):
        crow -= tableau[i]  # basic artificial cost is 1
    threshold = 50 * (m + n + m)
    status, _ = _pivot_loop(tableau, basis, crow, n + m, tol, threshold, max_pivots)
    if status != "optimal":
        raise RuntimeError("phase-1 subproblem cannot be unbounded")
    if -crow[-1] > tol.feasibility:
        return "infeasible", None, None, None

    # drive leftover artificials out of the basis; all-zero rows are redundant
    drop_rows: list[int] = []
    for i in range(m):
        if basis[i] >= n:
            candidates = np.nonzero(np.abs(tableau[i, :n]) > tol.pivot)[0]
            if candidates.size:
                _pivot(tableau, crow, i, int(candidates[0]))
                basis[i] = int(candidates[0])
            else:
                drop_rows.append(i)
    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        tableau = tableau[keep]
        basis = [basis[i] for i in keep]
        m = len(keep)

    # phase 2 on the original objective, artificial columns removed
    tableau = np.hstack([tableau[:, :n], tableau[:, -1:]])
    crow = np.concatenate([c, [0.0]])
    for i in range(m):
        crow -= crow[basis[i]] * tableau[i]
    threshold = 50 * (m + n)
    status, entering = _pivot_loop(tableau, basis, crow, n, tol, threshold, max_pivots)
    if status == "unbounded":
        ray = np.zeros(n)
        ray[entering] = 1.0
        for i in range(m):
            ray[basis[i]] = -tableau[i, entering]
        return "unbounded", None, basis, ray
    y = np.zeros(n)
    for i in range(m):
        y[basis[i]] = tableau[i, -1]
    return "optimal", y, basis, None


def solve(
    lp: LinearProgram,
    tolerances: LpTolerances = DEFAULT_TOLERANCES,
    max_pivots: int = 1_000_000,
) -> LpSolution:
    """Two-phase dense simplex over the general-form program."""
    c = np.asarray(lp.objective, dtype=float)
    n = c.size
    rows = 0
    if lp.eq_matrix is not None:
        rows += np.asarray(lp.eq_matrix).shape[0]
    if lp.ub_matrix is not None:
        rows += np.asarray(lp.ub_matrix).shape[0]
    if n > SIZE_BUDGET or rows > SIZE_BUDGET:
        raise LpSizeError(f"program size {n} vars / {rows} rows exceeds budget {SIZE_BUDGET}")

    packed = _standardize(lp)
    if packed is None:
        return LpSolution(status="infeasible")
    A, b, c_std, T, offsets, const, width = packed
    status, y, basis, ray = _two_phase(A, b, c_std, tolerances, max_pivots)
    if status == "infeasible":
        return LpSolution(status="infeasible")
    if status == "unbounded":
        return LpSolution(status="unbounded", basis=basis, ray=T @ ray[:width])
    x = offsets + T @ y[:width]
    return LpSolution(
        status="optimal",
        x=x,
        objective_value=float(c @ x),
        basis=basis,
    )


def dist_l1_to_polyhedron(
    x0: np.ndarray,
    eq_matrix: np.ndarray,
    eq_rhs: np.ndarray,
    nonneg: bool = True,
    tolerances: LpTolerances = DEFAULT_TOLERANCES,
) -> tuple[float, np.ndarray]:
    """l1 distance from x0 to {x | eq_matrix x = eq_rhs (, x >= 0)}.

    Uses the standard split-variable program over (x, u, v) with x - u + v = x0
    and objective sum(u) + sum(v). Raises ValueError when the target set is
    empty.
    """
    x0 = np.asarray(x0, dtype=float)
    A = np.asarray(eq_matrix, dtype=float)
    b = np.asarray(eq_rhs, dtype=float)
    m, n = A.shape
    if x0.shape != (n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({n},)")
    objective = np.concatenate([np.zeros(n), np.ones(2 * n)])
    block = np.zeros((m + n, 3 * n))
    block[:m, :n] = A
    block[m:, :n] = np.eye(n)
    block[m:, n : 2 * n] = -np.eye(n)
    block[m:, 2 * n :] = np.eye(n)
    rhs = np.concatenate([b, x0])
    x_bound: Bound = (0.0, None) if nonneg else (None, None)
    bounds = [x_bound] * n + [(0.0, None)] * (2 * n)
    lp = LinearProgram(objective=objective, eq_matrix=block, eq_rhs=rhs, bounds=bounds)
    sol = solve(lp, tolerances)
    if sol.status != "optimal":
        raise ValueError(f"target polyhedron is empty (status {sol.status})")
    return float(sol.objective_value), sol.x[:n]


def min_norm_on_face(columns: np.ndarray) -> tuple[float, np.ndarray]:
    """min ||columns @ q|| subject to sum(q) = 1, via the bordered Gram system.

    The returned weights may carry negative entries; callers filter. Raises
    DegenerateFaceError when the face is affinely dependent (singular system).
    """
    columns = np.asarray(columns, dtype=float)
    if columns.ndim != 2 or columns.shape[1] == 0:
        raise ValueError("columns must form a (d, k) array with k >= 1")
    k = columns.shape[1]
    G = columns.T @ columns
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = 2.0 * G
    system[:k, k] = 1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateFaceError("affinely dependent face") from exc
    if not np.all(np.isfinite(sol)) or np.max(np.abs(system @ sol - rhs)) > 1e-8:
        raise DegenerateFaceError("bordered system is numerically singular")
    q = sol[:k]
    return float(np.linalg.norm(columns @ q)), q


def batched_solve(
    systems: np.ndarray,
    rhs: np.ndarray,
    residual_tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve a stack of small square systems, flagging unreliable members.

    Returns (solutions, ok). Singular or ill-conditioned members get ok=False
    instead of raising, so enumeration loops can skip degenerate subsets.
    """
    count = systems.shape[0]
    solutions = np.zeros(rhs.shape)
    ok = np.ones(count, dtype=bool)
    try:
        solutions = np.linalg.solve(systems, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        for i in range(count):
            try:
                solutions[i] = np.linalg.solve(systems[i], rhs[i])
            except np.linalg.LinAlgError:
                ok[i] = False
    residual = np.einsum("mij,mj->mi", systems, solutions) - rhs
    ok &= np.all(np.isfinite(solutions), axis=1)
    ok &= np.max(np.abs(residual), axis=1) <= residual_tol
    solutions[~ok] = 0.0
    return solutions, ok


def dist_l2_to_halfspaces(
    point: np.ndarray,
    normals: np.ndarray,
    offsets: np.ndarray,
    feas_tol: float = 1e-9,
) -> tuple[float, np.ndarray]:
    """Euclidean distance from point to {y | normals[:, i] @ y >= offsets[i]}.

    Exhaustive active-set enumeration: project onto every equality subsystem,
    keep feasible candidates, return the closest. Exact at desk scale because
    the true projection's active set is always among the enumerated subsets.
    Raises ValueError when no feasible candidate exists (empty polyhedron).
    """
    point = np.asarray(point, dtype=float)
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    d, m = normals.shape
    slack = normals.T @ point - offsets
    if slack.min() >= -feas_tol:
        return 0.0, point

    best_dist = np.inf
    best_point: np.ndarray | None = None
    for k in range(1, min(d, m) + 1):
        combos = np.array(list(itertools.combinations(range(m), k)))
        sub = normals[:, combos]  # (d, count, k)
        sub = np.moveaxis(sub, 1, 0)  # (count, d, k)
        gram_stack = np.einsum("cdk,cdl->ckl", sub, sub)
        target = offsets[combos] - np.einsum("cdk,d->ck", sub, point)
        coeffs, valid = batched_solve(gram_stack, target)
        if not valid.any():
            continue
        candidates = point[None, :] + np.einsum("cdk,ck->cd", sub, coeffs)
        feasibility = np.einsum("dm,cd->cm", normals, candidates) - offsets[None, :]
        valid &= feasibility.min(axis=1) >= -feas_tol
        if not valid.any():
            continue
        dists = np.linalg.norm(candidates - point[None, :], axis=1)
        dists[~valid] = np.inf
        idx = int(np.argmin(dists))
        if dists[idx] < best_dist - 1e-15:
            best_dist = float(dists[idx])
            best_point = candidates[idx]
    if best_point is None:
        raise ValueError("halfspace intersection appears empty")
    return best_dist, best_point
