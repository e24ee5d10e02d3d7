"""Constructive certifiers for the margin-quantified alternative and error bounds.

Each verifier decides which side of its statement holds using the exact
margin oracle, then actually constructs the witness object the statement
promises and reports its residuals, so a claim never rests on the oracle
alone. Distance bounds are cross-checked against exact l1/l2 distances from
the LP module whenever requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import PrimalDirection, ProblemInstance, SimplexPoint, combine
from .lp import LinearProgram, dist_l1_to_polyhedron, dist_l2_to_halfspaces, solve
from .margins import ZERO_BAND, MarginReport, margin_report, representable

__all__ = [
    "IllPosedError",
    "InapplicableError",
    "CertificateConstructionError",
    "GordanVerdict",
    "HoffmanReport",
    "gordan_decide",
    "hoffman_dual",
    "hoffman_simplex",
    "hoffman_primal",
]

RESIDUAL_TOL = 1e-9


class IllPosedError(RuntimeError):
    """Raised when the requested threshold sits inside the ill-posed band."""


class InapplicableError(RuntimeError):
    """Raised when a statement's margin precondition fails for the instance."""


class CertificateConstructionError(RuntimeError):
    """Raised when a promised witness cannot be constructed: a genuine finding."""


@dataclass(eq=False)
class GordanVerdict:
    """Which alternative held, the witness constructed for it, and its residuals."""

    gamma: float
    part: int
    alternative_held: str  # "first" | "second"
    witness_direction: PrimalDirection | None
    witness_weights: SimplexPoint | None
    ball_samples: list[tuple[np.ndarray, SimplexPoint]] | None
    residuals: np.ndarray
    margin: MarginReport

    @property
    def min_slack(self) -> float:
        return float(self.residuals.min())

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max())

    @property
    def verified(self) -> bool:
        if self.alternative_held == "first":
            return self.min_slack > RESIDUAL_TOL
        return self.max_residual <= RESIDUAL_TOL

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "part": self.part,
            "alternative_held": self.alternative_held,
            "witness_direction": (
                None
                if self.witness_direction is None
                else list(map(float, self.witness_direction.vector))
            ),
            "witness_weights": (
                None
                if self.witness_weights is None
                else list(map(float, self.witness_weights.weights))
            ),
            "ball_samples": (
                None
                if self.ball_samples is None
                else [
                    {"v": list(map(float, v)), "weights": list(map(float, p.weights))}
                    for v, p in self.ball_samples
                ]
            ),
            "residuals": list(map(float, self.residuals)),
            "verified": self.verified,
            "margin": self.margin.as_dict(),
        }


@dataclass(eq=False)
class HoffmanReport:
    """A distance-to-feasibility bound with its constructed witness and residuals."""

    variant: str  # "dual-general" | "dual-simplex" | "primal"
    bound_value: float
    constructed_witness: np.ndarray | SimplexPoint
    witness_residual: float
    witness_distance: float
    exact_distance: float | None = None
    slack: float | None = None
    relaxed_bound: float | None = None

    @property
    def verified(self) -> bool:
        ok = self.witness_residual <= RESIDUAL_TOL
        ok &= self.witness_distance <= self.bound_value + RESIDUAL_TOL
        if self.exact_distance is not None:
            ok &= self.exact_distance <= self.bound_value + RESIDUAL_TOL
        return bool(ok)

    def as_dict(self) -> dict:
        witness = self.constructed_witness
        if isinstance(witness, SimplexPoint):
            witness = witness.weights
        return {
            "variant": self.variant,
            "bound_value": self.bound_value,
            "constructed_witness": list(map(float, witness)),
            "witness_residual": self.witness_residual,
            "witness_distance": self.witness_distance,
            "exact_distance": self.exact_distance,
            "slack": self.slack,
            "relaxed_bound": self.relaxed_bound,
            "verified": self.verified,
        }


def _span_directions(instance: ProblemInstance, count: int, seed: int) -> np.ndarray:
    """Unit directions in the column span: basis directions plus seeded samples."""
    basis = instance.basis
    dirs = [basis.basis[:, j] for j in range(basis.rank)]
    dirs += [-basis.basis[:, j] for j in range(basis.rank)]
    rng = np.random.default_rng(seed)
    for _ in range(count):
        z = rng.standard_normal(basis.rank)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            continue
        dirs.append(basis.lift(z / nz))
    return np.array(dirs)


def gordan_decide(
    instance: ProblemInstance,
    gamma: float,
    part: int,
    budget: int = 14,
    sample_seed: int = 0,
    samples: int = 32,
    report: MarginReport | None = None,
) -> GordanVerdict:
    """Decide which alternative holds at threshold gamma and construct its witness.

    Part 1 is the zero-threshold statement (gamma must be 0). Part 2 splits on
    strict dot products above gamma versus a hull point within gamma of the
    origin. Part 3 splits on dot products above -gamma versus the gamma-ball
    being representable; the ball claim is certified by the exact inradius
    comparison and spot-checked on the scaled basis directions plus seeded
    samples. A ``report`` computed earlier can be passed to skip the oracle.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be nonnegative")
    if part not in (1, 2, 3):
        raise ValueError("part must be 1, 2, or 3")
    if part == 1 and gamma != 0.0:
        raise ValueError("part 1 is the zero-threshold statement; use gamma = 0")
    if report is None:
        report = margin_report(instance, budget)
    rho = report.rho_affine
    pivot = gamma if part in (1, 2) else -gamma
    if abs(rho - pivot) <= ZERO_BAND:
        raise IllPosedError(
            f"margin {rho:.3e} is within {ZERO_BAND} of the decision threshold "
            f"{pivot:.3e}; refusing to certify either alternative"
        )

    if rho > pivot:
        w = report.witness_direction
        assert w is not None
        slacks = w.vector @ instance.columns - pivot
        return GordanVerdict(
            gamma=gamma,
            part=part,
            alternative_held="first",
            witness_direction=w,
            witness_weights=None,
            ball_samples=None,
            residuals=slacks,
            margin=report,
        )

    if part in (1, 2):
        weights = report.witness_weights
        assert weights is not None
        norm = float(np.linalg.norm(combine(instance, weights)))
        # second alternative: a hull point within gamma of the origin
        residuals = np.array([max(norm - gamma, 0.0)])
        return GordanVerdict(
            gamma=gamma,
            part=part,
            alternative_held="second",
            witness_direction=None,
            witness_weights=weights,
            ball_samples=None,
            residuals=residuals,
            margin=report,
        )

    # part 3, second alternative: every point of the gamma-ball in the span is
    # representable; spot-check scaled directions, each via a feasibility LP
    if gamma == 0.0:
        directions = np.zeros((1, instance.d))
    else:
        directions = gamma * _span_directions(instance, samples, sample_seed)
    table: list[tuple[np.ndarray, SimplexPoint]] = []
    residuals = []
    for v in directions:
        p = representable(instance, v)
        if p is None:
            raise CertificateConstructionError(
                f"ball point {v} is not representable although the inradius "
                f"{abs(report.rho_minus):.6g} covers radius {gamma:.6g}"
            )
        table.append((v, p))
        residuals.append(float(np.linalg.norm(combine(instance, p) - v)))
    return GordanVerdict(
        gamma=gamma,
        part=part,
        alternative_held="second",
        witness_direction=None,
        witness_weights=None,
        ball_samples=table,
        residuals=np.array(residuals),
        margin=report,
    )


def _require_negative_margin(report: MarginReport) -> float:
    if report.rho_affine >= -ZERO_BAND:
        raise InapplicableError(
            f"statement needs a strictly negative margin, instance has {report.rho_affine:.3e}"
        )
    return abs(report.rho_minus)


def hoffman_dual(
    instance: ProblemInstance,
    b: np.ndarray,
    x: np.ndarray,
    budget: int = 14,
    compute_exact: bool = True,
    report: MarginReport | None = None,
) -> HoffmanReport:
    """Bound the l1 distance from x >= 0 to {x' >= 0 | A x' = b} by residual/inradius.

    Constructs the repaired point x + p * ||Ax - b|| / inradius, where p
    represents the scaled residual direction inside the hull, and verifies it
    lands in the target set. Requires b in the column span with a nonempty
    target set (checked by a phase-1 solve).
    """
    if report is None:
        report = margin_report(instance, budget)
    rho = _require_negative_margin(report)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    if b.shape != (instance.d,) or x.shape != (instance.n,):
        raise ValueError("b must have length d and x length n")
    if np.any(x < -1e-12):
        raise ValueError("x must be entrywise nonnegative")
    x = np.clip(x, 0.0, None)
    span_gap = float(np.linalg.norm(b - instance.basis.project(b)))
    if span_gap > RESIDUAL_TOL * max(1.0, float(np.linalg.norm(b))):
        raise InapplicableError("witness set is empty: rhs has a component outside the column span")
    feasibility = solve(
        LinearProgram(objective=np.zeros(instance.n), eq_matrix=instance.columns, eq_rhs=b)
    )
    if feasibility.status != "optimal":
        raise InapplicableError("witness set {x >= 0 | Ax = b} is empty")

    residual_vec = instance.columns @ x - b
    r = float(np.linalg.norm(residual_vec))
    bound = r / rho
    if r <= 1e-12:
        return HoffmanReport(
            variant="dual-general",
            bound_value=bound,
            constructed_witness=x,
            witness_residual=r,
            witness_distance=0.0,
            exact_distance=0.0 if compute_exact else None,
            slack=bound if compute_exact else None,
        )
    v = rho * (b - instance.columns @ x) / r
    p = representable(instance, v)
    if p is None:
        raise CertificateConstructionError(
            "scaled residual direction is not representable despite the inradius guarantee"
        )
    repaired = x + p.weights * (r / rho)
    witness_residual = float(np.linalg.norm(instance.columns @ repaired - b))
    witness_distance = float(np.abs(repaired - x).sum())
    exact = None
    slack = None
    if compute_exact:
        exact, _ = dist_l1_to_polyhedron(x, instance.columns, b, nonneg=True)
        slack = bound - exact
    return HoffmanReport(
        variant="dual-general",
        bound_value=bound,
        constructed_witness=repaired,
        witness_residual=witness_residual,
        witness_distance=witness_distance,
        exact_distance=exact,
        slack=slack,
    )


def hoffman_simplex(
    instance: ProblemInstance,
    p: SimplexPoint,
    budget: int = 14,
    compute_exact: bool = True,
    report: MarginReport | None = None,
) -> HoffmanReport:
    """Bound the l1 distance from weights p to the zero-combination weight set.

    The sharp bound is 2||Ap|| / (||Ap|| + inradius); the relaxed one drops
    the first addend of the denominator. The witness blends p with a
    representation of the reflected, inradius-scaled hull point.
    """
    if report is None:
        report = margin_report(instance, budget)
    rho = _require_negative_margin(report)
    image = combine(instance, p)
    r = float(np.linalg.norm(image))
    relaxed = 2.0 * r / rho
    sharp = 2.0 * r / (r + rho)
    if r <= 1e-12:
        return HoffmanReport(
            variant="dual-simplex",
            bound_value=sharp,
            constructed_witness=p,
            witness_residual=r,
            witness_distance=0.0,
            exact_distance=0.0 if compute_exact else None,
            slack=sharp if compute_exact else None,
            relaxed_bound=relaxed,
        )
    v = -(rho / r) * image
    p_prime = representable(instance, v)
    if p_prime is None:
        raise CertificateConstructionError(
            "reflected hull point is not representable despite the inradius guarantee"
        )
    lam = r / (r + rho)
    blended = SimplexPoint.from_approximate(lam * p_prime.weights + (1.0 - lam) * p.weights)
    witness_residual = float(np.linalg.norm(combine(instance, blended)))
    witness_distance = float(np.abs(p.weights - blended.weights).sum())
    exact = None
    slack = None
    if compute_exact:
        eq = np.vstack([instance.columns, np.ones((1, instance.n))])
        rhs = np.concatenate([np.zeros(instance.d), [1.0]])
        exact, _ = dist_l1_to_polyhedron(p.weights, eq, rhs, nonneg=True)
        slack = sharp - exact
    return HoffmanReport(
        variant="dual-simplex",
        bound_value=sharp,
        constructed_witness=blended,
        witness_residual=witness_residual,
        witness_distance=witness_distance,
        exact_distance=exact,
        slack=slack,
        relaxed_bound=relaxed,
    )


def hoffman_primal(
    instance: ProblemInstance,
    c: np.ndarray,
    w: np.ndarray,
    budget: int = 14,
    compute_exact: bool = True,
    report: MarginReport | None = None,
) -> HoffmanReport:
    """Bound the Euclidean distance from w to {y | A^T y >= c} by violation/margin.

    The witness pushes w along the unit margin-maximizing direction far enough
    to clear the largest violation. The exact distance cross-check is the
    enumeration projection onto the constraint polyhedron.
    """
    if report is None:
        report = margin_report(instance, budget)
    if report.rho_affine <= ZERO_BAND:
        raise InapplicableError(
            f"statement needs a strictly positive margin, instance has {report.rho_affine:.3e}"
        )
    rho_plus = report.rho_plus
    c = np.asarray(c, dtype=float)
    w = np.asarray(w, dtype=float)
    if c.shape != (instance.n,) or w.shape != (instance.d,):
        raise ValueError("c must have length n and w length d")
    violation = np.clip(c - instance.columns.T @ w, 0.0, None)
    worst = float(violation.max())
    bound = worst / rho_plus
    if worst <= 1e-12:
        return HoffmanReport(
            variant="primal",
            bound_value=bound,
            constructed_witness=w,
            witness_residual=0.0,
            witness_distance=0.0,
            exact_distance=0.0 if compute_exact else None,
            slack=bound if compute_exact else None,
        )
    direction = report.witness_direction
    assert direction is not None
    witness = w + bound * direction.vector
    witness_residual = float(np.clip(c - instance.columns.T @ witness, 0.0, None).max())
    witness_distance = float(np.linalg.norm(witness - w))
    exact = None
    slack = None
    if compute_exact:
        exact, _ = dist_l2_to_halfspaces(w, instance.columns, c)
        slack = bound - exact
    return HoffmanReport(
        variant="primal",
        bound_value=bound,
        constructed_witness=witness,
        witness_residual=witness_residual,
        witness_distance=witness_distance,
        exact_distance=exact,
        slack=slack,
    )
