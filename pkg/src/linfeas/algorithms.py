"""Perceptron-family iterations with full trace recording.

Three iterations over unit columns: the classical additive perceptron, the
averaged variant that tracks a convex combination of columns (a subgradient
step on the margin loss), and the furthest-point line-search iteration that
is Frank-Wolfe on the minimum-norm-point problem. Ties break on the lowest
column index so every trace is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import ProblemInstance, SimplexPoint

__all__ = [
    "MODES",
    "AlgorithmConfig",
    "IterateTrace",
    "Certificate",
    "perceptron_classic",
    "perceptron_normalized",
    "vng",
    "loss",
    "margin_estimate_np",
]

MODES = ("primal-feasibility", "dual-certificate", "margin-maximization")

TRACE_HEADER = "t,norm_w,margin_t,loss,chosen_index"


@dataclass(frozen=True)
class AlgorithmConfig:
    max_iters: int = 1000
    target_eps: float = 0.0
    mode: str = "primal-feasibility"
    seed: int = 0  # reserved for randomized tie-breaks; unused under lowest-index
    tie_break: str = "lowest-index"

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.target_eps < 0.0:
            raise ValueError("target_eps must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.tie_break != "lowest-index":
            raise ValueError("only lowest-index tie-breaking is implemented")


@dataclass(eq=False)
class Certificate:
    kind: str  # "primal-feasible" | "dual-epsilon"
    direction: np.ndarray | None
    weights: SimplexPoint | None
    epsilon: float
    iterations: int

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "direction": None if self.direction is None else list(map(float, self.direction)),
            "weights": None if self.weights is None else list(map(float, self.weights.weights)),
            "epsilon": self.epsilon,
            "iterations": self.iterations,
        }


@dataclass(eq=False)
class IterateTrace:
    """Per-iteration record of a run; row t holds the state after update t.

    ``coefficients`` rows are convex weights for the averaged iterations and
    raw update counts for the classical perceptron (either way the iterate is
    columns @ coefficients). ``chosen`` holds the column index used to produce
    row t, with -1 at t = 0.
    """

    algorithm: str
    ts: np.ndarray
    iterates: np.ndarray
    coefficients: np.ndarray
    norms: np.ndarray
    margins: np.ndarray
    losses: np.ndarray
    chosen: np.ndarray
    termination: str

    @property
    def steps(self) -> int:
        return int(self.ts[-1])

    def alpha(self, t: int) -> SimplexPoint:
        return SimplexPoint.from_approximate(self.coefficients[t])

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(TRACE_HEADER + "\n")
            for i in range(self.ts.size):
                fh.write(
                    f"{int(self.ts[i])},{self.norms[i]:.17g},{self.margins[i]:.17g},"
                    f"{self.losses[i]:.17g},{int(self.chosen[i])}\n"
                )
        return path


class _TraceBuilder:
    def __init__(self, algorithm: str, instance: ProblemInstance, capacity: int):
        self.algorithm = algorithm
        self.ts = np.zeros(capacity + 1, dtype=int)
        self.iterates = np.zeros((capacity + 1, instance.d))
        self.coefficients = np.zeros((capacity + 1, instance.n))
        self.norms = np.zeros(capacity + 1)
        self.margins = np.zeros(capacity + 1)
        self.losses = np.zeros(capacity + 1)
        self.chosen = np.full(capacity + 1, -1, dtype=int)
        self.rows = 0

    def record(self, t: int, w: np.ndarray, coeff: np.ndarray, dots: np.ndarray, chosen: int) -> None:
        i = self.rows
        norm = float(np.linalg.norm(w))
        worst = float(dots.min())
        self.ts[i] = t
        self.iterates[i] = w
        self.coefficients[i] = coeff
        self.norms[i] = norm
        self.margins[i] = worst / norm if norm > 0.0 else np.nan
        self.losses[i] = 0.5 * norm * norm - worst
        self.chosen[i] = chosen
        self.rows += 1

    def freeze(self, termination: str) -> IterateTrace:
        r = self.rows
        return IterateTrace(
            algorithm=self.algorithm,
            ts=self.ts[:r].copy(),
            iterates=self.iterates[:r].copy(),
            coefficients=self.coefficients[:r].copy(),
            norms=self.norms[:r].copy(),
            margins=self.margins[:r].copy(),
            losses=self.losses[:r].copy(),
            chosen=self.chosen[:r].copy(),
            termination=termination,
        )


def _require_unit_columns(instance: ProblemInstance) -> None:
    if not instance.has_unit_columns():
        raise ValueError("algorithm requires unit columns; ingest with normalize=True")


def _primal_certificate(w: np.ndarray, dots: np.ndarray, iterations: int) -> Certificate:
    norm = float(np.linalg.norm(w))
    achieved = float(dots.min()) / norm if norm > 0 else 0.0
    return Certificate(
        kind="primal-feasible",
        direction=w.copy(),
        weights=None,
        epsilon=achieved,
        iterations=iterations,
    )


def _dual_certificate(alpha: np.ndarray, norm: float, iterations: int) -> Certificate:
    return Certificate(
        kind="dual-epsilon",
        direction=None,
        weights=SimplexPoint.from_approximate(alpha),
        epsilon=float(norm),
        iterations=iterations,
    )


def perceptron_classic(
    instance: ProblemInstance,
    config: AlgorithmConfig,
) -> tuple[Certificate | None, IterateTrace]:
    """Additive perceptron: add the lowest-index column with nonpositive dot.

    Starts at the first column; stops when no mistake remains (strict
    feasibility certificate) or the iteration budget runs out.
    """
    _require_unit_columns(instance)
    cols = instance.columns
    n = instance.n
    trace = _TraceBuilder("classic", instance, config.max_iters)
    w = cols[:, 0].copy()
    counts = np.zeros(n)
    counts[0] = 1.0
    dots = w @ cols
    trace.record(0, w, counts, dots, -1)
    updates = 0
    certificate: Certificate | None = None
    for t in range(1, config.max_iters + 1):
        mistakes = dots <= 0.0  # exact sign test, no slack
        if not mistakes.any():
            certificate = _primal_certificate(w, dots, updates)
            break
        i = int(np.argmax(mistakes))
        w = w + cols[:, i]
        counts[i] += 1.0
        updates += 1
        dots = w @ cols
        trace.record(t, w, counts, dots, i)
    else:
        if not (dots <= 0.0).any():
            certificate = _primal_certificate(w, dots, updates)
    reason = "primal-feasible" if certificate is not None else "exhausted"
    return certificate, trace.freeze(reason)


def _averaged_run(
    instance: ProblemInstance,
    config: AlgorithmConfig,
    step_rule: str,
) -> tuple[Certificate | None, IterateTrace]:
    cols = instance.columns
    n = instance.n
    trace = _TraceBuilder(step_rule, instance, config.max_iters)
    w = cols[:, 0].copy()
    alpha = np.zeros(n)
    alpha[0] = 1.0
    dots = w @ cols
    trace.record(0, w, alpha, dots, -1)
    certificate: Certificate | None = None
    reason = "completed"
    updates = 0

    for t in range(1, config.max_iters + 1):
        norm = float(np.linalg.norm(w))
        if config.mode == "primal-feasibility" and dots.min() > 0.0:
            certificate = _primal_certificate(w, dots, updates)
            reason = "primal-feasible"
            break
        if config.mode == "dual-certificate" and norm <= config.target_eps:
            certificate = _dual_certificate(alpha, norm, updates)
            reason = "dual-epsilon"
            break

        if step_rule == "np":
            i = int(np.argmin(dots))
            step = 1.0 / t
            w = (1.0 - step) * w + step * cols[:, i]
            alpha *= 1.0 - step
            alpha[i] += step
        else:  # vng: furthest point, exact line search on the connecting segment
            gaps = np.sum((w[:, None] - cols) ** 2, axis=0)
            i = int(np.argmax(gaps))
            a = cols[:, i]
            denom = float(gaps[i])
            if denom <= 1e-30:
                reason = "stalled"
                break
            lam = float((a @ a - a @ w) / denom)
            if lam >= 1.0:
                reason = "stalled"  # line search cannot shrink the norm further
                break
            lam = max(lam, 0.0)
            w = lam * w + (1.0 - lam) * a
            alpha *= lam
            alpha[i] += 1.0 - lam
        updates += 1
        dots = w @ cols
        trace.record(t, w, alpha, dots, i)
    if certificate is None and reason == "completed":
        # budget ran out (or margin-maximization ran its course): check the final state
        norm = float(np.linalg.norm(w))
        if config.mode == "primal-feasibility":
            if dots.min() > 0.0:
                certificate = _primal_certificate(w, dots, updates)
                reason = "primal-feasible"
            else:
                reason = "exhausted"
        elif config.mode == "dual-certificate":
            if norm <= config.target_eps:
                certificate = _dual_certificate(alpha, norm, updates)
                reason = "dual-epsilon"
            else:
                reason = "exhausted"
        else:
            if dots.min() > 0.0:
                certificate = _primal_certificate(w, dots, updates)
    return certificate, trace.freeze(reason)


def perceptron_normalized(
    instance: ProblemInstance,
    config: AlgorithmConfig,
) -> tuple[Certificate | None, IterateTrace]:
    """Averaged perceptron: move toward the worst column with weight 1/t.

    The iterate stays a convex combination of columns (the first update
    replaces the starting column outright since the averaging weight is 1).
    Termination depends on the mode: strict feasibility, iterate norm at most
    target_eps, or run the full budget while maximizing the margin.
    """
    _require_unit_columns(instance)
    return _averaged_run(instance, config, "np")


def vng(
    instance: ProblemInstance,
    config: AlgorithmConfig,
) -> tuple[Certificate | None, IterateTrace]:
    """Furthest-point iteration with exact line search toward the origin.

    Each step picks the column furthest from the iterate and jumps to the
    minimum-norm point of the connecting segment (the closed-form minimizer
    clamped to [0, 1]); a clamp at 1 means no progress is possible and the
    run stops with a stall flag. This is Frank-Wolfe on the minimum-norm
    point of the hull, so the iterate norm never increases.
    """
    _require_unit_columns(instance)
    return _averaged_run(instance, config, "vng")


def loss(instance: ProblemInstance, w: np.ndarray) -> float:
    """Margin loss 0.5*||w||^2 - min_i w . a_i (minimized at the scaled margin direction)."""
    w = np.asarray(w, dtype=float)
    if w.shape != (instance.d,):
        raise ValueError(f"vector has shape {w.shape}, expected ({instance.d},)")
    return float(0.5 * (w @ w) - (w @ instance.columns).min())


def margin_estimate_np(instance: ProblemInstance, eps: float) -> tuple[float, float]:
    """Interval of width eps around the positive margin from a fixed-length run.

    Runs the averaged perceptron for ceil(4/eps^2) updates and returns
    (||w_t|| - eps, ||w_t||); for instances with positive margin the interval
    is guaranteed to contain it.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    steps = math.ceil(4.0 / (eps * eps))
    config = AlgorithmConfig(max_iters=steps, mode="margin-maximization")
    _, trace = perceptron_normalized(instance, config)
    upper = float(trace.norms[-1])
    return upper - eps, upper
