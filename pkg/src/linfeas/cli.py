"""Command-line entry point: generate, measure, run, certify, batch, report.

Exit codes: 0 success or statement verified, 1 usage error, 2 a bound or
certificate check failed (a genuine finding), 3 statement inapplicable or
instance ill-posed.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .algorithms import (
    AlgorithmConfig,
    margin_estimate_np,
    perceptron_classic,
    perceptron_normalized,
    vng,
)
from .generators import GenerationError, GeneratorSpec, generate
from .instance import IngestError, ProblemInstance, SimplexPoint, load_instance, save_instance
from .margins import (
    BudgetExceededError,
    ZERO_BAND,
    margin_grid_estimate,
    margin_report,
    minimum_enclosing_ball,
    representable,
)
from .reporting import RunSummary, build_run_summary
from .theorems import (
    CertificateConstructionError,
    IllPosedError,
    InapplicableError,
    gordan_decide,
    hoffman_dual,
    hoffman_primal,
    hoffman_simplex,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_INAPPLICABLE = 3

ALGORITHMS = {
    "classic": perceptron_classic,
    "np": perceptron_normalized,
    "vng": vng,
}

THEOREMS = (
    "gordan1",
    "gordan2",
    "gordan3",
    "hoffman-dual",
    "hoffman-simplex",
    "hoffman-primal",
    "meb",
    "radius",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit code 2 reserved for bound violations
        raise _UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-rank", type=float, default=None, help="rank cutoff override")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--max-iters", type=int, default=10_000)
    common.add_argument("--eps", type=float, default=0.1)
    common.add_argument("--dump-alpha", action="store_true")
    return common


def _build_parser() -> _Parser:
    common = _common_flags()
    parser = _Parser(prog="linfeas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate an instance with a planted margin")
    gen.add_argument("--kind", required=True, choices=("planted-positive", "planted-negative", "near-ill-posed", "rank-deficient"))
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--target", type=float, default=0.0, help="planted margin (sign per kind)")
    gen.add_argument("--jitter", type=float, default=0.0)
    gen.add_argument("--out", type=Path, default=None, help="output path (default under --out-dir)")

    margin = sub.add_parser("margin", parents=[common], help="margin report for an instance")
    margin.add_argument("instance", type=Path)
    margin.add_argument("--method", choices=("exact", "grid", "iterative"), default="exact")
    margin.add_argument("--resolution", type=int, default=4096)

    run = sub.add_parser("run", parents=[common], help="run an algorithm, write trace and summary")
    run.add_argument("instance", type=Path)
    run.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    run.add_argument("--mode", default="primal-feasibility",
                     choices=("primal-feasibility", "dual-certificate", "margin-maximization"))

    certify = sub.add_parser("certify", parents=[common], help="verify a statement on an instance")
    certify.add_argument("instance", type=Path)
    certify.add_argument("--theorem", required=True, choices=THEOREMS)
    certify.add_argument("--gamma", type=float, default=0.0)
    certify.add_argument("--b", type=str, default=None, help="JSON vector, length d")
    certify.add_argument("--x", type=str, default=None, help="JSON nonnegative vector, length n")
    certify.add_argument("--p", type=str, default=None, help="JSON simplex weights, length n")
    certify.add_argument("--c", type=str, default=None, help="JSON vector, length n")
    certify.add_argument("--w", type=str, default=None, help="JSON vector, length d")
    certify.add_argument("--samples", type=int, default=32)

    batch = sub.add_parser("batch", parents=[common], help="fan runs out over instances x algorithms")
    batch.add_argument("--instances", type=Path, required=True, help="directory of instance JSON files")
    batch.add_argument("--algorithms", type=str, default="np,vng")
    batch.add_argument("--mode", default="margin-maximization",
                       choices=("primal-feasibility", "dual-certificate", "margin-maximization"))
    batch.add_argument("--workers", type=int, default=1)

    report = sub.add_parser("report", parents=[common], help="aggregate run summaries to CSV")
    report.add_argument("--csv", type=Path, default=None, help="write here instead of stdout")

    return parser


def _parse_vector(text: str | None, length: int, label: str) -> np.ndarray | None:
    if text is None:
        return None
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"--{label} must be a JSON array: {exc}") from exc
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise _UsageError(f"--{label} must have length {length}, got shape {arr.shape}")
    return arr


def _load(path: Path) -> ProblemInstance:
    try:
        return load_instance(path)
    except (OSError, json.JSONDecodeError, IngestError) as exc:
        raise _UsageError(f"cannot read instance {path}: {exc}") from exc


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_gen(args) -> int:
    try:
        spec = GeneratorSpec(
            kind=args.kind,
            d=args.d,
            n=args.n,
            target_margin=args.target,
            seed=args.seed,
            jitter=args.jitter,
        )
        instance, metadata = generate(spec)
    except (ValueError, GenerationError) as exc:
        raise _UsageError(str(exc)) from exc
    out = args.out if args.out is not None else args.out_dir / f"{spec.default_name}.json"
    save_instance(instance, out, metadata=metadata)
    print(out)
    return EXIT_OK


def cmd_margin(args) -> int:
    instance = _load(args.instance)
    if args.method == "exact":
        try:
            report = margin_report(instance, rank_tol=args.tol_rank)
        except BudgetExceededError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INAPPLICABLE
        _emit(report.as_dict())
        return EXIT_OK
    if args.method == "grid":
        try:
            estimate = margin_grid_estimate(instance, args.resolution)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INAPPLICABLE
        _emit({
            "method": "grid",
            "resolution": args.resolution,
            "rho_affine_lower": estimate,
            "gap_bound": 2.0 * np.pi / args.resolution,
        })
        return EXIT_OK
    lower, upper = margin_estimate_np(instance, args.eps)
    _emit({
        "method": "iterative",
        "eps": args.eps,
        "rho_plus_lower": lower,
        "rho_plus_upper": upper,
    })
    return EXIT_OK


def _run_one(
    instance_path: Path,
    algorithm: str,
    mode: str,
    eps: float,
    max_iters: int,
    out_dir: Path,
    dump_alpha: bool,
    rank_tol: float | None = None,
) -> tuple[RunSummary, Path]:
    instance = _load(instance_path)
    config = AlgorithmConfig(max_iters=max_iters, target_eps=eps, mode=mode)
    certificate, trace = ALGORITHMS[algorithm](instance, config)
    try:
        report = margin_report(instance, rank_tol=rank_tol)
    except BudgetExceededError:
        report = None  # summary still written, oracle checks skipped
    summary = build_run_summary(instance, report, algorithm, mode, certificate, trace)
    digest = hashlib.sha1(
        f"{instance_path}|{algorithm}|{mode}|{eps}|{max_iters}".encode()
    ).hexdigest()[:10]
    stem = f"{instance_path.stem}__{algorithm}__{digest}"
    trace.write_csv(out_dir / f"{stem}.trace.csv")
    if dump_alpha:
        alpha_path = out_dir / f"{stem}.alpha.json"
        alpha_path.parent.mkdir(parents=True, exist_ok=True)
        with open(alpha_path, "w", encoding="utf-8") as fh:
            json.dump({"alpha": trace.coefficients.tolist()}, fh)
    summary_path = summary.save(out_dir / f"{stem}.summary.json")
    return summary, summary_path


def cmd_run(args) -> int:
    summary, summary_path = _run_one(
        args.instance,
        args.algorithm,
        args.mode,
        args.eps,
        args.max_iters,
        args.out_dir,
        args.dump_alpha,
        args.tol_rank,
    )
    _emit(summary.as_dict())
    print(f"summary: {summary_path}", file=sys.stderr)
    return EXIT_OK if summary.all_passed else EXIT_VIOLATION


def _certify_meb(instance: ProblemInstance) -> int:
    try:
        ball = minimum_enclosing_ball(instance)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INAPPLICABLE
    report = margin_report(instance)
    radius_sq_gap = abs(ball.radius**2 + report.rho_plus**2 - 1.0)
    overshoot = float(
        np.linalg.norm(instance.columns - ball.center[:, None], axis=0).max() - ball.radius
    )
    center_gap = float(
        np.linalg.norm(instance.columns @ ball.support_weights.weights - ball.center)
    )
    ok = radius_sq_gap <= 1e-9 and overshoot <= 1e-9 and center_gap <= 1e-9
    _emit({
        "statement": "meb",
        "ball": ball.as_dict(),
        "radius_identity_gap": radius_sq_gap,
        "containment_overshoot": max(overshoot, 0.0),
        "center_gap": center_gap,
        "verified": ok,
    })
    return EXIT_OK if ok else EXIT_VIOLATION


def _certify_radius(instance: ProblemInstance, samples: int, seed: int) -> int:
    report = margin_report(instance)
    if report.rho_affine >= -ZERO_BAND:
        print("radius statement needs a strictly negative margin", file=sys.stderr)
        return EXIT_INAPPLICABLE
    inradius = abs(report.rho_minus)
    rng = np.random.default_rng(seed)
    basis = instance.basis
    failures = []
    for k in range(samples):
        z = rng.standard_normal(basis.rank)
        z /= np.linalg.norm(z)
        v = 0.99 * inradius * basis.lift(z)
        if representable(instance, v) is None:
            failures.append(f"interior sample {k} not representable")
    assert report.witness_direction is not None
    outside = -(1.0 + 1e-3) * inradius * report.witness_direction.vector
    if representable(instance, outside) is not None:
        failures.append("point beyond the nearest facet was representable")
    _emit({
        "statement": "radius",
        "inradius": inradius,
        "interior_samples": samples,
        "failures": failures,
        "verified": not failures,
    })
    return EXIT_OK if not failures else EXIT_VIOLATION


def cmd_certify(args) -> int:
    instance = _load(args.instance)
    n, d = instance.n, instance.d
    try:
        if args.theorem in ("gordan1", "gordan2", "gordan3"):
            part = int(args.theorem[-1])
            verdict = gordan_decide(
                instance, args.gamma, part, sample_seed=args.seed, samples=args.samples
            )
            _emit(verdict.as_dict())
            return EXIT_OK if verdict.verified else EXIT_VIOLATION
        if args.theorem == "hoffman-dual":
            b = _parse_vector(args.b, d, "b")
            x = _parse_vector(args.x, n, "x")
            b = np.zeros(d) if b is None else b
            if x is None:
                x = np.zeros(n)
                x[0] = 1.0
            hreport = hoffman_dual(instance, b, x)
        elif args.theorem == "hoffman-simplex":
            p = _parse_vector(args.p, n, "p")
            point = SimplexPoint.unit_mass(n, 0) if p is None else SimplexPoint.from_approximate(p)
            hreport = hoffman_simplex(instance, point)
        elif args.theorem == "hoffman-primal":
            c = _parse_vector(args.c, n, "c")
            w = _parse_vector(args.w, d, "w")
            c = np.ones(n) if c is None else c
            w = np.zeros(d) if w is None else w
            hreport = hoffman_primal(instance, c, w)
        elif args.theorem == "meb":
            return _certify_meb(instance)
        else:
            return _certify_radius(instance, args.samples, args.seed)
    except (IllPosedError, InapplicableError, BudgetExceededError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INAPPLICABLE
    except CertificateConstructionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    _emit(hreport.as_dict())
    return EXIT_OK if hreport.verified else EXIT_VIOLATION


def _batch_worker(task) -> tuple[str, str, bool]:
    path, algorithm, mode, eps, max_iters, out_dir, dump_alpha = task
    summary, _ = _run_one(Path(path), algorithm, mode, eps, max_iters, Path(out_dir), dump_alpha)
    return summary.instance_name, algorithm, summary.all_passed


def cmd_batch(args) -> int:
    instance_dir = args.instances
    paths = sorted(instance_dir.glob("*.json"))
    if not paths:
        raise _UsageError(f"no instance JSON files under {instance_dir}")
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise _UsageError(f"unknown algorithms: {unknown}")
    tasks = [
        (str(path), algo, args.mode, args.eps, args.max_iters, str(args.out_dir), args.dump_alpha)
        for path in paths
        for algo in algorithms
    ]
    all_ok = True
    if args.workers <= 1:
        results = [_batch_worker(task) for task in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_batch_worker, tasks))
    for name, algo, ok in results:
        all_ok &= ok
        print(f"{name},{algo},{'pass' if ok else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_VIOLATION


def cmd_report(args) -> int:
    rows = ["instance,algorithm,mode,check,passed,violation"]
    for path in sorted(args.out_dir.glob("*.summary.json")):
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        for check in payload.get("checks", []):
            rows.append(
                f"{payload['instance']},{payload['algorithm']},{payload['mode']},"
                f"{check['name']},{check['passed']},{check['violation']:.17g}"
            )
    text = "\n".join(rows) + "\n"
    if args.csv is not None:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        args.csv.write_text(text, encoding="utf-8")
        print(args.csv)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "gen": cmd_gen,
            "margin": cmd_margin,
            "run": cmd_run,
            "certify": cmd_certify,
            "batch": cmd_batch,
            "report": cmd_report,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
