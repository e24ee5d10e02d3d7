import math

import numpy as np
import pytest

from batteries import negative_instances, positive_instances

from linfeas.algorithms import (
    AlgorithmConfig,
    loss,
    margin_estimate_np,
    perceptron_classic,
    perceptron_normalized,
    vng,
)
from linfeas.instance import combine, ingest
from linfeas.margins import margin_report


def primal_cfg(iters=1000):
    return AlgorithmConfig(max_iters=iters, mode="primal-feasibility")


def test_classic_axes_one_update(axes):
    cert, trace = perceptron_classic(axes, primal_cfg())
    assert cert is not None and cert.kind == "primal-feasible"
    assert cert.iterations == 1
    assert np.allclose(trace.iterates[-1], [1.0, 1.0])
    assert trace.chosen[1] == 1  # the mistake was the second column


def test_classic_already_feasible():
    inst = ingest([[1.0, 0.0]], normalize=False)
    cert, trace = perceptron_classic(inst, primal_cfg())
    assert cert.iterations == 0
    assert trace.ts.size == 1


def test_classic_infeasible_exhausts(segment):
    cert, trace = perceptron_classic(segment, primal_cfg(iters=50))
    assert cert is None
    assert trace.termination == "exhausted"
    assert trace.ts[-1] == 50


def test_classic_rejects_unnormalized():
    inst = ingest([[2.0, 0.0]], normalize=False)
    with pytest.raises(ValueError, match="unit columns"):
        perceptron_classic(inst, primal_cfg())


def test_np_axes_hand_stepped(axes):
    cert, trace = perceptron_normalized(axes, primal_cfg())
    assert np.allclose(trace.iterates[1], [0.0, 1.0])  # first averaging step keeps only the new column
    assert np.allclose(trace.iterates[2], [0.5, 0.5])
    assert cert is not None and cert.iterations == 2
    normalized_margin = (cert.direction / np.linalg.norm(cert.direction)) @ axes.columns
    assert normalized_margin.min() == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)


def test_np_immediately_feasible():
    inst = ingest([[1.0, 0.0]], normalize=False)
    cert, trace = perceptron_normalized(inst, primal_cfg())
    assert cert.iterations == 0


def test_np_dual_certificate_rate(segment):
    cfg = AlgorithmConfig(max_iters=200, mode="dual-certificate", target_eps=0.1)
    cert, trace = perceptron_normalized(segment, cfg)
    assert cert is not None and cert.kind == "dual-epsilon"
    assert cert.iterations <= 100  # guaranteed within 1/eps^2 steps
    assert cert.epsilon <= 0.1
    assert np.max(np.abs(cert.weights.weights - 0.5)) <= 0.05


def test_np_norm_shrinks_like_inverse_sqrt(segment):
    cfg = AlgorithmConfig(max_iters=64, mode="margin-maximization")
    _, trace = perceptron_normalized(segment, cfg)
    ts = trace.ts[1:]
    assert np.all(trace.norms[1:] <= 1.0 / np.sqrt(ts) + 1e-12)


def test_vng_antipodal_one_step(segment):
    cfg = AlgorithmConfig(max_iters=10, mode="dual-certificate", target_eps=1e-6)
    cert, trace = vng(segment, cfg)
    assert cert is not None and cert.iterations == 1
    assert trace.norms[1] == 0.0
    assert np.allclose(cert.weights.weights, [0.5, 0.5])


def test_vng_axes_feasible_then_stalls(axes):
    cert, trace = vng(axes, primal_cfg())
    assert cert is not None and cert.iterations == 1
    assert np.allclose(trace.iterates[1], [0.5, 0.5])

    cfg = AlgorithmConfig(max_iters=50, mode="margin-maximization")
    _, trace2 = vng(axes, cfg)
    assert trace2.termination == "stalled"  # line search clamps at the minimum-norm point
    assert np.allclose(trace2.iterates[-1], [0.5, 0.5])


def test_vng_triangle_contracts_per_step(triangle):
    cfg = AlgorithmConfig(max_iters=100, mode="dual-certificate", target_eps=1e-12)
    _, trace = vng(triangle, cfg)
    factor = np.sqrt(1.0 - 0.25)
    for t in range(1, trace.ts.size):
        assert trace.norms[t] <= trace.norms[t - 1] * factor + 1e-12


def test_vng_norms_never_increase():
    for inst, meta in negative_instances(6, seed=1200) + positive_instances(6, seed=1300):
        cfg = AlgorithmConfig(max_iters=300, mode="margin-maximization")
        _, trace = vng(inst, cfg)
        assert np.all(np.diff(trace.norms) <= 1e-12)


def test_loss_examples(axes):
    assert loss(axes, np.zeros(2)) == 0.0
    assert loss(axes, np.array([0.5, 0.5])) == pytest.approx(-0.25, abs=1e-15)
    single = ingest([[1.0, 0.0]], normalize=False)
    assert loss(single, np.array([1.0, 0.0])) == pytest.approx(-0.5, abs=1e-15)


def test_loss_minimum_matches_margin(axes):
    # the loss floor sits at minus half the squared margin
    report = margin_report(axes)
    floor = -0.5 * report.rho_plus**2
    best = report.rho_plus * report.witness_direction.vector
    assert loss(axes, best) == pytest.approx(floor, abs=1e-12)


def test_margin_estimate_axes(axes):
    lower, upper = margin_estimate_np(axes, 0.2)
    rho = 1.0 / np.sqrt(2.0)
    assert lower <= rho <= upper
    assert upper - lower == pytest.approx(0.2)


def test_margin_estimate_single_column():
    inst = ingest([[1.0, 0.0]], normalize=False)
    lower, upper = margin_estimate_np(inst, 0.5)
    assert lower <= 1.0 <= upper
    assert upper == pytest.approx(1.0, abs=1e-12)


def test_margin_estimate_coarse_eps(axes):
    lower, upper = margin_estimate_np(axes, 2.0)  # a single step still brackets
    assert lower <= 1.0 / np.sqrt(2.0) <= upper


def test_traces_stay_convex_combinations():
    for inst, meta in negative_instances(4, seed=1400) + positive_instances(4, seed=1500):
        for runner in (perceptron_normalized, vng):
            cfg = AlgorithmConfig(max_iters=200, mode="margin-maximization")
            _, trace = runner(inst, cfg)
            for t in range(trace.ts.size):
                alpha = trace.coefficients[t]
                assert alpha.min() >= -1e-12
                assert alpha.sum() == pytest.approx(1.0, abs=1e-9)
                image = combine(inst, alpha)
                assert np.linalg.norm(image - trace.iterates[t]) <= 1e-9
            assert np.all(trace.norms <= 1.0 + 1e-12)


def test_mistake_bound_on_feasible_battery():
    for inst, meta in positive_instances(15, seed=1600):
        report = margin_report(inst)
        budget = math.ceil(1.0 / report.rho_plus**2)
        for runner in (perceptron_classic, perceptron_normalized):
            cert, _ = runner(inst, primal_cfg(iters=budget + 2))
            assert cert is not None, f"{inst.name} missed feasibility within {budget + 2}"
            assert cert.iterations <= budget


def test_trace_csv_round_trip(tmp_path, axes):
    cfg = AlgorithmConfig(max_iters=32, mode="margin-maximization")
    _, trace = perceptron_normalized(axes, cfg)
    path = trace.write_csv(tmp_path / "trace.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,norm_w,margin_t,loss,chosen_index"
    assert len(lines) == trace.ts.size + 1
    t, norm_w, margin_t, loss_v, chosen = lines[3].split(",")
    assert int(t) == 2
    # 17 significant digits round-trip doubles exactly
    assert float(norm_w) == trace.norms[2]
    assert float(margin_t) == trace.margins[2]
    assert float(loss_v) == trace.losses[2]
    assert int(chosen) == trace.chosen[2]


def test_config_validation():
    with pytest.raises(ValueError):
        AlgorithmConfig(max_iters=0)
    with pytest.raises(ValueError):
        AlgorithmConfig(target_eps=-1.0)
    with pytest.raises(ValueError):
        AlgorithmConfig(mode="warp")
    with pytest.raises(ValueError):
        AlgorithmConfig(tie_break="random")
