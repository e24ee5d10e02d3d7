import numpy as np
import pytest

from oracles import enumerate_standard_form

from linfeas.lp import (
    DEFAULT_TOLERANCES,
    DegenerateFaceError,
    LinearProgram,
    LpSizeError,
    dist_l1_to_polyhedron,
    dist_l2_to_halfspaces,
    min_norm_on_face,
    solve,
)


def test_min_with_lower_bound():
    lp = LinearProgram(
        objective=np.array([1.0]),
        ub_matrix=np.array([[-1.0]]),
        ub_rhs=np.array([-3.0]),
    )
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(3.0, abs=1e-9)


def test_contradictory_equalities_infeasible():
    lp = LinearProgram(
        objective=np.zeros(1),
        eq_matrix=np.array([[1.0], [1.0]]),
        eq_rhs=np.array([1.0, 2.0]),
    )
    assert solve(lp).status == "infeasible"


def test_unbounded_with_ray_certificate():
    lp = LinearProgram(objective=np.array([-1.0]))
    sol = solve(lp)
    assert sol.status == "unbounded"
    assert sol.ray is not None
    assert float(np.array([-1.0]) @ sol.ray) < 0.0


def test_free_variables_and_two_sided_bounds():
    # min x + y with x free below (x <= y + 1), -2 <= y <= 5: unbounded
    lp = LinearProgram(
        objective=np.array([1.0, 1.0]),
        ub_matrix=np.array([[1.0, -1.0]]),
        ub_rhs=np.array([1.0]),
        bounds=[(None, None), (-2.0, 5.0)],
    )
    sol = solve(lp)
    assert sol.status == "unbounded"

    lp2 = LinearProgram(
        objective=np.array([1.0, 1.0]),
        eq_matrix=np.array([[1.0, -1.0]]),
        eq_rhs=np.array([-1.0]),
        bounds=[(None, None), (-2.0, 5.0)],
    )
    sol2 = solve(lp2)
    assert sol2.status == "optimal"
    # x = y - 1 and both as small as possible: y = -2, x = -3
    assert sol2.objective_value == pytest.approx(-5.0, abs=1e-9)
    assert np.allclose(sol2.x, [-3.0, -2.0], atol=1e-9)


def test_fixed_variable_bounds():
    lp = LinearProgram(objective=np.array([2.0]), bounds=[(1.5, 1.5)])
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(3.0, abs=1e-12)


def test_crossing_bounds_infeasible():
    lp = LinearProgram(objective=np.array([1.0]), bounds=[(2.0, 1.0)])
    assert solve(lp).status == "infeasible"


def test_degenerate_program_terminates():
    # Beale's cycling-prone program under naive pivoting
    lp = LinearProgram(
        objective=np.array([-0.75, 150.0, -0.02, 6.0]),
        ub_matrix=np.array(
            [
                [0.25, -60.0, -0.04, 9.0],
                [0.5, -90.0, -0.02, 3.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        ),
        ub_rhs=np.array([0.0, 0.0, 1.0]),
    )
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(-0.05, abs=1e-9)


def test_size_budget_enforced():
    with pytest.raises(LpSizeError):
        solve(LinearProgram(objective=np.zeros(101)))


def test_optimal_solutions_satisfy_constraints():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m, n = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(0.0, 1.0, n)
        b = A @ x_feas
        c = rng.standard_normal(n)
        cap = np.vstack([np.ones(n)])
        lp = LinearProgram(
            objective=c,
            eq_matrix=A,
            eq_rhs=b,
            ub_matrix=cap,
            ub_rhs=np.array([50.0]),
        )
        sol = solve(lp)
        assert sol.status == "optimal"
        assert np.max(np.abs(A @ sol.x - b)) <= DEFAULT_TOLERANCES.feasibility * 10
        assert sol.x.min() >= -DEFAULT_TOLERANCES.feasibility


def test_random_battery_matches_enumeration():
    # smaller sibling of the acceptance battery for fast iteration
    rng = np.random.default_rng(3)
    for trial in range(120):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m + 1, 8))
        if trial % 3 == 0:
            A = rng.integers(-3, 4, size=(m, n)).astype(float)
            b = rng.integers(-3, 4, size=m).astype(float)
            c = rng.integers(-3, 4, size=n).astype(float)
        else:
            A = rng.standard_normal((m, n))
            b = rng.standard_normal(m)
            c = rng.standard_normal(n)
        # bounding row keeps the region a polytope so enumeration is conclusive
        A_ext = np.vstack([np.hstack([A, np.zeros((m, 1))]), np.ones(n + 1)])
        b_ext = np.concatenate([b, [100.0]])
        c_ext = np.concatenate([c, [0.0]])
        status, value = enumerate_standard_form(A_ext, b_ext, c_ext)
        sol = solve(LinearProgram(objective=c_ext, eq_matrix=A_ext, eq_rhs=b_ext))
        assert sol.status == status
        if status == "optimal":
            assert sol.objective_value == pytest.approx(value, abs=1e-8)


def test_dist_l1_already_inside(segment):
    dist, nearest = dist_l1_to_polyhedron(
        np.array([0.5, 0.5]), segment.columns, np.zeros(2), nonneg=True
    )
    assert dist == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(nearest, [0.5, 0.5], atol=1e-9)


def test_dist_l1_segment_example(segment):
    dist, nearest = dist_l1_to_polyhedron(
        np.array([1.0, 0.0]), segment.columns, np.zeros(2), nonneg=True
    )
    assert dist == pytest.approx(1.0, abs=1e-9)
    assert nearest[0] == pytest.approx(nearest[1], abs=1e-9)


def test_dist_l1_simplex_constrained(segment):
    rows = np.vstack([segment.columns, np.ones(2)])
    rhs = np.array([0.0, 0.0, 1.0])
    dist, nearest = dist_l1_to_polyhedron(np.array([1.0, 0.0]), rows, rhs, nonneg=True)
    assert dist == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(nearest, [0.5, 0.5], atol=1e-9)


def test_dist_l1_output_point_lies_in_target():
    rng = np.random.default_rng(9)
    for _ in range(25):
        m, n = int(rng.integers(1, 4)), int(rng.integers(2, 7))
        A = rng.standard_normal((m, n))
        b = A @ rng.uniform(0.0, 1.0, n)
        x0 = rng.uniform(-1.0, 2.0, n)
        dist, nearest = dist_l1_to_polyhedron(x0, A, b, nonneg=True)
        assert np.max(np.abs(A @ nearest - b)) <= 1e-9
        assert nearest.min() >= -1e-9
        assert np.abs(nearest - x0).sum() == pytest.approx(dist, abs=1e-8)


def test_dist_l1_empty_target():
    with pytest.raises(ValueError, match="empty"):
        dist_l1_to_polyhedron(
            np.zeros(1), np.array([[1.0], [1.0]]), np.array([1.0, 2.0]), nonneg=True
        )


def test_min_norm_on_face_examples():
    norm, q = min_norm_on_face(np.eye(2))
    assert norm == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)
    assert np.allclose(q, [0.5, 0.5], atol=1e-12)

    norm, q = min_norm_on_face(np.array([[1.0], [0.0]]))
    assert norm == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(q, [1.0])

    cols = np.column_stack([[1.0, 0.0], [np.cos(np.pi / 3), np.sin(np.pi / 3)]])
    norm, q = min_norm_on_face(cols)
    assert norm == pytest.approx(np.sqrt(3.0) / 2.0, abs=1e-12)


def test_min_norm_on_face_degenerate():
    with pytest.raises(DegenerateFaceError):
        min_norm_on_face(np.array([[1.0, 1.0], [0.0, 0.0]]))  # duplicate points


def test_dist_l2_to_halfspaces_examples():
    # quadrant corner: distance from the origin to {y >= (1, 1)}
    dist, point = dist_l2_to_halfspaces(np.zeros(2), np.eye(2), np.ones(2))
    assert dist == pytest.approx(np.sqrt(2.0), abs=1e-9)
    assert np.allclose(point, [1.0, 1.0], atol=1e-9)

    # already feasible
    dist, point = dist_l2_to_halfspaces(np.array([2.0, 3.0]), np.eye(2), np.ones(2))
    assert dist == 0.0

    # single halfplane: plain point-to-line distance
    normal = np.array([[3.0 / 5.0], [4.0 / 5.0]])
    dist, point = dist_l2_to_halfspaces(np.zeros(2), normal, np.array([2.0]))
    assert dist == pytest.approx(2.0, abs=1e-9)


def test_dist_l2_matches_grid_oracle():
    from oracles import halfplane_projection_grid

    rng = np.random.default_rng(21)
    for _ in range(10):
        normals = rng.standard_normal((2, 4))
        normals /= np.linalg.norm(normals, axis=0)
        offsets = rng.uniform(-1.0, 0.5, 4)
        point = rng.standard_normal(2)
        grid = halfplane_projection_grid(point, normals, offsets)
        if not np.isfinite(grid):
            continue
        exact, _ = dist_l2_to_halfspaces(point, normals, offsets)
        # grid pitch bounds the oracle error from above
        assert exact <= grid + 1e-9
        assert grid <= exact + 0.02
