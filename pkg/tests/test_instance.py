import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linfeas.instance import (
    IngestError,
    PrimalDirection,
    SimplexPoint,
    column_space_basis,
    combine,
    gram,
    gram_norm,
    ingest,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    project_to_column_space,
    save_instance,
)


def test_ingest_rescales_columns():
    inst = ingest([[2.0, 0.0], [0.0, 3.0]], normalize=True)
    assert np.allclose(inst.columns.T, [[1.0, 0.0], [0.0, 1.0]])
    assert inst.normalized


def test_ingest_single_column():
    inst = ingest([[1.0, 0.0]], normalize=False)
    assert inst.d == 2 and inst.n == 1
    assert inst.rank == 1


def test_ingest_zero_column_named():
    with pytest.raises(IngestError, match="index 0"):
        ingest([[0.0, 0.0], [1.0, 0.0]], normalize=True)


def test_ingest_ragged_rejected():
    with pytest.raises(IngestError, match="ragged"):
        ingest([[1.0, 0.0], [1.0]])


def test_ingest_nonfinite_rejected():
    with pytest.raises(IngestError):
        ingest([[np.nan, 0.0]], normalize=False)


def test_gram_orthonormal(axes):
    assert np.allclose(gram(axes), np.eye(2))


def test_gram_antipodal(segment):
    assert np.allclose(gram(segment), [[1.0, -1.0], [-1.0, 1.0]])


def test_gram_oblique_pair():
    oblique = np.array([1.0, 1.0]) / np.sqrt(2.0)
    inst = ingest([[1.0, 0.0], oblique.tolist()], normalize=False)
    expected = float(np.array([1.0, 0.0]) @ oblique)  # direct dot product
    assert gram(inst)[0, 1] == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(1.0 / np.sqrt(2.0))


def test_basis_antipodal_rank_one(segment):
    basis = column_space_basis(segment)
    assert basis.rank == 1
    assert abs(abs(basis.basis[0, 0]) - 1.0) <= 1e-12


def test_basis_rank_two_in_r3():
    inst = ingest([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], normalize=False)
    assert column_space_basis(inst).rank == 2


def test_basis_near_duplicate_collapses_at_default_tol():
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    v = np.array([1.0, 1.0 + 1e-14])
    v = v / np.linalg.norm(v)
    inst = ingest([u.tolist(), v.tolist()], normalize=False)
    assert inst.rank == 1


def test_basis_custom_tol_raises_rank():
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    v = np.array([1.0, 1.0 + 1e-11])
    v = v / np.linalg.norm(v)
    inst = ingest([u.tolist(), v.tolist()], normalize=False)
    assert inst.rank == 1
    assert column_space_basis(inst, tol=1e-13).rank == 2


def test_basis_reconstructs_columns():
    rng = np.random.default_rng(5)
    cols = rng.standard_normal((6, 3))
    inst = ingest(cols.tolist(), normalize=False)
    basis = inst.basis
    for i in range(inst.n):
        col = inst.columns[:, i]
        residual = np.linalg.norm(col - basis.project(col))
        assert residual <= 1e-8 * max(1.0, np.linalg.norm(col))
    identity = basis.basis.T @ basis.basis
    assert np.max(np.abs(identity - np.eye(basis.rank))) <= 1e-10


def test_combine_examples(axes, segment):
    assert np.allclose(combine(axes, SimplexPoint(np.array([0.5, 0.5]))), [0.5, 0.5])
    assert np.allclose(combine(axes, SimplexPoint.unit_mass(2, 1)), axes.column(1))
    assert np.allclose(combine(segment, SimplexPoint(np.array([0.5, 0.5]))), [0.0, 0.0])


def test_combine_dimension_mismatch(axes):
    with pytest.raises(ValueError):
        combine(axes, np.array([1.0, 0.0, 0.0]))


def test_project_examples(segment):
    assert np.allclose(project_to_column_space(segment, np.array([0.0, 1.0])).vector, 0.0)
    assert np.allclose(project_to_column_space(segment, np.array([3.0, 4.0])).vector, [3.0, 0.0])
    inside = project_to_column_space(segment, np.array([0.25, 0.0]))
    assert inside.in_column_space
    assert np.allclose(inside.vector, [0.25, 0.0], atol=1e-12)


def test_simplex_point_validation():
    with pytest.raises(ValueError):
        SimplexPoint(np.array([0.5, 0.4]))  # sum != 1
    with pytest.raises(ValueError):
        SimplexPoint(np.array([1.1, -0.1]))  # negative beyond tolerance
    clamped = SimplexPoint(np.array([1.0, -1e-13, 1e-13]))
    assert clamped.weights[1] == 0.0 and clamped.weights[2] == 0.0
    assert clamped.support == (0,)


def test_simplex_point_from_approximate():
    point = SimplexPoint.from_approximate(np.array([0.5, 0.5 + 3e-10, -2e-10]))
    assert point.weights[2] == 0.0
    assert point.weights.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        SimplexPoint.from_approximate(np.array([1.0, -1e-3]))


def test_primal_direction_unit():
    direction = PrimalDirection(np.array([3.0, 4.0]))
    assert direction.unit().norm == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        PrimalDirection(np.zeros(2)).unit()


def test_json_round_trip(tmp_path, triangle):
    path = save_instance(triangle, tmp_path / "tri.json", metadata={"note": 1})
    loaded = load_instance(path)
    assert loaded.name == triangle.name
    assert np.allclose(loaded.columns, triangle.columns)
    payload = instance_to_dict(triangle)
    assert set(payload) == {"name", "columns", "normalize"}
    again = instance_from_dict(payload)
    assert np.allclose(again.columns, triangle.columns)


def test_from_dict_missing_columns():
    with pytest.raises(IngestError):
        instance_from_dict({"name": "broken"})


@st.composite
def small_instances(draw):
    d = draw(st.integers(min_value=1, max_value=4))
    n = draw(st.integers(min_value=1, max_value=6))
    entries = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)
    cols = draw(
        st.lists(
            st.lists(entries, min_size=d, max_size=d).filter(
                lambda c: np.linalg.norm(c) > 1e-3
            ),
            min_size=n,
            max_size=n,
        )
    )
    return ingest(cols, normalize=draw(st.booleans()))


@st.composite
def weight_vectors(draw, n):
    raw = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=n, max_size=n
        ).filter(lambda w: sum(w) > 1e-6)
    )
    w = np.array(raw)
    return w / w.sum()


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_image_norm_matches_gram_seminorm(data):
    inst = data.draw(small_instances())
    weights = data.draw(weight_vectors(inst.n))
    image = np.linalg.norm(combine(inst, weights))
    seminorm = gram_norm(inst, weights)
    assert image == pytest.approx(seminorm, rel=1e-10, abs=1e-10)


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_projection_idempotent_and_nonexpansive(data):
    inst = data.draw(small_instances())
    w = np.array(
        data.draw(
            st.lists(
                st.floats(min_value=-4.0, max_value=4.0, allow_nan=False),
                min_size=inst.d,
                max_size=inst.d,
            )
        )
    )
    once = project_to_column_space(inst, w).vector
    twice = project_to_column_space(inst, once).vector
    assert np.max(np.abs(once - twice)) <= 1e-10 * max(1.0, np.linalg.norm(once))
    assert np.linalg.norm(once) <= np.linalg.norm(w) + 1e-12


@given(inst=small_instances())
@settings(max_examples=40, deadline=None)
def test_normalized_instances_have_unit_gram_diagonal(inst):
    if inst.normalized:
        assert np.max(np.abs(np.diag(gram(inst)) - 1.0)) <= 1e-12
