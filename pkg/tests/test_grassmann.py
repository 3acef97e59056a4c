import numpy as np
import pytest

from lagflow.errors import InputError, PreconditionError
from lagflow.grassmann import (
    J_matrix,
    LagrangianFrame,
    cayley_graph,
    chart_coordinates,
    chart_point,
    graph_projection,
    lagrangian_to_unitary,
    reflection_of,
    standard_lagrangians,
    switched_graph,
    unitary_of_operator,
)
from lagflow.linalg import (
    numeric_kernel,
    subspace_intersection_dim,
    subspaces_equal,
)

from conftest import random_hermitian, random_unitary, unitary_with_phases


def test_standard_lagrangians():
    hp, hm = standard_lagrangians(2)
    assert np.allclose(hp.frame, np.vstack([np.eye(2), np.zeros((2, 2))]))
    assert np.allclose(hm.frame, np.vstack([np.zeros((2, 2)), np.eye(2)]))


def test_j_swaps_standard_lagrangians():
    hp, hm = standard_lagrangians(1)
    jhp = J_matrix(1) @ hp.frame
    assert subspace_intersection_dim(jhp, hm.frame) == 1


def test_frame_validation():
    bad = np.vstack([np.eye(2), np.zeros((2, 2))]) * 2.0
    with pytest.raises(InputError):
        LagrangianFrame(bad)
    # orthonormal but not lagrangian: graph of a non-symmetric map
    cols = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(InputError):
        LagrangianFrame(cols / np.linalg.norm(cols, axis=0))


def test_cayley_graph_extremes():
    hp, hm = standard_lagrangians(1)
    assert subspaces_equal(cayley_graph(np.eye(1)).frame, hp.frame)
    assert subspaces_equal(cayley_graph(-np.eye(1)).frame, hm.frame)


def test_cayley_graph_of_i():
    target = np.array([[1.0], [-1.0]]) / np.sqrt(2.0)
    assert subspaces_equal(cayley_graph(np.array([[1j]])).frame, target)


def test_cayley_kernel_intersection(rng):
    # dim(C(U) ∩ H-) = dim Ker(1+U)
    u = unitary_with_phases([np.pi, np.pi, 0.7, -1.1], rng)
    lag = cayley_graph(u)
    hm = standard_lagrangians(4)[1]
    assert subspace_intersection_dim(lag.frame, hm.frame) == 2
    assert numeric_kernel(np.eye(4) + u).shape[1] == 2


def test_arnold_roundtrip(rng):
    for n in range(1, 9):
        for _ in range(5):
            u = random_unitary(n, rng)
            back = lagrangian_to_unitary(cayley_graph(u))
            assert np.abs(back - u).max() < 1e-9


def test_lagrangian_to_unitary_standard():
    hp, hm = standard_lagrangians(3)
    assert np.allclose(lagrangian_to_unitary(hp), np.eye(3))
    assert np.allclose(lagrangian_to_unitary(hm), -np.eye(3))


def test_reflection_properties(rng):
    n = 3
    u = random_unitary(n, rng)
    lag = cayley_graph(u)
    r = reflection_of(lag)
    j = J_matrix(n)
    assert np.abs(r @ r - np.eye(2 * n)).max() < 1e-10
    assert np.abs(r - r.conj().T).max() < 1e-10
    assert np.abs(r @ j + j @ r).max() < 1e-10


def test_reflection_standard():
    hp, hm = standard_lagrangians(2)
    assert np.allclose(reflection_of(hp), np.diag([1, 1, -1, -1]))
    assert np.allclose(reflection_of(hm), np.diag([-1, -1, 1, 1]))


def test_reflection_sum_kernel(rng):
    # Ker(R_L + R_{H+}) = (L ∩ H-) + (L-perp ∩ H+) has dim 2 dim Ker(1+U),
    # and the H- pairing picks up Ker(1-U) instead
    u = unitary_with_phases([np.pi, 0.4, 2.0], rng)
    hp, hm = standard_lagrangians(3)
    lag = cayley_graph(u)
    assert numeric_kernel(reflection_of(lag) + reflection_of(hp)).shape[1] == 2
    assert numeric_kernel(reflection_of(lag) + reflection_of(hm)).shape[1] == 0
    u2 = unitary_with_phases([0.0, 0.4, 2.0], rng)
    lag2 = cayley_graph(u2)
    assert numeric_kernel(reflection_of(lag2) + reflection_of(hm)).shape[1] == 2


def test_graph_projection_at_zero(rng):
    hp = standard_lagrangians(3)[0]
    p = graph_projection(hp, np.zeros((3, 3)))
    assert np.allclose(p, hp.projection())


def test_graph_projection_scalar_example():
    hp = standard_lagrangians(1)[0]
    p = graph_projection(hp, np.array([[1.0]]))
    assert np.allclose(p, 0.5 * np.array([[1, -1], [-1, 1]]))


def test_graph_projection_matches_frames(rng):
    for n in (2, 4, 6):
        base = cayley_graph(random_unitary(n, rng))
        s = random_hermitian(n, rng)
        p_formula = graph_projection(base, s)
        p_frame = chart_point(base, s).projection()
        assert np.abs(p_formula - p_frame).max() < 1e-9
        assert np.abs(p_formula @ p_formula - p_formula).max() < 1e-10
        assert np.abs(p_formula - p_formula.conj().T).max() < 1e-10


def test_chart_point_via_cayley(rng):
    # graph over H+ of coordinate A equals C((i-A)(i+A)^{-1})
    n = 3
    hp = standard_lagrangians(n)[0]
    a = random_hermitian(n, rng)
    u = (1j * np.eye(n) - a) @ np.linalg.inv(1j * np.eye(n) + a)
    assert subspaces_equal(chart_point(hp, a).frame, cayley_graph(u).frame)


def test_chart_point_transversal_to_complement(rng):
    n = 3
    base = cayley_graph(random_unitary(n, rng))
    s = random_hermitian(n, rng)
    perp = J_matrix(n) @ base.frame
    assert subspace_intersection_dim(chart_point(base, s).frame, perp) == 0


def test_chart_coordinates_roundtrip(rng):
    for n in (1, 2, 5):
        base = cayley_graph(random_unitary(n, rng))
        s = random_hermitian(n, rng)
        back = chart_coordinates(chart_point(base, s), base)
        assert np.abs(back - s).max() < 1e-9


def test_chart_coordinates_identity():
    hp = standard_lagrangians(2)[0]
    assert np.abs(chart_coordinates(hp, hp)).max() < 1e-12


def test_chart_coordinates_not_in_chart():
    hp, hm = standard_lagrangians(2)
    with pytest.raises(PreconditionError, match="not in chart"):
        chart_coordinates(hm, hp)


def test_switched_graph_examples(rng):
    hm = standard_lagrangians(2)[1]
    assert subspaces_equal(switched_graph(np.zeros((2, 2))).frame, hm.frame)
    one = switched_graph(np.eye(1))
    assert subspaces_equal(one.frame, np.array([[1.0], [1.0]]) / np.sqrt(2))
    # kernel of T shows up as the intersection with H-; H+ never meets
    # a switched graph ((Tv, v) horizontal forces v = 0)
    t = np.diag([0.0, 2.0, 0.0]).astype(complex)
    hp3, hm3 = standard_lagrangians(3)
    assert subspace_intersection_dim(switched_graph(t).frame, hm3.frame) == 2
    assert subspace_intersection_dim(switched_graph(t).frame, hp3.frame) == 0


def test_unitary_of_operator(rng):
    assert np.allclose(unitary_of_operator(np.zeros((1, 1))), -np.eye(1))
    assert np.allclose(unitary_of_operator(np.eye(1)), np.array([[-1j]]))
    for n in (2, 4):
        t = random_hermitian(n, rng)
        u = unitary_of_operator(t)
        assert np.abs(u.conj().T @ u - np.eye(n)).max() < 1e-10
        assert subspaces_equal(cayley_graph(u).frame, switched_graph(t).frame)


def test_frame_gauge_invariance(rng):
    n = 4
    u = random_unitary(n, rng)
    lag = cayley_graph(u)
    gauge = LagrangianFrame(lag.frame @ random_unitary(n, rng))
    assert np.abs(reflection_of(lag) - reflection_of(gauge)).max() < 1e-9
    assert np.abs(lagrangian_to_unitary(lag) - lagrangian_to_unitary(gauge)).max() < 1e-9
    base = standard_lagrangians(n)[0]
    s1 = chart_coordinates(lag, base)
    s2 = chart_coordinates(gauge, base)
    assert np.abs(s1 - s2).max() < 1e-9
