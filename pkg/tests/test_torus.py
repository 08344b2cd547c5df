import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebyshev_a3 import DomainError, InternalError, torus
from chebyshev_a3.poly import build_map, evaluate, homogeneous_leading

PI = math.pi
R2 = math.sqrt(2)


def test_phi1_examples():
    assert np.allclose(torus.phi1([1, 1, 1]), [4, 6, 4])
    assert np.allclose(torus.phi1([1j, 1j, 1j]), [4j, -6, -4j])
    assert np.allclose(torus.phi1([1, -1, 1]), [0, -2, 0])
    with pytest.raises(DomainError):
        torus.phi1([0, 1, 1])
    with pytest.raises(DomainError):
        torus.TorusPoint(1, 0, 1)


def test_torus_point():
    t = torus.TorusPoint(2, 3j, 0.5)
    assert abs(np.prod(t.all4()) - 1) < 1e-14
    assert np.allclose(torus.phi1(t), torus.phi1(t.as_array()))


def test_phi2_examples():
    assert np.allclose(torus.phi2(1, 1, 1), [1, 2, 1])
    assert np.allclose(torus.phi2(1, -1, 1), [1, -2, 1])
    with pytest.raises(DomainError):
        torus.phi2(1, 0, 1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_leading_part_semiconjugate_to_powers(rng, d):
    # the leading part commutes with phi2 for either branch of the square roots
    t = np.exp(1j * rng.uniform(0, 2 * PI, (3, 200)))
    roots = np.sqrt(t) * rng.choice([-1, 1], size=t.shape)
    x, y, z = roots
    lead = homogeneous_leading(build_map(d))
    p = torus.phi2(x, y, z)
    lhs = np.stack([h.evaluate(p) for h in lead], axis=-1)
    assert np.abs(lhs - torus.phi2(x**d, y**d, z**d)).max() < 1e-12


def test_coordinate_change_examples():
    assert np.allclose(torus.angles_to_s([0, 0, 0]), [0, 0, 0])
    assert np.allclose(torus.angles_to_s([-PI, PI, PI]), [PI, 0, PI])
    assert np.allclose(torus.angles_to_s([PI / 2, PI / 2, PI / 2]), [0, -PI / R2, PI])


def test_coordinate_change_inverse(rng):
    a = rng.uniform(-10, 10, (1000, 3))
    assert np.abs(torus.s_to_angles(torus.angles_to_s(a)) - a).max() < 1e-13


def test_reflection_examples(rng):
    assert np.allclose(torus.reflect(0, [1, 1, 3]), [1, 1, 2 * PI - 3])
    x = rng.normal(size=3)
    assert np.allclose(torus.reflect(2, x), [-x[0], x[1], x[2]])
    for k in range(1, 4):
        a = torus.SIMPLE_ROOTS[k - 1]
        on_mirror = x - (x @ a) / (a @ a) * a
        assert np.allclose(torus.reflect(k, on_mirror), on_mirror)
        assert np.allclose(torus.reflect(k, torus.reflect(k, x)), x)
    with pytest.raises(DomainError):
        torus.reflect(4, x)


def test_reflections_are_isometries(rng):
    x, y = rng.normal(size=(2, 3))
    for k in range(4):
        d0 = np.linalg.norm(x - y)
        assert math.isclose(np.linalg.norm(torus.reflect(k, x) - torus.reflect(k, y)), d0)


def test_reflection_invariance_of_phi1(rng):
    a = rng.uniform(0, 2 * PI, (1000, 3))
    base = torus.phi1_angles(a)
    for k in range(4):
        assert np.abs(torus.phi1_angles(torus.reflect_angles(k, a)) - base).max() < 1e-12


def test_alcove_vertices():
    assert np.allclose(torus.ALCOVE_VERTICES[1], [0, -PI / R2, PI])
    assert np.allclose(torus.ALCOVE_VERTICES[2], [PI, 0, PI])
    assert np.allclose(torus.ALCOVE_VERTICES[3], [0, PI / R2, PI])
    assert np.all(torus.in_alcove(torus.ALCOVE_VERTICES))


def test_fold_examples(rng):
    s = torus.sample_alcove(rng, 1)[0]
    f, w = torus.fold(s)
    assert len(w) == 0 and np.allclose(f, s)
    f, w = torus.fold([0, 0, 1.5 * PI])
    assert np.allclose(f, [0, 0, PI / 2]) and w.letters == (0,)


def test_fold_word_recovers_point(rng):
    for s in rng.uniform(-20, 20, (200, 3)):
        f, w = torus.fold(s)
        assert torus.in_alcove(np.array(f), 1e-10)
        assert np.abs(w.apply(np.array(f)) - s).max() < 1e-12
        assert np.abs(w.forward(s) - np.array(f)).max() < 1e-12


def test_fold_preserves_phi1(rng):
    s = rng.uniform(-100 * PI, 100 * PI, (10_000, 3)) / math.sqrt(3)
    f = torus.fold_batch(s)
    assert np.all(torus.in_alcove(f, 1e-9))
    lhs = torus.phi1_angles(torus.s_to_angles(s))
    rhs = torus.phi1_angles(torus.s_to_angles(f))
    assert np.abs(lhs - rhs).max() < 1e-10


def test_fold_budget():
    with pytest.raises(InternalError):
        torus.fold([1000.0, 0, 0], budget=3)
    with pytest.raises(InternalError):
        torus.fold_batch(np.array([[1000.0, 0, 0]]), budget=3)


def test_k_membership_examples():
    assert torus.k_membership(4, 6)
    assert not torus.k_membership(4.1, 6)
    assert torus.k_membership(0, -2)
    assert torus.k_status(4, 6) == "member"
    assert torus.k_status(10, 6) == "outside"
    with pytest.raises(DomainError):
        torus.k_membership(0, 1j)


def test_k_membership_batch(rng):
    z = torus.sample_k(rng, 500)
    assert torus.k_membership_batch(z[:, 0], z[:, 1]).all()
    out = torus.phi1(np.exp(0.5 + 1j * rng.uniform(0, 6, (50, 3))))
    assert not torus.k_membership_batch(out[:, 0], out[:, 1], out[:, 2]).any()


def test_inverse_phi1_examples():
    assert np.allclose(torus.inverse_phi1([4, 6, 4]), [0, 0, 0])
    assert np.allclose(torus.inverse_phi1([0, -2, 0]), [0, 0, PI])
    assert np.allclose(torus.inverse_phi1([4j, -6, -4j]), [PI / 2] * 3)
    with pytest.raises(DomainError):
        torus.inverse_phi1([10, 6, 10])


def test_inverse_phi1_roundtrip(rng):
    s = torus.sample_alcove(rng, 500)
    a = torus.s_to_angles(s)
    for ang, z in zip(a, torus.phi1_angles(a)):
        inv = torus.inverse_phi1(z)
        assert torus.in_natural_domain(np.array(inv), 1e-9)
        assert np.abs(torus.phi1_angles(np.array(inv)) - z).max() < 1e-10
        assert np.allclose(inv, ang, atol=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.floats(-3 * PI, 3 * PI) for _ in range(3)]))
def test_inverse_phi1_property(a):
    z = torus.phi1_angles(np.array(a))
    inv = torus.inverse_phi1(z)
    assert np.abs(torus.phi1_angles(np.array(inv)) - z).max() < 1e-7


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_semiconjugacy(rng, d):
    t = rng.uniform(0.5, 2, (10_000, 3)) * np.exp(1j * rng.uniform(0, 2 * PI, (10_000, 3)))
    lhs = evaluate(build_map(d), torus.phi1(t))
    rhs = torus.phi1(t**d)
    err = np.abs(lhs - rhs).max(axis=1) / np.abs(rhs).max(axis=1)
    assert err.max() < 1e-9


@pytest.mark.parametrize("d", [2, 3, 5])
def test_real_slice_invariant(rng, d):
    p = rng.normal(size=(200, 3)) * 2
    z = torus.from_pq(p)
    w = evaluate(build_map(d), z)
    scale = np.abs(w).max(axis=1)
    assert np.max(np.abs(w[:, 2] - np.conj(w[:, 0])) / scale) < 1e-12
    assert np.max(np.abs(w[:, 1].imag) / scale) < 1e-12


def test_pq_roundtrip_and_csv(rng):
    z = torus.sample_k(rng, 3)
    assert np.allclose(torus.from_pq(torus.to_pq(z)), z)
    text = torus.k_samples_csv(z)
    lines = text.strip().split("\n")
    assert lines[0] == "p1,p2,q" and len(lines) == 4
