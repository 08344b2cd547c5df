import math

import numpy as np
import pytest

from chebyshev_a3 import DomainError, critical as cr, torus
from chebyshev_a3 import surfaces as sf
from chebyshev_a3.poly import build_map, evaluate

PI = math.pi
B = cr.CriticalBranch


def test_det_dphi1_examples():
    assert cr.det_dphi1([1, 1, 1]) == 0
    assert abs(cr.det_dphi1([2, 1, 0.5])) == 0
    v = cr.det_dphi1([2, 3, 5])
    assert abs(v - (-5.7955)) < 1e-4
    assert abs(v - cr.fd_det_dphi1([2, 3, 5])[0]) < 1e-6 * abs(v)


def test_det_d_composite_examples():
    assert cr.det_d_composite([1, 1, 1], 2) == 0
    assert cr.det_d_composite([1.3, -1.3, 0.4j], 2) == 0
    t = np.array([2, 3, 5], dtype=complex)
    fd = np.linalg.det(cr.fd_jacobian(lambda x: torus.phi1(x**2), t))[0]
    assert abs(cr.det_d_composite(t, 2) - fd) < 1e-6 * abs(fd)


@pytest.mark.parametrize("d", [2, 3])
def test_quotient_identity(rng, d):
    m = build_map(d)
    t = rng.uniform(0.6, 1.6, (1000, 3)) * np.exp(1j * rng.uniform(0, 2 * PI, (1000, 3)))
    ratio = cr.det_d_composite(t, d) / cr.det_dphi1(t)
    fd = cr.fd_det_dp(m, torus.phi1(t))
    err = np.abs(ratio - fd) / np.abs(ratio)
    assert np.median(err) < 1e-8
    assert err.max() < 1e-6


def test_is_critical_examples():
    t1, t2, t3 = 0.7 + 0.2j, 1.3j, 0.9
    # t1 = -t4 means t1^2 t2 t3 = -1
    t1 = 1j / np.sqrt(t2 * t3)
    assert cr.is_critical([t1, t2, t3], 2)
    assert not cr.is_critical([2, 3, 5], 2)
    assert not cr.is_critical([1.5, 1.5, 0.3], 2)
    assert cr.is_critical([1.5, 1.5 * np.exp(2j * PI / 3), 0.3], 3)
    with pytest.raises(DomainError):
        cr.is_critical([1, 2, 3], 1)


def test_r3_residuals_examples(rng):
    a, b = rng.uniform(0, 2 * PI, 2)
    assert np.abs(cr.r3_residuals(1, 1, a, b)).max() < 1e-12
    assert np.abs(cr.r3_residuals(2, 0.5, a, PI)).max() < 1e-12
    assert np.abs(cr.r3_residuals(2, 2, PI / 4, PI / 4)).max() > 1
    with pytest.raises(DomainError):
        cr.r3_residuals(0, 1, 0, 0)


def test_r3_residuals_characterize_real_values(rng):
    # residuals vanish exactly where the critical value is real (z3 = conj z1, z2 real)
    for _ in range(50):
        r, R = rng.uniform(0.5, 2, 2)
        al, be = rng.uniform(0, 2 * PI, 2)
        z = cr.d2_critical_value(r * np.exp(1j * al), R * np.exp(1j * be))
        real = abs(z[2] - np.conj(z[0])) + abs(z[1].imag)
        res = np.abs(cr.r3_residuals(r, R, 2 * al + 2 * be, al - be)).max()
        assert (real < 1e-9) == (res < 1e-9)


def test_residual_jacobian_matches_fd(rng):
    x, y, a, b = rng.normal(size=4)
    J = cr._residual_jacobian(np.array([x]), np.array([y]), np.array([a]), np.array([b]))[0]
    h = 1e-6
    base = np.array([x, y, a, b])
    cols = []
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        p, m = base + e, base - e
        fp = cr.r3_residuals(np.exp(p[0]), np.exp(p[1]), p[2], p[3])
        fm = cr.r3_residuals(np.exp(m[0]), np.exp(m[1]), m[2], m[3])
        cols.append((fp - fm) / (2 * h))
    assert np.allclose(J, np.stack(cols, axis=-1), atol=1e-6)


def test_classify_branch_examples():
    assert cr.classify_branch(np.exp(1j), np.exp(2j)) is B.ASTROIDALHEDRON
    al = 0.6
    assert cr.classify_branch(2 * np.exp(1j * al), -0.5 * np.exp(1j * al)) is B.TOP_BOWL
    assert cr.classify_branch(2 * np.exp(1j * al), 0.5 * np.exp(1j * al)) is B.LOWER_BOWL
    assert cr.classify_branch(2j, -2j) is B.TOP_WHISKERS
    w = 2 * np.exp(0.25j * PI)
    assert cr.classify_branch(w, w) is B.LOWER_WHISKERS
    assert cr.classify_branch(2, 3) is B.NONE
    with pytest.raises(DomainError):
        cr.classify_branch(0, 1)


@pytest.mark.parametrize("branch", [b for b in B if b is not B.NONE])
def test_branches_are_real_critical_values(rng, branch):
    params, pre, val = cr.sample_branch(rng, branch, 1000)
    t2, t3 = pre[:, 1], pre[:, 2]
    assert all(cr.classify_branch(a, b) is branch for a, b in zip(t2[:50], t3[:50]))
    # preimages are critical for P^2 and the values lie in R3
    assert all(cr.is_critical(p, 2) for p in pre[:50])
    assert np.abs(val[:, 2] - np.conj(val[:, 0])).max() < 1e-9 * np.abs(val).max()
    assert np.abs(val[:, 1].imag).max() < 1e-9 * np.abs(val).max()
    # finite-difference Jacobian of P^2 is singular at phi1(preimage)
    z = torus.phi1(pre)
    m = build_map(2)
    J = cr.fd_jacobian(lambda w: evaluate(m, w), z)
    assert cr.normalized_det(J).max() < 1e-6


def test_branch_values_on_named_surfaces(rng):
    _, pre, val = cr.sample_branch(rng, B.ASTROIDALHEDRON, 200)
    d, _, _ = sf.surface_distance(torus.to_pq(val), "astroidalhedron")
    assert d.max() < 1e-9
    for br, which in ((B.TOP_BOWL, "top"), (B.LOWER_BOWL, "lower")):
        _, _, val = cr.sample_branch(rng, br, 200)
        d, u, v = sf.surface_distance(torus.to_pq(val))
        assert d.max() < 1e-9
        w = (v + 2 * np.cos(2 * u)) / 2
        assert np.all(w >= 1 - 1e-9) if which == "top" else np.all(w <= -1 + 1e-9)
    for br, which in ((B.TOP_WHISKERS, "top"), (B.LOWER_WHISKERS, "lower")):
        params, _, val = cr.sample_branch(rng, br, 50)
        assert np.allclose(val, sf.whisker_point(which, params[:, 0]))


def test_branch_csv(rng):
    params, _, val = cr.sample_branch(rng, B.TOP_BOWL, 3)
    text = cr.branch_csv([(B.TOP_BOWL, params, torus.to_pq(val))])
    rows = text.strip().split("\n")
    assert rows[0] == "branch,param1,param2,p1,p2,q" and len(rows) == 4
    assert rows[1].startswith("TopBowl,")


def test_stray_search_small():
    rep = cr.stray_solution_search(trials=2000, seed=1)
    assert rep.below_threshold == 0
    assert rep.best_max_residual > rep.threshold
    import json

    assert json.loads(rep.to_json())["trials"] == 2000


def test_stray_search_finds_planted_family():
    # with the exclusion margin switched off the search must find the bowl family
    rep = cr.stray_solution_search(trials=500, seed=2, margin=0.0)
    assert rep.best_max_residual < 1e-8


@pytest.mark.parametrize("which", ["top", "lower"])
def test_whisker_absorption(which):
    out = cr.whisker_absorption(which, [1.2, 1.5, 2.0, 3.0])
    assert all(str(c) == "FatouFixed(P2)" for c in out)


def test_quartic_discriminant_examples():
    assert abs(cr.quartic_discriminant(cr.QuarticForm(1, 0, -1 / 3, 0, 1))) < 1e-14
    assert abs(cr.quartic_discriminant(cr.QuarticForm(1, 0, 0, 0, 1))) > 0.5
    with pytest.raises(DomainError):
        cr.quartic_discriminant(cr.QuarticForm(0, 0, 0, 0, 0))


def test_discriminant_is_invariant_form(rng):
    for _ in range(100):
        q = cr.QuarticForm(*rng.normal(size=5))
        I, J = q.invariants()
        assert math.isclose(cr.quartic_discriminant(q), I**3 - 27 * J**2, rel_tol=1e-9, abs_tol=1e-12)


def test_discriminant_vs_root_oracle(rng):
    agree = 0
    for k in range(200):
        if k % 2:
            # plant a double root at x/y = s
            s, u, v = rng.normal(size=3)
            c = np.polymul(np.polymul([1, -s], [1, -s]), [1, u, v])
        else:
            c = rng.normal(size=5)
        q = cr.QuarticForm(c[0], c[1] / 4, c[2] / 6, c[3] / 4, c[4])
        agree += (abs(cr.relative_discriminant(q)) < 1e-8) == cr.has_repeated_root(q)
    assert agree == 200


def test_complex_params_form(rng):
    p = cr.ComplexQuarticParams(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)), rng.normal())
    f = p.to_form()
    x, y = rng.normal(size=2)
    assert math.isclose(f(x, y), p(x, y), rel_tol=1e-12)


def test_q0_examples():
    g = 1.7
    assert np.isclose(cr.q0_beta(0, g), -1 - g)
    assert np.isclose(cr.q0_beta(PI, g), 1 + g)
    assert np.allclose(cr.ps_to_dynamics(-4, 3), [4, 6, 4])
    z = cr.ps_to_dynamics(cr.q0_beta(0, -3), -3)
    assert np.allclose(z, [-2, -6, -2])
    d, _, _ = sf.surface_distance(torus.to_pq(z))
    assert d[0] < 1e-12
    b, gg = cr.dynamics_to_ps(z)
    assert np.isclose(b, 2) and np.isclose(gg, -3)


def test_q0_is_degenerate_quartic(rng):
    for phi, g in zip(rng.uniform(0, 2 * PI, 50), rng.uniform(-4, 4, 50)):
        q = cr.ComplexQuarticParams(1.0, complex(cr.q0_beta(phi, g)), g).to_form()
        assert abs(cr.relative_discriminant(q)) < 1e-9


def test_q0_developable_params(rng):
    phi, g = rng.uniform(0, 2 * PI, 100), rng.uniform(-5, 5, 100)
    pts = torus.to_pq(cr.ps_to_dynamics(cr.q0_beta(phi, g), g))
    u, v = cr.q0_developable_params(phi, g)
    assert np.abs(sf.tangent_developable(u, v) - pts).max() < 1e-12


@pytest.mark.parametrize("which", ["top", "lower"])
def test_whiskers_in_quartic_chart(which):
    for r in (1.2, 2.0, 3.5):
        beta, gamma = sf.whisker_point_quartic_chart(which, r)
        q = cr.ComplexQuarticParams(1.0, complex(beta), float(gamma)).to_form()
        assert abs(cr.relative_discriminant(q)) < 1e-9
        assert np.allclose(cr.ps_to_dynamics(beta, gamma), sf.whisker_point(which, r))


def test_double_root_on_circle(rng):
    assert cr.double_root_on_circle(4, 6)
    z = torus.phi1(np.exp(1j * np.array([0.3, 1.4, 2.9])))
    assert not cr.double_root_on_circle(z[0], z[1])
    u, v = rng.uniform(0, 2 * PI, 100), rng.uniform(-6, 6, 100)
    p = sf.tangent_developable(u, v)
    assert all(cr.double_root_on_circle(complex(a, b), c) for a, b, c in p)
    assert not cr.double_root_on_circle(0, 10)
