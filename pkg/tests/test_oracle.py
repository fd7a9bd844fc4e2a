import numpy as np
import pytest

from superint.charts import cartesian
from superint.classical import catalog_spec, construct_constant
from superint.diffop import compose
from superint.lattice import build_operator, lattice_march
from superint.oracle import (
    H_TOL, K_TOL, conservation_drifts, evaluate_expression, integrate_hamilton, numeric_zero,
    random_point,
)
from superint.system import SystemSpec, caged_oscillator


def test_evaluate_one():
    alg = caged_oscillator(6, 4).algebra(momenta=True)
    pt = random_point(alg, np.random.default_rng(0), 7)
    assert np.all(evaluate_expression(alg.one(), pt) == 1.0)


def test_points_avoid_the_origin():
    alg = caged_oscillator(6, 4).algebra(momenta=True)
    pt = random_point(alg, np.random.default_rng(1), 500)
    mags = np.abs(np.concatenate([pt.u.ravel(), pt.p.ravel()]))
    assert mags.min() >= 0.5 and mags.max() <= 2.0


def test_definitional_identity_vanishes_numerically():
    spec = caged_oscillator(6, 4)
    H, _ = spec.classical()
    alg = H.alg
    explicit = alg.parse("p1^2 + p2^2 + w^2*(36*u1^2 + 16*u2^2) + alpha1*u1^-2 + alpha2*u2^-2")
    pt = random_point(alg, np.random.default_rng(2), 20)
    diff = evaluate_expression(H, pt) - evaluate_expression(explicit, pt)
    assert np.max(np.abs(diff)) < 1e-12


def test_numeric_shadow_of_exact_commutator():
    solved = build_operator(lattice_march(6, 4), "tabulated")
    H, L = solved.H_op, solved.operator
    f = H.alg.parse("u1^3*u2^2 + 2*u1*u2^4 - u1^2 + 3")
    HL = compose(H, L).apply(f)
    LH = compose(L, H).apply(f)
    assert numeric_zero(HL - LH) == 0.0
    # evaluated separately, the two sides agree to double precision
    pt = random_point(H.alg, np.random.default_rng(3), 20)
    extra = {"H": np.full(20, 1.3 + 0j), "L2": np.full(20, -0.7 + 0j)}
    a, b = evaluate_expression(HL, pt, extra), evaluate_expression(LH, pt, extra)
    assert np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))) < 1e-8


def test_free_particle_moves_in_straight_lines():
    spec = SystemSpec("FREE", cartesian(), "1", "0", "0", "0", ())
    alg = spec.algebra(momenta=True)
    pt = random_point(alg, np.random.default_rng(4), 3)
    times, samples, ok = integrate_hamilton(spec, pt, dt=1e-3, steps=2000)
    assert ok.all()
    end = samples[-1]
    assert np.allclose(end.u, pt.u + 2 * pt.p * times[-1], atol=1e-12)
    assert np.allclose(end.p, pt.p, atol=1e-12)


def test_isotropic_oscillator_period():
    spec = catalog_spec("E1", 1)
    alg = spec.algebra(momenta=True)
    w = 1.3
    pt = random_point(alg, np.random.default_rng(5), 4, fixed={"w": w, "beta": 0, "gamma": 0})
    period = 2 * np.pi / (2 * w)
    steps = 10_000
    _, samples, ok = integrate_hamilton(spec, pt, dt=period / steps, steps=steps)
    assert ok.all()
    assert np.max(np.abs(samples[-1].u - pt.u)) < 1e-6
    assert np.max(np.abs(samples[-1].p - pt.p)) < 1e-6


def test_energy_calibration():
    res = conservation_drifts(catalog_spec("E1", 1), None, seeds=range(5))
    assert all(r.h_drift <= H_TOL for r in res)


def test_commuting_invariant_is_conserved():
    spec = catalog_spec("E1", 1)
    _, L2 = spec.classical()
    res = conservation_drifts(spec, L2, seeds=range(5))
    assert all(r.calibrated and r.k_drift <= 1e-8 for r in res)


def test_extracted_constant_is_conserved():
    c = construct_constant("E17", 3)
    for K in (c.K_sinh, c.K_cosh):
        res = conservation_drifts(c.spec, K, seeds=range(5), candidates=8)
        assert all(r.calibrated for r in res)
        assert max(r.k_drift for r in res) <= K_TOL


def test_non_constant_is_caught():
    spec = catalog_spec("E1", 2)
    alg = spec.algebra(momenta=True)
    res = conservation_drifts(spec, alg.parse("u1*p2"), seeds=range(3))
    assert all(r.k_drift > 1e-3 for r in res)
