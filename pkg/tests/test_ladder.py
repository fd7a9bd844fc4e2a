from math import gcd

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from superint.algebra import NotClosed
from superint.diffop import commutator
from superint.ladder import (
    A1, A2, MU, GaugeFunction, apply_Dminus, apply_Dplus, apply_hamiltonian_1d,
    cartesian_hamiltonian, composite_coefficient, composite_operator, composite_symmetry,
    eigenfunction, energy, index_action, laguerre, printed_energy, recurrence_residuals,
    separation_constant,
)

a, x = sp.symbols("a x")


# ------------------------------------------------------------ Laguerre
def test_low_degrees():
    assert sp.expand(laguerre(0).expr(x)) == 1
    assert sp.expand(laguerre(1).expr(x) - (1 + a - x)) == 0


@pytest.mark.parametrize("n", range(11))
def test_agrees_with_sympy_assoc_laguerre(n):
    assert sp.expand(laguerre(n).expr(x) - sp.assoc_laguerre(n, a, x)) == 0


@pytest.mark.parametrize("n", range(11))
def test_both_recurrences(n):
    r1, r2 = recurrence_residuals(n)
    assert r1 == 0 and r2 == 0


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        laguerre(-1)


# ------------------------------------------------------------ ladder actions
@pytest.mark.parametrize("n", range(6))
def test_raising(n):
    assert index_action("+", n) == (n + 1, sp.factor(-4 * MU * (n + 1)))


def test_raising_examples():
    assert index_action("+", 0)[1] == -4 * MU
    assert index_action("+", 3)[1] == -16 * MU


@pytest.mark.parametrize("m", range(1, 7))
def test_lowering(m):
    target, c = index_action("-", m)
    assert target == m - 1
    assert sp.expand(c - (-4 * MU * (m + a))) == 0


def test_lowering_bottom_state_vanishes():
    assert index_action("-", 0) == (-1, 0)


@pytest.mark.parametrize("n", range(5))
def test_separation_constant(n):
    target, lam = index_action("H", n)
    assert target == n
    assert sp.expand(lam - separation_constant(n)) == 0
    assert sp.expand(lam + 2 * MU * (2 * n + a + 1)) == 0


@pytest.mark.parametrize("n", range(4))
def test_ladder_on_full_functions(n):
    """Direct differentiation of the full eigenfunctions, bypassing the
    gauge-space conjugation."""
    mu = sp.Symbol("mu", positive=True)
    zz = sp.Symbol("zz", positive=True)
    gauge = sp.exp(-mu * zz ** 2 / 2) * zz ** (a + sp.Rational(1, 2))
    X = lambda k: gauge * sp.assoc_laguerre(k, a, mu * zz ** 2)
    pot = (sp.Rational(1, 4) - a ** 2) / zz ** 2

    def reduced(e):
        return sp.expand(sp.powsimp(sp.expand(e / gauge), force=True))

    f = X(n)
    dplus = sp.diff(f, zz, 2) - 2 * mu * zz * sp.diff(f, zz) + (-mu + mu ** 2 * zz ** 2 + pot) * f
    assert reduced(dplus + 4 * mu * (n + 1) * X(n + 1)) == 0
    if n:
        dminus = sp.diff(f, zz, 2) + 2 * mu * zz * sp.diff(f, zz) + (mu + mu ** 2 * zz ** 2 + pot) * f
        assert reduced(dminus + 4 * mu * (n + a) * X(n - 1)) == 0


def test_parameter_mismatch_leaves_gauge_space():
    with pytest.raises(NotClosed):
        apply_Dplus(2 * MU, eigenfunction(1))
    with pytest.raises(NotClosed):
        apply_Dminus(2 * MU, eigenfunction(1))


def test_ground_state_payload():
    psi = GaugeFunction(MU, a, sp.Integer(1))
    assert apply_hamiltonian_1d(psi).ratio_to(psi) == sp.factor(separation_constant(0))


# ------------------------------------------------------------ composite symmetry
def test_printed_composite_coefficient():
    n, m = sp.symbols("n m")
    _, c = composite_symmetry(2, 1, n, m)
    assert sp.expand(c - (-128 * MU ** 3 * (n + 1) * (m + A2) * (m - 1 + A2))) == 0


def test_simplest_composite_coefficient():
    n, m = sp.symbols("n m")
    target, c = composite_symmetry(1, 1, n, m)
    assert target == (n + 1, m - 1)
    assert sp.expand(c - 16 * MU ** 2 * (n + 1) * (m + A2)) == 0


@pytest.mark.parametrize("p, q, n, m", [(2, 1, 0, 3), (2, 1, 2, 2), (1, 2, 1, 1), (3, 2, 1, 3)])
def test_direct_composite_matches_chained(p, q, n, m):
    _, direct = composite_symmetry(p, q, n, m)
    assert sp.expand(direct - composite_coefficient(p, q, n, m)) == 0


def test_composite_annihilates_low_states():
    assert composite_symmetry(2, 1, 0, 1)[1] == 0


PQ = [(p, q) for p in range(1, 5) for q in range(1, 5) if gcd(p, q) == 1]


@pytest.mark.parametrize("p, q", PQ)
def test_energy_invariance(p, q):
    for n in range(11):
        for m in range(11):
            assert sp.expand(energy(p, q, n, m) - energy(p, q, n + q, m - p)) == 0
            assert sp.expand(printed_energy(p, q, n, m) - printed_energy(p, q, n + q, m - p)) == 0


def test_energy_example():
    assert energy(3, 2, 1, 3) == energy(3, 2, 3, 0)


@given(p=st.integers(1, 4), q=st.integers(1, 4), n=st.integers(0, 20), m=st.integers(0, 20))
def test_energy_is_sum_of_separation_constants(p, q, n, m):
    e = energy(p, q, n, m)
    assert sp.expand(e - separation_constant(n, p * MU, A1) - separation_constant(m, q * MU, A2)) == 0


@pytest.mark.parametrize("p, q", [(1, 1), (2, 1), (1, 2)])
def test_composite_operator_commutes(p, q):
    assert commutator(cartesian_hamiltonian(p, q), composite_operator(p, q)).is_zero()
    assert composite_operator(p, q).order == 2 * (p + q)
