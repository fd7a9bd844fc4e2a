import sympy as sp
from hypothesis import given, strategies as st

from superint.diffop import DiffOperator, assemble_symmetry, commutator, compose, parse_operator
from superint.lattice import build_operator, lattice_march
from superint.system import caged_oscillator

from strategies import CART, elements, operators


def d(m, n, alg=CART):
    return DiffOperator.partial(alg, m, n)


# ------------------------------------------------------------ properties
@given(P=operators(CART), Q=operators(CART), f=elements(CART))
def test_composition_acts_as_successive_application(P, Q, f):
    assert compose(P, Q).apply(f) == P.apply(Q.apply(f))


@given(P=operators(CART), Q=operators(CART), R=operators(CART, max_order=1))
def test_composition_is_associative(P, Q, R):
    assert compose(compose(P, Q), R) == compose(P, compose(Q, R))


@given(P=operators(CART), Q=operators(CART))
def test_commutator_antisymmetry(P, Q):
    assert commutator(P, Q) == -commutator(Q, P)
    assert commutator(P, P).is_zero()


@given(P=operators(CART, 1), Q=operators(CART, 1), R=operators(CART, 1))
def test_commutator_jacobi(P, Q, R):
    total = (commutator(P, commutator(Q, R)) + commutator(Q, commutator(R, P))
             + commutator(R, commutator(P, Q)))
    assert total.is_zero()


@given(P=operators(CART))
def test_text_round_trip(P):
    assert parse_operator(CART, P.to_str()) == P


# ------------------------------------------------------------ examples
def test_canonical_commutation():
    u1 = DiffOperator.multiplication(CART.gen("u1"))
    assert compose(d(1, 0), u1) == compose(u1, d(1, 0)) + DiffOperator.identity(CART)


def test_identity_and_partials():
    H, _ = caged_oscillator(6, 4).quantum()
    one = DiffOperator.identity(H.alg)
    assert compose(H, one) == H
    assert commutator(H, H).is_zero()
    assert commutator(d(1, 0), d(0, 1)).is_zero()


def test_caged_hamiltonian_commutes_with_separation_operator():
    for p, q in ((6, 4), (2, 2), (3, 5)):
        H, L2 = caged_oscillator(p, q).quantum()
        assert commutator(H, L2).is_zero()


def test_assemble_trivial_coefficients():
    H, L2 = caged_oscillator(2, 2).quantum()
    alg = H.alg
    z = alg.zero()
    assert assemble_symmetry(z, z, z, alg.one(), H, L2) == DiffOperator.identity(alg)
    assert assemble_symmetry(z, z, z, alg.gen("H"), H, L2) == H
    assert assemble_symmetry(z, z, z, alg.gen("L2"), H, L2) == L2


# ------------------------------------------------------------ independent oracle
def _sympy(e):
    return sp.sympify(e.to_str().replace("^", "**"))


def _apply_sympy(op, f, u1, u2):
    out = 0
    for (m, n), c in op.terms.items():
        out += _sympy(c) * sp.diff(f, u1, m, u2, n) if m or n else _sympy(c) * f
    return out


def test_lattice_operator_commutes_under_sympy():
    """The (2,2) symmetry, re-assembled and commuted by sympy on an
    arbitrary function, independently of the normal-ordering code."""
    u1, u2 = sp.symbols("u1 u2")
    f = sp.Function("f")(u1, u2)
    solved = build_operator(lattice_march(2, 2))
    H, L = solved.H_op, solved.operator
    res = _apply_sympy(H, _apply_sympy(L, f, u1, u2), u1, u2) \
        - _apply_sympy(L, _apply_sympy(H, f, u1, u2), u1, u2)
    assert sp.expand(res) == 0
