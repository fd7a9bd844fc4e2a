import pytest
from hypothesis import given, strategies as st

from superint.algebra import StructuralError
from superint.diffop import assemble_symmetry, commutator
from superint.formats import parse_symmetry_file, read_data
from superint.lattice import build_operator, lattice_march, normalize_pq
from superint.stackel import (
    KEPLER_K2, StackelMap, embedding_potential, hyperboloid_map, hyperboloid_potential,
    hyperboloid_symmetry, kepler_map, kepler_symmetry, transform_spec, transform_symmetry,
    ttw_spec, untransform_symmetry,
)
from superint.system import caged_oscillator


# ------------------------------------------------------------ specs
def test_ttw_to_kepler_spec():
    target = transform_spec(kepler_map(2))
    alg = target.algebra()
    assert alg.parse(target.f1) == alg.parse("eR^4")
    assert alg.parse(target.v1) == alg.parse("-E*eR^2")
    assert alg.parse(target.f2).is_zero()
    assert "alpha" not in target.parameters and "E" in target.parameters


def test_caged_to_hyperboloid_spec():
    m = hyperboloid_map(6, 4)
    target = transform_spec(m)
    alg = target.algebra()
    assert alg.parse(target.f1) == alg.parse("u1^-2")
    assert alg.parse(target.v1) == alg.parse("36*w^2*u1^2 - E")
    assert alg.parse(target.v2) == alg.parse("16*w^2*u2^2 + alpha2*u2^-2")


def test_identity_map():
    src = caged_oscillator(2, 2)
    m = StackelMap(src, "1", None)
    assert m.is_identity()
    assert transform_spec(m) is src
    alg = src.algebra()
    F, G = alg.parse("u1*u2"), alg.parse("H*u1^2")
    assert transform_symmetry(m, F, G) == (F, G)


def test_bad_multipliers():
    src = caged_oscillator(2, 2)
    with pytest.raises(StructuralError):
        transform_spec(StackelMap(src, "0", "alpha1"))
    with pytest.raises(StructuralError):
        transform_spec(StackelMap(src, "u1^-4", "alpha1"))
    with pytest.raises(StructuralError):
        transform_spec(StackelMap(src, "u1^-2", "zeta"))
    with pytest.raises(StructuralError):
        transform_spec(StackelMap(src, "u1^-2", "alpha1", energy="H"))


def test_swap_round_trip():
    m = hyperboloid_map(2, 2)
    alg = m.source.algebra()
    for text in ("u1*u2*H*alpha1", "H^2*L2 - alpha1^3*u1^-2 + w", "alpha2*H*alpha1*u2"):
        F = alg.parse(text)
        F2, G2 = transform_symmetry(m, F, alg.zero(), check=False)
        back, _ = untransform_symmetry(m, F2, G2)
        assert back == F


_terms = st.lists(st.tuples(st.integers(-3, 3).filter(bool), st.integers(-2, 3), st.integers(0, 3),
                            st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), max_size=5)


@given(terms=_terms)
def test_swap_round_trip_property(terms):
    m = hyperboloid_map(6, 4)
    alg = m.source.algebra()
    F = alg.zero()
    for c, e1, e2, eh, el, ea in terms:
        F = F + alg.parse(f"{c}*u1^{e1}*u2^{e2}*H^{eh}*L2^{el}*alpha1^{ea}")
    F2, _ = transform_symmetry(m, F, alg.zero(), check=False)
    assert untransform_symmetry(m, F2, F2)[0] == F


def test_transported_symmetry_satisfies_target_equations():
    from superint.lattice import canonical_residuals
    hs = hyperboloid_symmetry(2, 2)
    assert hs.source_F == build_operator(lattice_march(2, 2)).A
    assert all(r.is_zero() for r in canonical_residuals(hs.F, hs.G, hs.spec))


# ------------------------------------------------------------ Kepler k = 2
def test_printed_kepler_table_commutes():
    spec = transform_spec(kepler_map(2))
    alg = spec.algebra()
    H, L2 = spec.quantum()
    A, B, C, D = (alg.parse(KEPLER_K2[n]) for n in "ABCD")
    assert A == alg.parse("32*eR^-4*s*L2 - 128*eR^-4*s")
    op = assemble_symmetry(A, B, C, D, H, L2)
    assert op.order == 5
    assert commutator(H, op).is_zero()
    assert not commutator(L2, op).is_zero()


def test_kepler_from_ttw_reproduces_printed_table():
    ks = kepler_symmetry(2)
    alg = ks.A.alg
    for n in "ABCD":
        assert getattr(ks, n) == alg.parse(KEPLER_K2[n]), n
    assert ks.commutator_with_H().is_zero()
    assert ("A", -2, 1, 0) in ks.support and ("A", -1, 1, 0) not in ks.support


def test_symmetry_file_header():
    meta = parse_symmetry_file(read_data("kepler_k2.sym"))
    assert meta["system"] == "KEPLER-DEF"
    assert meta["k"] == "2"


# ------------------------------------------------------------ hyperboloid
@pytest.mark.parametrize("pq, order", [((2, 2), 2), ((6, 4), 8)])
def test_hyperboloid_symmetry(pq, order):
    hs = hyperboloid_symmetry(*pq)
    assert hs.order == order
    assert hs.commutator_with_H().is_zero()
    assert not commutator(hs.L2_op, hs.operator).is_zero()


@pytest.mark.parametrize("pq", [(2, 2), (6, 4), (3, 2), (1, 2)])
def test_hyperboloid_potential_identity(pq):
    V = hyperboloid_potential(*pq)
    assert (V - embedding_potential(*normalize_pq(*pq), V.alg)).is_zero()
