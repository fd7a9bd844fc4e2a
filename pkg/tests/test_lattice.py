import pytest
from hypothesis import given, strategies as st

from superint.lattice import (
    OFFSETS, TABULATED_SUPPORT_64, A_, B_, _field, _lattice_spec, assemble_recurrence, build_operator,
    canonical_residuals, derived_recurrence, generic_elimination, in_span, lattice_march,
    load_dump, dump_state, normalize_pq, to_field,
)

PAIRS = [(2, 2), (6, 4), (4, 6), (2, 6)]


# ------------------------------------------------------------ canonical equations
def test_trivial_pairs_solve_canonical_equations():
    spec = _lattice_spec(6, 4)
    alg = spec.algebra()
    z = alg.zero()
    assert all(r.is_zero() for r in canonical_residuals(z, z, spec))
    assert all(r.is_zero() for r in canonical_residuals(z, alg.parse("3*H"), spec))


def test_solved_pair_solves_canonical_equations():
    solved = build_operator(lattice_march(6, 4), "tabulated")
    spec = _lattice_spec(6, 4)
    F = solved.A
    # G is recovered from B = -F_2/2 - G_1 up to a function of u2, fixed by C
    G = (-solved.B - F.diff(1) / 2).antiderivative(0)
    rest = solved.C + F.diff(0) / 2 - G.diff(1)
    G = G + rest.antiderivative(1)
    assert all(r.is_zero() for r in canonical_residuals(F, G, spec))


# ------------------------------------------------------------ templates
def test_template_entries():
    p, q = 6, 4
    alg = _lattice_spec(p, q).algebra()
    for a, b in ((1, 1), (2, 4), (3, 3)):
        t = {m.offset: m for m in assemble_recurrence(p, q, a, b)}
        assert t[(0, 0)].entry(0, 0) == alg.parse(
            f"2*w^2*({(b + 1) * q - (a + 1) * p})*({(b + 1) * q + (a + 1) * p})")
        lower = t[(-1, 1)]
        assert lower.entry(1, 0) == alg.parse(f"2*w^2*{p * p * a * (b + 1)}")
        assert lower.entry(0, 0).is_zero() and lower.entry(0, 1).is_zero() and lower.entry(1, 1).is_zero()


def test_offsets_are_the_ten_template_points():
    got = {m.offset for m in derived_recurrence(6, 4, 2, 2) if not m.is_zero()}
    assert got == set(OFFSETS)
    assert len(OFFSETS) == 10


@given(p=st.sampled_from([2, 4, 6, 8]), q=st.sampled_from([2, 6, 10]),
       a=st.integers(0, 6), b=st.integers(0, 6))
def test_printed_templates_match_canonical_equations(p, q, a, b):
    from math import gcd
    if gcd(p, q) != 2:
        return
    printed = assemble_recurrence(p, q, a, b)
    derived = derived_recurrence(p, q, a, b)
    for x, y in zip(printed, derived):
        assert x.offset == y.offset
        for i in range(2):
            for j in range(2):
                assert x.entry(i, j) == y.entry(i, j)


@given(a=st.integers(0, 8), b=st.integers(0, 8))
def test_recurrence_preserves_parity(a, b):
    """Every template offset has even coordinate sum, so points of opposite
    parity never couple."""
    for m in derived_recurrence(6, 4, a, b):
        if not m.is_zero():
            assert (m.offset[0] + m.offset[1]) % 2 == 0


@pytest.mark.parametrize("pq", PAIRS)
def test_march_solution_has_parity_structure(pq):
    state = lattice_march(*pq)
    for (a, b, comp) in state.values:
        assert (a + b) % 2 == 0
        assert (a % 2 == 1) == (comp == A_)


# ------------------------------------------------------------ march vs brute force
@pytest.mark.parametrize("pq", PAIRS)
def test_march_lies_in_generic_nullspace(pq):
    state = lattice_march(*pq)
    null = generic_elimination(*pq)
    assert null
    for vec in state.basis():
        assert in_span(vec, null)
    assert in_span(dict(state.values), null)


def test_zero_vector_is_in_nullspace():
    assert in_span({}, generic_elimination(2, 2))


@pytest.mark.parametrize("pq", PAIRS)
def test_first_sweep_relation(pq):
    """Top-row equation at b = p - 2, specialized from the general row
    recurrence: the coefficient of A_{q-1,p-1} is 2 w^2 p^2 (p-1) q."""
    p, q = pq
    K, w, al1, al2, H, L2 = _field()
    for vec in lattice_march(p, q).basis():
        lhs = 2 * w ** 2 * p ** 2 * (p - 1) * q * vec.get((q - 1, p - 1, A_), K.zero)
        rhs = (-8 * w ** 2 * q ** 2 * (p - 1) * vec.get((q, p - 2, B_), K.zero)
               + 2 * L2 * p * (p - 1) * vec.get((q, p, B_), K.zero))
        assert lhs == rhs


# ------------------------------------------------------------ the (6,4) solution
def test_64_family_support_and_free_parameters():
    state = lattice_march(6, 4)
    assert state.family_dimension == 2
    fam = state.family_support()
    assert fam["A"] == sorted(TABULATED_SUPPORT_64["A"])
    assert fam["B"] == sorted((b, a) for a, b in TABULATED_SUPPORT_64["B"])
    assert len(fam["A"]) + len(fam["B"]) == 17
    # A_{1,5} and A_{3,3} parametrize the family
    m = [[v.get(t, 0) for v in state.basis()] for t in ((1, 5, A_), (3, 3, A_))]
    assert m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0


def test_64_operator():
    solved = build_operator(lattice_march(6, 4), "tabulated")
    alg = solved.A.alg
    lead = solved.A.collect(["u1", "u2"])[(1, 1)]
    assert (lead - alg.parse("9/4096*w^2*L2^2")).collect(["L2"]).get((2,)) is None
    assert solved.commutator_with_H().is_zero()
    assert not solved.commutator_with_L2().is_zero()


@pytest.mark.parametrize("pq, order", [((2, 2), 2), ((6, 4), 8), ((4, 6), 8), ((2, 6), 6)])
def test_default_orders_are_frozen(pq, order):
    solved = build_operator(lattice_march(*pq))
    assert solved.order == order
    assert solved.commutator_with_H().is_zero()


def test_k1_operator_is_frozen():
    solved = build_operator(lattice_march(2, 2))
    alg = solved.A.alg
    assert solved.A == alg.parse("u1*u2")
    assert solved.B == alg.parse("1/2*u1")
    assert solved.C == alg.parse("1/2*u2")
    assert solved.D == alg.parse("4*u1^2*u2^2*w^2 + 1/2*u1^2*L2 - 1/2*u2^2*H - 1/2*u2^2*L2")


def test_zero_state_gives_zero_operator():
    from superint.lattice import LatticeState
    solved = build_operator(LatticeState(2, 2))
    assert solved.operator.is_zero()


def test_dump_round_trip():
    state = lattice_march(6, 4)
    p, q, values = load_dump(dump_state(state))
    assert (p, q) == (6, 4)
    got = {k: to_field(v) for k, v in values.items() if not v.is_zero()}
    assert got == {k: v for k, v in state.values.items() if v != 0}


@pytest.mark.parametrize("pq, want", [((1, 1), (2, 2)), ((3, 2), (6, 4)), ((3, 4), (6, 8)),
                                       ((6, 4), (6, 4)), ((4, 4), (2, 2)), ((2, 6), (2, 6))])
def test_normalize_pq(pq, want):
    assert normalize_pq(*pq) == want


def test_bad_rectangles_rejected():
    with pytest.raises(ValueError):
        lattice_march(3, 2)
    with pytest.raises(ValueError):
        lattice_march(4, 8)
