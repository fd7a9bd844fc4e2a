"""Staeckel transforms as a swap of coupling constant and energy.

Write the source potential as ``V = alpha * g + W`` where ``g = U (f1 + f2)``
for a multiplier ``U``.  Dividing ``(H - E) Psi = 0`` by ``g`` gives

    H^ = (d11 + d22 + W - E (f1 + f2)) / g,      H^ Psi = -alpha Psi,

a separable system with ``f_i -> g_i`` and ``v_i -> w_i - E f_i``.  The
canonical equations only see ``v_i - H f_i``, so every source symmetry
``(F, G)`` becomes a target symmetry under ``alpha -> -H``, ``H -> E``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Algebra, ChartElement, RadicalExtension, StructuralError
from .charts import polar
from .diffop import DiffOperator, assemble_symmetry, commutator
from .linsolve import sparse_nullspace
from .lattice import (
    LatticeFailure, _field, _lattice_spec, build_operator, canonical_residuals, from_field,
    lattice_march, normalize_pq, symmetry_coefficients, to_field,
)
from .formats import parse_symmetry_file, read_data
from .system import SystemSpec

__all__ = [
    "StackelMap",
    "StackelFailure",
    "transform_spec",
    "transform_symmetry",
    "inverse_map",
    "ttw_spec",
    "kepler_map",
    "hyperboloid_map",
    "series_symmetries",
    "kepler_symmetry",
    "KEPLER_K2",
    "TransformedSymmetry",
    "hyperboloid_symmetry",
    "hyperboloid_potential",
    "embedding_potential",
    "untransform_symmetry",
]


class StackelFailure(StructuralError):
    """A transported symmetry fails the target canonical equations."""


@dataclass(frozen=True)
class StackelMap:
    """Multiplier ``U`` and the coupling it trades for the energy.

    ``energy`` names the new parameter carrying the old eigenvalue.
    ``aliases`` is presentation metadata (coordinate maps to the usual form
    of the target) and plays no role in verification.
    """

    source: SystemSpec
    U: str
    coupling: str | None
    energy: str = "E"
    target_id: str = ""
    aliases: tuple = ()

    @property
    def swap(self) -> dict[str, str]:
        """Source symbol -> target expression."""
        if self.is_identity():
            return {}
        return {self.coupling: "-H", "H": self.energy}

    def is_identity(self) -> bool:
        alg = self.source.algebra()
        return alg.parse(self.U) == alg.one()


def _split_coupling(v: ChartElement, name: str):
    parts = v.collect([name])
    if any(j not in (0, 1) for (j,) in parts):
        raise StructuralError(f"potential is not linear in {name}")
    zero = v.alg.zero()
    return parts.get((1,), zero), parts.get((0,), zero)


def transform_spec(m: StackelMap) -> SystemSpec:
    """Target system of the transform; ``U = 1`` is the identity."""
    src = m.source
    alg = src.algebra()
    U = alg.parse(m.U)
    if U.is_zero():
        raise StructuralError("Staeckel multiplier is identically zero")
    if m.is_identity():
        return src
    if m.coupling not in src.parameters:
        raise StructuralError(f"{m.coupling!r} is not a parameter of {src.id}")
    if m.energy in src.parameters or m.energy in ("H", "L2"):
        raise StructuralError(f"energy name {m.energy!r} collides with an existing symbol")
    f1, f2, v1, v2 = src.functions(alg)
    g1, w1 = _split_coupling(v1, m.coupling)
    g2, w2 = _split_coupling(v2, m.coupling)
    if not (U * (f1 + f2) - g1 - g2).is_zero():
        raise StructuralError(f"coupling term of {m.coupling} is not U * (f1 + f2)")
    params = tuple(p for p in src.parameters if p != m.coupling) + (m.energy,)
    # the old eigenvalue symbol H becomes the parameter named m.energy
    both = Algebra(src.chart, RadicalExtension(params + ("H", "L2", m.coupling), src.radicals))
    E = both.gen(m.energy)

    def out(e: ChartElement) -> str:
        return both.convert(e, {"H": E}).to_str()

    return SystemSpec(
        id=m.target_id or f"{src.id}-stackel",
        chart=src.chart,
        f1=out(g1),
        f2=out(g2),
        v1=out(w1) + " - " + f"({out(f1)})*{m.energy}",
        v2=out(w2) + " - " + f"({out(f2)})*{m.energy}",
        parameters=params,
        k=src.k,
        radicals=src.radicals,
        metric_sign=src.metric_sign,
        notes="; ".join(f"{a} = {b}" for a, b in m.aliases),
    )


def inverse_map(m: StackelMap) -> dict[str, str]:
    """Target symbol -> source expression, undoing :attr:`StackelMap.swap`."""
    if m.is_identity():
        return {}
    return {"H": f"-{m.coupling}", m.energy: "H"}


def _substitute(e: ChartElement, target_alg, mapping: dict[str, str]) -> ChartElement:
    return target_alg.convert(e, {k: target_alg.parse(v) for k, v in mapping.items()})


def transform_symmetry(m: StackelMap, F: ChartElement, G: ChartElement,
                       target: SystemSpec | None = None, check: bool = True):
    """Carry ``(F, G)`` of the source to the target and check the target
    canonical equations."""
    target = target or transform_spec(m)
    if target is m.source:
        return F, G
    alg = target.algebra()
    F2 = _substitute(F, alg, m.swap)
    G2 = _substitute(G, alg, m.swap)
    if check:
        r1, r2 = canonical_residuals(F2, G2, target)
        if not (r1.is_zero() and r2.is_zero()):
            raise StackelFailure("transported symmetry leaves nonzero canonical residuals")
    return F2, G2


def untransform_symmetry(m: StackelMap, F: ChartElement, G: ChartElement) -> tuple:
    """Inverse of :func:`transform_symmetry` (no check)."""
    if m.is_identity():
        return F, G
    alg = m.source.algebra()
    return _substitute(F, alg, inverse_map(m)), _substitute(G, alg, inverse_map(m))


# ------------------------------------------------------------------ Kepler
def ttw_spec(k=2) -> SystemSpec:
    """TTW in the double-angle chart: ``s = sin(2k theta)``, ``c = cos(2k theta)``,
    ``v2 = 2 (gamma + beta) / s^2 + 2 (gamma - beta) c / s^2``."""
    k = Fraction(k)
    return SystemSpec(
        id="TTW",
        chart=polar("trig", k, double=True),
        f1="eR^2",
        f2="0",
        v1="alpha*eR^4",
        v2="2*(gamma + beta)*s^-2 + 2*(gamma - beta)*c*s^-2",
        parameters=("alpha", "beta", "gamma"),
        k=k,
    )


def kepler_map(k=2) -> StackelMap:
    return StackelMap(ttw_spec(k), "eR^2", "alpha", "E", "KEPLER-DEF",
                      aliases=(("r", "exp(2R)"), ("phi", "2*theta")))


# printed k = 2 symmetry of the deformed Kepler-Coulomb system
KEPLER_K2 = {k: v for k, v in parse_symmetry_file(read_data("kepler_k2.sym")).items() if k in "ABCD"}


def series_symmetries(spec: SystemSpec, a_range, b_range) -> tuple[list[dict], tuple]:
    """Solve the canonical equations with

        F = sum A_{a,b,c} eR^(2a) s^b c^c,   G = sum B_{a,b,c} eR^(2a) s^b c^c

    over ``a in a_range``, ``b in b_range``, ``c in {0, 1}`` by exact
    elimination over ``Q(parameters, H, L2)``.  The direction ``G = const``
    is dropped.  Returns the nullspace basis (keys ``(comp, a, b, c)``) and
    the field's generator names.
    """
    names = tuple(spec.parameters) + ("H", "L2")
    K = _field(names)[0]
    alg = spec.algebra()
    keys = [(comp, a, b, c) for comp in "AB" for a in a_range for b in b_range for c in (0, 1)]
    keys.remove(("B", 0, 0, 0))
    cols, rowkeys = [], {}
    for comp, a, b, c in keys:
        E = alg.parse(f"eR^{2 * a}*s^{b}*c^{c}")
        F, G = (E, alg.zero()) if comp == "A" else (alg.zero(), E)
        col = {}
        for ridx, r in enumerate(canonical_residuals(F, G, spec)):
            for mono, coeff in r.collect(["eR", "s", "c"]).items():
                rk = (ridx,) + mono
                rowkeys.setdefault(rk, len(rowkeys))
                col[rk] = to_field(coeff, names)
        cols.append(col)
    rows = [dict() for _ in rowkeys]
    for j, col in enumerate(cols):
        for rk, v in col.items():
            rows[rowkeys[rk]][j] = v
    basis = [{keys[j]: v for j, v in vec.items()} for vec in sparse_nullspace(rows, len(keys), K)]
    return basis, names


@dataclass
class TransformedSymmetry:
    source_F: ChartElement
    source_G: ChartElement
    spec: SystemSpec
    F: ChartElement
    G: ChartElement
    A: ChartElement
    B: ChartElement
    C: ChartElement
    D: ChartElement
    operator: DiffOperator
    H_op: DiffOperator
    L2_op: DiffOperator
    support: list

    @property
    def order(self) -> int:
        return self.operator.order

    def commutator_with_H(self) -> DiffOperator:
        return commutator(self.H_op, self.operator)


def _assemble(F, G, spec) -> tuple:
    A, B, C, D = symmetry_coefficients(F, G, spec)
    H_op, L2_op = spec.quantum()
    return (A, B, C, D), assemble_symmetry(A, B, C, D, H_op, L2_op), H_op, L2_op


def kepler_symmetry(k=2, a_range=range(-3, 2), b_range=range(-2, 3)) -> TransformedSymmetry:
    """Solve TTW at index ``k`` in the series ansatz, normalize so that
    ``A_{-2,1,0} = 32 (L2 - 4)`` and ``A_{-1,1,0} = 0``, and transport the
    solution to the deformed Kepler-Coulomb system."""
    m = kepler_map(k)
    src = m.source
    basis, names = series_symmetries(src, a_range, b_range)
    K, *gens = _field(names)
    L2 = gens[names.index("L2")]
    t1, t2 = ("A", -2, 1, 0), ("A", -1, 1, 0)
    want = (32 * (L2 - 4), K.zero)
    vec = _normalize(basis, (t1, t2), want, K)
    F, G = src.algebra().zero(), src.algebra().zero()
    alg = src.algebra()
    for (comp, a, b, c), v in vec.items():
        term = from_field(v, alg, names) * alg.parse(f"eR^{2 * a}*s^{b}*c^{c}")
        if comp == "A":
            F = F + term
        else:
            G = G + term
    target = transform_spec(m)
    F2, G2 = transform_symmetry(m, F, G, target)
    (A, B, C, D), op, H_op, L2_op = _assemble(F2, G2, target)
    support = sorted(k for k, v in vec.items() if v != 0)
    return TransformedSymmetry(F, G, target, F2, G2, A, B, C, D, op, H_op, L2_op, support)


def _normalize(basis, targets, values, K):
    """Combination of ``basis`` with prescribed entries at ``targets``."""
    n = len(basis)
    if n == 0:
        raise LatticeFailure("only the trivial solution")
    m = [[b.get(t, K.zero) for b in basis] for t in targets]
    if n == 1:
        (x,), (y,) = m
        if x == 0:
            raise LatticeFailure("normalization entry vanishes on the solution")
        s = values[0] / x
        if s * y != values[1]:
            raise LatticeFailure("one-parameter family incompatible with the normalization")
        coeffs = [s]
    else:
        from sympy.polys.matrices import DomainMatrix

        M = DomainMatrix(m, (len(targets), n), K)
        rhs = DomainMatrix([[v] for v in values], (len(targets), 1), K)
        aug = M.hstack(rhs).rref()[0].to_Matrix()
        coeffs = [K.zero] * n
        piv = M.rref()[1]
        if len(piv) < len(targets):
            raise LatticeFailure("normalization does not fix the family")
        for r, c in enumerate(piv):
            coeffs[c] = K.from_sympy(aug[r, n])
    out = {}
    for b, c in zip(basis, coeffs):
        if c == 0:
            continue
        for key, v in b.items():
            out[key] = out.get(key, K.zero) + c * v
    return {k: v for k, v in out.items() if v != 0}


# -------------------------------------------------------------- hyperboloid
def hyperboloid_map(p: int, q: int) -> StackelMap:
    """Multiplier ``1/u1^2`` on the caged oscillator; ``(p, q)`` is taken in
    the even normalization used by the lattice solver."""
    p, q = normalize_pq(p, q)
    return StackelMap(_lattice_spec(p, q), "u1^-2", "alpha1", "E", "HYPERBOLOID-CAGED",
                      aliases=(("s0", "(1 + u1^2 + u2^2)/(2*u1)"), ("s1", "(1 - u1^2 - u2^2)/(2*u1)"),
                               ("s2", "u2/u1")))


def hyperboloid_symmetry(p: int, q: int, normalization: str = "default") -> TransformedSymmetry:
    """Lattice solution of the caged oscillator transported to the
    hyperboloid and reassembled against the target Hamiltonian."""
    m = hyperboloid_map(p, q)
    p, q = normalize_pq(p, q)
    solved = build_operator(lattice_march(p, q), normalization)
    # F = A; G is recovered from B = -F_2/2 - G_1, C = -F_1/2 + G_2
    F = solved.A
    G = _recover_G(solved.A, solved.B, solved.C)
    target = transform_spec(m)
    F2, G2 = transform_symmetry(m, F, G, target)
    (A, B, C, D), op, H_op, L2_op = _assemble(F2, G2, target)
    support = solved.state.support()
    return TransformedSymmetry(F, G, target, F2, G2, A, B, C, D, op, H_op, L2_op, support)


def _recover_G(F: ChartElement, B: ChartElement, C: ChartElement) -> ChartElement:
    half = Fraction(1, 2)
    G = (-B - half * F.diff(1)).antiderivative(0)
    rest = C + half * F.diff(0) - G.diff(1)
    if rest.coordinate_dependence(0):
        raise StackelFailure("B and C are not compatible with a single G")
    return G + rest.antiderivative(1)


def hyperboloid_potential(p: int, q: int) -> ChartElement:
    """``(v1 + v2)/(f1 + f2)`` of the transformed caged oscillator."""
    spec = transform_spec(hyperboloid_map(p, q))
    alg = spec.algebra()
    f1, f2, v1, v2 = spec.functions(alg)
    return (v1 + v2) * (f1 + f2).inverse()


def embedding_potential(p: int, q: int, alg) -> ChartElement:
    """The hyperboloid potential written through the embedding

        alpha2/s2^2 - E/(s0 + s1)^2 + w^2 (p^2 - q^2)/(s0 + s1)^4
            + w^2 q^2 (s0 - s1)/(s0 + s1)^3

    with ``s0, s1, s2`` expressed in ``u1, u2``."""
    half = Fraction(1, 2)
    u1, u2 = alg.gen("u1"), alg.gen("u2")
    inv1 = u1.inverse()
    s0 = half * (1 + u1 * u1 + u2 * u2) * inv1
    s1 = half * (1 - u1 * u1 - u2 * u2) * inv1
    s2 = u2 * inv1
    w, a2, E = alg.gen("w"), alg.gen("alpha2"), alg.gen("E")
    sp_ = (s0 + s1).inverse()
    return (a2 * s2.inverse() ** 2 - E * sp_ ** 2 + w * w * (p * p - q * q) * sp_ ** 4
            + w * w * q * q * (s0 - s1) * sp_ ** 3)

