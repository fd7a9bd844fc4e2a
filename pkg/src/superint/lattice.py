"""Canonical symmetry equations and the lattice recurrence for the caged oscillator.

A symmetry is sought in the form ``A d12 + B d1 + C d2 + D`` with coefficients
depending on ``u1, u2`` and on the commuting symbols ``H, L2``.  Writing
``A = F``, ``B = -F_2/2 - G_1``, ``C = -F_1/2 + G_2`` leaves two equations in
``F, G``; expanding both in monomials ``u1^a u2^b`` gives a ten-point matrix
recurrence on the integer lattice.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable

from gmpy2 import mpq
from sympy import QQ, symbols

from .algebra import ChartElement, NotClosed, StructuralError
from .linsolve import sparse_nullspace, sparse_rank
from .diffop import DiffOperator, assemble_symmetry, commutator
from .system import SystemSpec, caged_oscillator

__all__ = [
    "CanonicalSystem", "canonical_residuals", "canonical_system", "TemplateMatrix",
    "OFFSETS", "normalize_pq", "assemble_recurrence", "derived_recurrence",
    "LatticeState", "lattice_march", "generic_elimination", "build_operator",
    "SolvedOperator", "LatticeFailure", "dump_state", "load_dump", "PARAMS",
    "TABULATED_SUPPORT_64", "in_span", "to_field", "from_field", "symmetry_coefficients",
]

PARAMS = ("w", "alpha1", "alpha2", "H", "L2")
OFFSETS = ((0, 0), (-1, 1), (0, 2), (0, 4), (1, -1), (1, 1), (1, 3), (2, 0), (3, 1), (4, 0))

# nonzero coefficients of the (6,4) solution as printed: A-list in (row, column)
# order, B-list with indices transposed (see notes on orientation in the README)
TABULATED_SUPPORT_64 = {
    "A": [(1, 1), (1, 3), (1, 5), (3, 1), (3, 3), (3, 5)],
    "B": [(0, 2), (0, 4), (2, 0), (2, 2), (2, 4), (4, 0), (4, 2), (4, 4), (6, 0), (6, 2), (6, 4)],
}


class LatticeFailure(StructuralError):
    """The march cannot proceed (vanishing pivot or only the zero solution)."""


# ---------------------------------------------------------------- canonical form
@dataclass
class CanonicalSystem:
    """``A, B, C`` from ``(F, G)`` and the two left-over residuals.

    ``X`` and ``Y`` are the parts of the first-order conditions not involving
    ``D``, so that ``2 D_1 = -X`` and ``2 D_2 = -Y``.  ``r1`` is their
    integrability condition and ``r2`` the zeroth-order condition after
    eliminating ``D``.
    """

    F: ChartElement
    G: ChartElement
    A: ChartElement
    B: ChartElement
    C: ChartElement
    X: ChartElement
    Y: ChartElement
    r1: ChartElement
    r2: ChartElement


def canonical_system(F: ChartElement, G: ChartElement, spec: SystemSpec,
                     H: str = "H", L2: str = "L2") -> CanonicalSystem:
    alg = F.alg
    if G.alg is not alg:
        raise StructuralError("F and G live in different algebras")
    f1, f2, v1, v2 = spec.functions(alg)
    Hs, Ls = alg.gen(H), alg.gen(L2)
    half = Fraction(1, 2)
    A = F
    B = -half * F.diff(1) - G.diff(0)
    C = -half * F.diff(0) + G.diff(1)
    A1, A2 = A.diff(0), A.diff(1)
    f1p, f2p, v1p, v2p = f1.diff(0), f2.diff(1), v1.diff(0), v2.diff(1)
    X = (B.diff(0).diff(0) + B.diff(1).diff(1) - 2 * A2 * v2 - A * v2p
         + (2 * A2 * f2 + A * f2p) * Hs - 2 * A2 * Ls)
    Y = (C.diff(0).diff(0) + C.diff(1).diff(1) - 2 * A1 * v1 - A * v1p
         + (2 * A1 * f1 + A * f1p) * Hs + 2 * A1 * Ls)
    r1 = Y.diff(0) - X.diff(1)
    B1, C2 = B.diff(0), C.diff(1)
    r2 = (-half * X.diff(0) - half * Y.diff(1) - 2 * B1 * v1 - 2 * C2 * v2 - B * v1p - C * v2p
          + (2 * B1 * f1 + 2 * C2 * f2 + B * f1p + C * f2p) * Hs + (2 * B1 - 2 * C2) * Ls)
    return CanonicalSystem(F, G, A, B, C, X, Y, r1, r2)


def canonical_residuals(F: ChartElement, G: ChartElement, spec: SystemSpec):
    """Residuals ``(r1, r2)`` of the two canonical equations; both vanish exactly
    when ``(F, G)`` comes from a symmetry operator."""
    cs = canonical_system(F, G, spec)
    return cs.r1, cs.r2


# ---------------------------------------------------------------- templates
@dataclass(frozen=True)
class TemplateMatrix:
    offset: tuple[int, int]
    entries: tuple[tuple[ChartElement, ChartElement], tuple[ChartElement, ChartElement]]

    def entry(self, i, j) -> ChartElement:
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)


def normalize_pq(p: int, q: int) -> tuple[int, int]:
    """Map a ratio ``p/q`` to the even pair with a single common factor 2."""
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    g = gcd(p, q)
    if p % 2 == 0 and q % 2 == 0 and g == 2:
        return p, q
    p, q = p // g, q // g
    return 2 * p, 2 * q


def _check_pq(p, q):
    if p <= 0 or q <= 0 or p % 2 or q % 2 or gcd(p, q) != 2:
        raise ValueError(f"(p, q) = ({p}, {q}) must be even with gcd exactly 2")


_SPECS: dict = {}


def _lattice_spec(p, q) -> SystemSpec:
    spec = _SPECS.get((p, q))
    if spec is None:
        spec = _SPECS[(p, q)] = caged_oscillator(p, q)
    return spec


def assemble_recurrence(p: int, q: int, a: int, b: int, alg=None) -> list[TemplateMatrix]:
    """The ten template matrices anchored at ``(a, b)``, as printed."""
    _check_pq(p, q)
    if alg is None:
        alg = _lattice_spec(p, q).algebra()
    w2 = alg.parse("w^2")
    H, L, al1, al2 = alg.gens("H", "L2", "alpha1", "alpha2")
    z = alg.zero()
    Fr = Fraction

    def diag(x, y):
        return ((x, z), (z, y))

    def anti(x, y):
        return ((z, x), (y, z))

    ents = {
        (0, 0): diag(2 * w2 * ((b + 1) * q - (a + 1) * p) * ((b + 1) * q + (a + 1) * p),
                     -2 * w2 * (b * q - a * p) * (b * q + a * p)),
        (-1, 1): anti(z, 2 * w2 * p * p * a * (b + 1)),
        (0, 2): diag(2 * L * (b + 2) * (b + 1), -2 * L * (b + 2) * (b + 1)),
        (0, 4): diag(Fr(1, 2) * (b + 3) * (b + 1) * (b * b + 6 * b + 4 * al2 + 8),
                     -Fr(1, 2) * (b + 4) * (b + 2) * (b * b + 4 * b + 4 * al2 + 3)),
        (1, -1): anti(z, 2 * w2 * q * q * b * (a + 1)),
        (1, 1): anti(z, -2 * H * (a + 1) * (b + 1)),
        (1, 3): anti(alg.const(2 * (a + 1) * (b + 3) * (b + 2) * (b + 1)),
                     Fr(1, 2) * (a + 1) * (b + 2) * (b * b + 4 * b + 4 * al2 + 3)),
        (2, 0): diag(2 * (H + L) * (a + 2) * (a + 1), -2 * (H + L) * (a + 2) * (a + 1)),
        (3, 1): anti(alg.const(2 * (a + 3) * (a + 2) * (a + 1) * (b + 1)),
                     Fr(1, 2) * (a + 2) * (b + 1) * (a * a + 4 * a + 4 * al1 + 3)),
        (4, 0): diag(-Fr(1, 2) * (a + 3) * (a + 1) * (a * a + 6 * a + 4 * al1 + 8),
                     Fr(1, 2) * (a + 4) * (a + 2) * (a * a + 4 * a + 4 * al1 + 3)),
    }
    out = []
    for off in OFFSETS:
        (x, y), (u, v) = ents[off]
        conv = tuple(tuple(e if isinstance(e, ChartElement) else alg.const(e) for e in row)
                     for row in ents[off])
        out.append(TemplateMatrix(off, conv))
    return out


def derived_recurrence(p: int, q: int, a: int, b: int) -> list[TemplateMatrix]:
    """Template matrices recomputed from :func:`canonical_residuals`.

    Row 1 is the coefficient of ``u1^a u2^b`` in the first residual and row 2
    in the second; column 1 collects ``F``-contributions, column 2 ``G``.
    """
    spec = _lattice_spec(p, q)
    alg = spec.algebra()
    target = (a, b)
    out = []
    for (m, n) in OFFSETS:
        E = alg.parse(f"u1^{a + m}*u2^{b + n}")
        cols = []
        for F, G in ((E, alg.zero()), (alg.zero(), E)):
            r1, r2 = canonical_residuals(F, G, spec)
            cols.append([_coeff_at(r, target) for r in (r1, r2)])
        ents = ((cols[0][0], cols[1][0]), (cols[0][1], cols[1][1]))
        out.append(TemplateMatrix((m, n), ents))
    return out


def _coeff_at(r: ChartElement, ab) -> ChartElement:
    return r.collect(["u1", "u2"]).get(tuple(ab), r.alg.zero())


# ---------------------------------------------------------------- field helpers
_FIELDS: dict = {}


def _field(names: tuple = PARAMS):
    if names not in _FIELDS:
        dom = QQ.frac_field(*symbols(names))
        _FIELDS[names] = (dom,) + tuple(dom.field.gens)
    return _FIELDS[names]


def to_field(e: ChartElement, names: tuple = PARAMS):
    """Parameter-only element -> element of ``QQ(names)``
    (default ``QQ(w, alpha1, alpha2, H, L2)``)."""
    names = tuple(names)
    K, *gens = _field(names)
    alg = e.alg
    idx = [alg.index[n] for n in names]
    total = K.zero
    for m, c in alg._clear(e.terms).items():
        for k, ex in enumerate(m):
            if ex and k not in idx:
                raise StructuralError(f"{e} is not a pure parameter expression")
        t = K(QQ(int(c.numerator), int(c.denominator)))
        for g, k in zip(gens, idx):
            if m[k]:
                t = t * g ** m[k]
        total = total + t
    return total


def from_field(x, alg, names: tuple = PARAMS) -> ChartElement:
    """Inverse of :func:`to_field`; the denominator must be a single monomial."""
    num, den = x.numer, x.denom
    if len(den.terms()) != 1:
        raise NotClosed(f"denominator {den.as_expr()} is not a monomial")
    (dm, dc), = den.terms()
    out = {}
    for nm, nc in num.terms():
        e = [0] * alg.ngens
        for k, n in enumerate(names):
            e[alg.index[n]] = nm[k] - dm[k]
        c = Fraction(int(nc.numerator), int(nc.denominator)) / Fraction(int(dc.numerator), int(dc.denominator))
        out[tuple(e)] = mpq(c.numerator, c.denominator)
    return ChartElement(alg, out)


# ---------------------------------------------------------------- the march
@dataclass
class LatticeState:
    """Coefficient vectors ``C_{a,b} = (A_{a,b}, B_{a,b})`` on ``[0,q] x [0,p]``.

    During the march each value is a pair ``(x, y)`` meaning
    ``x * B_{q,p} + y * A_{q-1,p-1}``; :attr:`values` holds the final field
    elements after the corner constraint is imposed.
    """

    p: int
    q: int
    linear: dict = field(default_factory=dict)
    corner: list = field(default_factory=list)
    free: tuple = ()
    values: dict = field(default_factory=dict)
    family_dimension: int = 0
    source_pq: tuple | None = None

    def value(self, a, b, comp) -> object:
        K = _field()[0]
        return self.values.get((a, b, comp), K.zero)

    def support(self) -> dict:
        out = {"A": [], "B": []}
        for (a, b, comp), v in sorted(self.values.items()):
            if v != 0:
                out["AB"[comp]].append((a, b))
        return out

    def family_support(self) -> dict:
        """Support of a generic member of the family (union over the basis)."""
        keys = set()
        for b in self.basis():
            keys.update(k for k, v in b.items() if v != 0)
        out = {"A": [], "B": []}
        for a, b, comp in sorted(keys):
            out["AB"[comp]].append((a, b))
        return out

    def basis(self) -> list[dict]:
        """Family basis as dicts ``(a, b, comp) -> value``."""
        K = _field()[0]
        out = []
        for vec in self.free:
            d = {}
            for key, (x, y) in self.linear.items():
                val = x * vec[0] + y * vec[1]
                if val != 0:
                    d[key] = val
            out.append(d)
        return out


A_, B_ = 0, 1


def _structural(a, b, comp, p, q):
    """True if the structure rules force this component to zero."""
    if not (0 <= a <= q and 0 <= b <= p):
        return True
    if (a + b) % 2:
        return True
    if a % 2 == 0:
        return comp == A_
    return comp == B_


def lattice_march(p: int, q: int) -> LatticeState:
    """Structured elimination: two rows at a time from the top, right to left."""
    _check_pq(p, q)
    alg = _lattice_spec(p, q).algebra()
    K = _field()[0]
    zero = (K.zero, K.zero)
    lin: dict = {(q, p, B_): (K.one, K.zero), (q - 1, p - 1, A_): (K.zero, K.one)}
    tcache: dict = {}

    def templates(a, b):
        t = tcache.get((a, b))
        if t is None:
            t = [(tm.offset, [[to_field(e) for e in row] for row in tm.entries])
                 for tm in assemble_recurrence(p, q, a, b, alg)]
            tcache[(a, b)] = t
        return t

    def equation(row, a, b):
        """Return (known part, {unknown key: coefficient})."""
        known = [K.zero, K.zero]
        unknown = {}
        for (m, n), M in templates(a, b):
            for comp in (A_, B_):
                c = M[row][comp]
                if c == 0:
                    continue
                key = (a + m, b + n, comp)
                if _structural(*key, p, q):
                    continue
                if key in lin:
                    x, y = lin[key]
                    known[0] += c * x
                    known[1] += c * y
                else:
                    unknown[key] = unknown.get(key, K.zero) + c
        return known, unknown

    def solve(eqs, targets, where):
        # eqs: list of (known, unknown); solve unknown-part for the targets
        mat = [[u.get(t, K.zero) for t in targets] for _, u in eqs]
        for _, u in eqs:
            extra = set(u) - set(targets)
            if extra:
                raise LatticeFailure(f"march at {where}: undetermined inputs {sorted(extra)}")
        n = len(targets)
        if n == 1:
            det = mat[0][0]
            if det == 0:
                raise LatticeFailure(f"vanishing pivot at (a,b)={where}")
            kn = eqs[0][0]
            lin[targets[0]] = (-kn[0] / det, -kn[1] / det)
            return
        (a11, a12), (a21, a22) = mat
        det = a11 * a22 - a12 * a21
        if det == 0:
            raise LatticeFailure(f"vanishing 2x2 determinant at (a,b)={where}")
        for comp in (0, 1):
            r1, r2 = -eqs[0][0][comp], -eqs[1][0][comp]
            x1 = (r1 * a22 - a12 * r2) / det
            x2 = (a11 * r2 - a21 * r1) / det
            old1 = lin.get(targets[0], zero)
            old2 = lin.get(targets[1], zero)
            lin[targets[0]] = tuple(x1 if i == comp else old1[i] for i in range(2))
            lin[targets[1]] = tuple(x2 if i == comp else old2[i] for i in range(2))

    for a in range(q, 0, -2):
        for b in range(p, -1, -2):
            tB = (a, b, B_)
            tA = (a - 1, b + 1, A_)
            targets = []
            if tB not in lin:
                targets.append(tB)
            if b + 1 <= p - 1 and tA not in lin:
                targets.append(tA)
            if not targets:
                continue
            if targets == [tB]:
                solve([equation(1, a, b)], targets, (a, b))
            elif targets == [tA]:
                solve([equation(0, a - 1, b + 1)], targets, (a - 1, b + 1))
            else:
                solve([equation(1, a, b), equation(0, a - 1, b + 1)], targets, (a, b))
    for b in range(p, 1, -2):
        solve([equation(1, 0, b)], [(0, b, B_)], (0, b))
    lin[(0, 0, B_)] = zero  # adds a constant to G only

    # every recurrence touching the rectangle, including rows/columns -1..-4
    corner = []
    for a in range(-4, q + 2):
        for b in range(-4, p + 2):
            for row in (0, 1):
                kn, unk = equation(row, a, b)
                if unk:
                    raise LatticeFailure(f"undetermined point(s) {sorted(unk)} at anchor {(a, b)}")
                if kn[0] != 0 or kn[1] != 0:
                    corner.append(((a, b, row), (kn[0], kn[1])))
    free = _nullspace_2(K, [c for _, c in corner])
    if not free:
        raise LatticeFailure("corner constraint forces the zero solution")
    state = LatticeState(p=p, q=q, linear=lin, corner=corner, free=tuple(free),
                         family_dimension=len(free))
    vec = free[0]
    for key, (x, y) in lin.items():
        val = x * vec[0] + y * vec[1]
        if val != 0:
            state.values[key] = val
    return state


def _nullspace_2(K, rows):
    """Nullspace of an n x 2 system over the field ``K``."""
    rows = [r for r in rows if r[0] != 0 or r[1] != 0]
    if not rows:
        return [(K.one, K.zero), (K.zero, K.one)]
    x, y = rows[0]
    vec = (-y, x) if x != 0 else (K.one, K.zero)
    for r in rows[1:]:
        if r[0] * vec[0] + r[1] * vec[1] != 0:
            return []
    return [vec]


# ---------------------------------------------------------------- oracle
def _jobs():
    try:
        return max(1, int(os.environ.get("SUPERINT_JOBS", "1")))
    except ValueError:
        return 1


def generic_elimination(p: int, q: int, drop_trivial: bool = True) -> list[dict]:
    """Nullspace of the unstructured linear system on ``[0,q] x [0,p]``.

    Unknowns are both components at every lattice point.  Equations are the
    monomial coefficients of :func:`canonical_residuals`, so the printed
    templates play no role here.  With ``drop_trivial`` the direction
    ``G = const`` is removed.
    """
    _check_pq(p, q)
    spec = _lattice_spec(p, q)
    alg = spec.algebra()
    K = _field()[0]
    keys = [(a, b, comp) for a in range(q + 1) for b in range(p + 1) for comp in (A_, B_)]
    if drop_trivial:
        keys.remove((0, 0, B_))
    columns = []
    rowkeys: dict = {}
    for (a, b, comp) in keys:
        E = alg.parse(f"u1^{a}*u2^{b}")
        F, G = (E, alg.zero()) if comp == A_ else (alg.zero(), E)
        r1, r2 = canonical_residuals(F, G, spec)
        col = {}
        for ridx, r in enumerate((r1, r2)):
            for mono, coeff in r.collect(["u1", "u2"]).items():
                rk = (ridx,) + mono
                rowkeys.setdefault(rk, len(rowkeys))
                col[rk] = to_field(coeff)
        columns.append(col)
    rows: list = [dict() for _ in range(len(rowkeys))]
    for j, col in enumerate(columns):
        for rk, v in col.items():
            rows[rowkeys[rk]][j] = v
    return [{keys[j]: v for j, v in vec.items()}
            for vec in sparse_nullspace(rows, len(keys), K)]


def in_span(vec: dict, basis: list[dict]) -> bool:
    """Exact membership test over the parameter field."""
    K = _field()[0]
    keys = sorted(set(vec).union(*[set(b) for b in basis]))
    pos = {k: i for i, k in enumerate(keys)}

    def rows(vs):
        return [{pos[k]: v for k, v in b.items() if v != 0} for b in vs]

    return sparse_rank(rows(basis), K) == sparse_rank(rows(basis + [vec]), K)


# ---------------------------------------------------------------- operator
@dataclass
class SolvedOperator:
    p: int
    q: int
    A: ChartElement
    B: ChartElement
    C: ChartElement
    D: ChartElement
    operator: DiffOperator
    H_op: DiffOperator
    L2_op: DiffOperator
    normalization: str
    state: LatticeState
    vector: dict = field(default_factory=dict)   # lattice values actually assembled

    @property
    def order(self) -> int:
        return self.operator.order

    def commutator_with_H(self) -> DiffOperator:
        return commutator(self.H_op, self.operator)

    def commutator_with_L2(self) -> DiffOperator:
        return commutator(self.L2_op, self.operator)


def _vector_for(state: LatticeState, normalization: str) -> dict:
    K, w, *_ = _field()
    basis = state.basis()
    if normalization == "tabulated" and (state.p, state.q) == (6, 4):
        # A_{1,5} = w^6, A_{3,3} = -9/2 w^6
        t1, t2 = (1, 5, A_), (3, 3, A_)
        target = (w ** 6, K(QQ(-9, 2)) * w ** 6)
        if len(basis) == 2:
            m = [[b.get(t, K.zero) for b in basis] for t in (t1, t2)]
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            if det == 0:
                raise LatticeFailure("A_{1,5}, A_{3,3} do not parametrize the family")
            c1 = (target[0] * m[1][1] - m[0][1] * target[1]) / det
            c2 = (m[0][0] * target[1] - m[1][0] * target[0]) / det
            return _combine(basis, (c1, c2))
        v = basis[0]
        s = target[0] / v[t1]
        out = {k: s * x for k, x in v.items()}
        if out.get(t2, K.zero) != target[1]:
            raise LatticeFailure("one-parameter family incompatible with A_{3,3} = -9/2 A_{1,5}")
        return out
    if normalization not in ("default", "tabulated"):
        raise ValueError(f"unknown normalization {normalization!r}")
    best = None
    for v in basis:
        v = _clear_denominators(v)
        deg = max(x.numer.degree(3) + x.numer.degree(4) for x in v.values())
        if best is None or deg < best[0]:
            best = (deg, v)
    return best[1]


def _combine(basis, coeffs):
    K = _field()[0]
    out = {}
    for b, c in zip(basis, coeffs):
        for k, x in b.items():
            out[k] = out.get(k, K.zero) + c * x
    return {k: v for k, v in out.items() if v != 0}


def _clear_denominators(v: dict) -> dict:
    K = _field()[0]
    R = K.field.ring
    den = R.one
    for x in v.values():
        den = den.lcm(x.denom)
    nums = [(x * K(den)).numer for x in v.values()]
    g = R.zero
    for n in nums:
        g = n if g == R.zero else g.gcd(n)
    return {k: x * K(den) / K(g) for k, x in v.items()}


def build_operator(state: LatticeState, normalization: str = "default",
                   verify: bool = True) -> SolvedOperator:
    """Turn a lattice solution into ``A d12 + B d1 + C d2 + D`` and assemble it
    with ``H`` and ``L2`` on the right."""
    p, q = state.p, state.q
    spec = _lattice_spec(p, q)
    alg = spec.algebra()
    H_op, L2_op = spec.quantum()
    if not state.values:
        z = DiffOperator(alg)
        return SolvedOperator(p, q, alg.zero(), alg.zero(), alg.zero(), alg.zero(), z,
                              H_op, L2_op, normalization, state)
    vec = _vector_for(state, normalization)
    F, G = alg.zero(), alg.zero()
    for (a, b, comp), val in vec.items():
        term = from_field(val, alg) * alg.parse(f"u1^{a}*u2^{b}")
        if comp == A_:
            F = F + term
        else:
            G = G + term
    A, B, C, D = symmetry_coefficients(F, G, spec, verify)
    op = assemble_symmetry(A, B, C, D, H_op, L2_op)
    return SolvedOperator(p, q, A, B, C, D, op, H_op, L2_op, normalization, state, vec)


def symmetry_coefficients(F: ChartElement, G: ChartElement, spec: SystemSpec,
                          verify: bool = True):
    """``(A, B, C, D)`` of the symmetry determined by ``(F, G)``.

    ``D`` is recovered by integrating its first-order conditions; the free
    constant is fixed to zero.
    """
    cs = canonical_system(F, G, spec)
    if verify and not (cs.r1.is_zero() and cs.r2.is_zero()):
        raise LatticeFailure("(F, G) does not satisfy the canonical equations")
    half = Fraction(1, 2)
    D1 = (-half * cs.X).antiderivative(0)
    rest = -half * cs.Y - D1.diff(1)
    if rest.coordinate_dependence(0):
        raise LatticeFailure("first-order conditions are not integrable")
    D = D1 + rest.antiderivative(1)
    for e in (cs.A, cs.B, cs.C, D):
        for (j, k) in e.collect(["H", "L2"]):
            if j < 0 or k < 0:
                raise LatticeFailure("negative power of H or L2 survives normalization")
    return cs.A, cs.B, cs.C, D


# ---------------------------------------------------------------- dump format
def dump_state(state: LatticeState, values: dict | None = None) -> str:
    """One line per lattice point: ``a, b, A, B`` in the expression grammar."""
    values = state.values if values is None else values
    K = _field()[0]
    alg = _lattice_spec(state.p, state.q).algebra()
    lines = [f"# p={state.p} q={state.q}"]
    for a in range(state.q + 1):
        for b in range(state.p + 1):
            ent = []
            for comp in (A_, B_):
                v = values.get((a, b, comp), K.zero)
                ent.append(_field_str(v, alg))
            lines.append(f"{a}, {b}, {ent[0]}, {ent[1]}")
    return "\n".join(lines) + "\n"


def _field_str(v, alg) -> str:
    if v == 0:
        return "0"
    try:
        return from_field(v, alg).to_str()
    except NotClosed:
        n, d = from_field(_num(v), alg), from_field(_den(v), alg)
        return f"({n.to_str()})/({d.to_str()})"


def _num(v):
    K = _field()[0]
    return K(v.numer)


def _den(v):
    K = _field()[0]
    return K(v.denom)


def load_dump(text: str) -> tuple[int, int, dict]:
    """Parse :func:`dump_state` output back into ``(p, q, {(a, b, comp): element})``."""
    p = q = None
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                k, _, v = tok.partition("=")
                if k == "p":
                    p = int(v)
                elif k == "q":
                    q = int(v)
    if p is None or q is None:
        raise ValueError("dump header '# p=.. q=..' missing")
    alg = _lattice_spec(p, q).algebra()
    out = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = [s.strip() for s in line.split(",", 3)]
        a, b = int(parts[0]), int(parts[1])
        rest = parts[2] + "," + parts[3]
        Aexp, Bexp = _split_pair(rest)
        for comp, txt in ((A_, Aexp), (B_, Bexp)):
            e = alg.parse(txt)
            if not e.is_zero():
                out[(a, b, comp)] = e
    return p, q, out


def _split_pair(s: str):
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return s[:i].strip(), s[i + 1:].strip()
    raise ValueError(f"bad dump line tail {s!r}")
