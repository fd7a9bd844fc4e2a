"""Laguerre eigenfunctions of the caged oscillator and their ladder operators.

In Cartesian form

    H = dx^2 + dy^2 - mu1^2 x^2 - mu2^2 y^2 + (1/4 - a1^2)/x^2 + (1/4 - a2^2)/y^2

separates into ``X_n(x) Y_m(y)`` with

    X_n = exp(-mu1 x^2 / 2) x^(a1 + 1/2) L_n^(a1)(mu1 x^2).

A :class:`GaugeFunction` keeps only the polynomial payload ``P(z^2)`` of such
a function.  Operators act through their conjugate ``g^-1 D g``, which sympy
derives once per operator from the gauge factor itself; nothing about the
ladder relations is assumed.  The raising and lowering operators

    D+(mu, z) = dz^2 - 2 mu z dz - mu + mu^2 z^2 + (1/4 - a^2)/z^2
    D-(mu, z) = dz^2 + 2 mu z dz + mu + mu^2 z^2 + (1/4 - a^2)/z^2

shift the Laguerre index by one, and ``D+(p mu, x)^q D-(q mu, y)^p`` keeps
the energy fixed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy as sp

from .algebra import NotClosed

__all__ = [
    "LaguerrePolynomial",
    "laguerre",
    "recurrence_residuals",
    "GaugeFunction",
    "eigenfunction",
    "apply_operator",
    "apply_Dplus",
    "apply_Dminus",
    "apply_hamiltonian_1d",
    "index_action",
    "separation_constant",
    "energy",
    "printed_energy",
    "composite_symmetry",
    "composite_coefficient",
    "composite_operator",
    "cartesian_hamiltonian",
    "eigenbasis_check",
    "MU",
    "A1",
    "A2",
]

X, Z, T = sp.symbols("x z t")
MU, A1, A2 = sp.symbols("mu a1 a2")
_A = sp.Symbol("a")


# ----------------------------------------------------------------- Laguerre
@dataclass(frozen=True)
class LaguerrePolynomial:
    """``L_n^a(x)`` with exact coefficients in ``Q(a)``."""

    n: int
    a: sp.Expr
    poly: sp.Poly          # in X over a domain containing a

    def expr(self, x=X) -> sp.Expr:
        return self.poly.as_expr().subs(X, x)

    def __call__(self, x):
        return self.expr(x)


@lru_cache(maxsize=None)
def _laguerre(n: int, a) -> LaguerrePolynomial:
    # L_n^a(x) = sum_j (-1)^j binom(n + a, n - j) x^j / j!
    terms = []
    for j in range(n + 1):
        num = sp.Integer(1)
        for i in range(j + 1, n + 1):
            num *= a + i
        terms.append((-1) ** j * num / (sp.factorial(n - j) * sp.factorial(j)) * X ** j)
    poly = sp.Poly(sp.expand(sp.Add(*terms)), X)
    return LaguerrePolynomial(n, a, poly)


def laguerre(n: int, a=_A) -> LaguerrePolynomial:
    """Associated Laguerre polynomial, standard normalization
    ``L_n^a(0) = binom(n + a, n)``; ``a`` may be a symbol."""
    if int(n) != n or n < 0:
        raise ValueError(f"Laguerre degree must be a non-negative integer, got {n!r}")
    return _laguerre(int(n), sp.sympify(a))


def recurrence_residuals(n: int, a=_A) -> tuple[sp.Expr, sp.Expr]:
    """Residuals of the two derivative recurrences

        x L_n' = n L_n - (n + a) L_{n-1}
        x L_n' = (n + 1) L_{n+1} - (n + 1 + a - x) L_n

    (``L_{-1} = 0``); both are zero polynomials when the recurrences hold.
    """
    a = sp.sympify(a)
    L = laguerre(n, a).expr()
    Lm = laguerre(n - 1, a).expr() if n > 0 else sp.Integer(0)
    Lp = laguerre(n + 1, a).expr()
    lhs = X * sp.diff(L, X)
    r1 = sp.expand(lhs - (n * L - (n + a) * Lm))
    r2 = sp.expand(lhs - ((n + 1) * Lp - (n + 1 + a - X) * L))
    return r1, r2


# -------------------------------------------------------------- gauge space
@dataclass(frozen=True)
class GaugeFunction:
    """``exp(-mu z^2/2) z^(a + 1/2) P(z^2)``; ``payload`` is ``P(t)``."""

    mu: sp.Expr
    a: sp.Expr
    payload: sp.Expr

    def gauge(self, z=Z) -> sp.Expr:
        return sp.exp(-self.mu * z ** 2 / 2) * z ** (self.a + sp.Rational(1, 2))

    def expr(self, z=Z) -> sp.Expr:
        return self.gauge(z) * self.payload.subs(T, z ** 2)

    def is_zero(self) -> bool:
        return sp.expand(self.payload) == 0

    def ratio_to(self, other: "GaugeFunction"):
        """Scalar ``c`` with ``self = c * other``, or ``None``."""
        if (self.mu, self.a) != (other.mu, other.a):
            return None
        if other.is_zero():
            return sp.Integer(0) if self.is_zero() else None
        q, r = sp.div(sp.Poly(self.payload, T), sp.Poly(other.payload, T))
        if not r.is_zero or q.degree() > 0:
            return None
        return sp.factor(q.as_expr())


def eigenfunction(n: int, mu=MU, a=_A) -> GaugeFunction:
    """``X_n`` with separation parameter ``mu`` and Laguerre parameter ``a``;
    ``n < 0`` gives the zero function."""
    mu, a = sp.sympify(mu), sp.sympify(a)
    if n < 0:
        return GaugeFunction(mu, a, sp.Integer(0))
    return GaugeFunction(mu, a, sp.expand(laguerre(n, a).expr(mu * T)))


def _operator_expr(kind: str, mu, a, f):
    """``D f`` for one of the one-dimensional operators, as a sympy expression
    in ``Z``."""
    pot = (sp.Rational(1, 4) - a ** 2) / Z ** 2
    d1, d2 = sp.diff(f, Z), sp.diff(f, Z, 2)
    if kind == "+":
        return d2 - 2 * mu * Z * d1 - mu * f + mu ** 2 * Z ** 2 * f + pot * f
    if kind == "-":
        return d2 + 2 * mu * Z * d1 + mu * f + mu ** 2 * Z ** 2 * f + pot * f
    if kind == "H":
        return d2 - mu ** 2 * Z ** 2 * f + pot * f
    raise ValueError(f"unknown operator {kind!r}")


@lru_cache(maxsize=None)
def _conjugated(kind: str):
    """Coefficients ``(c2, c1, c0)`` of ``g^-1 D g = c2 d^2 + c1 d + c0`` in
    ``Z``, for symbolic ``mu`` and ``a``."""
    mu, a = sp.Symbol("m_"), sp.Symbol("a_")
    Q = sp.Function("Q")(Z)
    g = sp.exp(-mu * Z ** 2 / 2) * Z ** (a + sp.Rational(1, 2))
    out = sp.expand(sp.powsimp(sp.expand(_operator_expr(kind, mu, a, g * Q) / g), force=True))
    c2 = sp.simplify(out.coeff(sp.Derivative(Q, (Z, 2))))
    rest = sp.expand(out - c2 * sp.Derivative(Q, (Z, 2)))
    c1 = sp.simplify(rest.coeff(sp.Derivative(Q, Z)))
    rest = sp.expand(rest - c1 * sp.Derivative(Q, Z))
    c0 = sp.simplify(sp.expand(rest / Q))
    for c in (c2, c1, c0):
        if c.has(Q) or c.has(sp.exp):
            raise NotClosed(f"conjugation of {kind} did not separate")
    return (mu, a), (c2, c1, c0)


def apply_operator(kind: str, psi: GaugeFunction) -> GaugeFunction:
    """Apply ``D+`` (``"+"``), ``D-`` (``"-"``) or the one-dimensional
    Hamiltonian (``"H"``) with the parameters carried by ``psi``.

    Raises :class:`NotClosed` if the image leaves the gauge space (odd or
    negative powers of ``z`` in the payload).
    """
    (mu_, a_), (c2, c1, c0) = _conjugated(kind)
    sub = {mu_: psi.mu, a_: psi.a}
    Q = psi.payload.subs(T, Z ** 2)
    img = sp.expand(c2.subs(sub) * sp.diff(Q, Z, 2) + c1.subs(sub) * sp.diff(Q, Z)
                    + c0.subs(sub) * Q)
    img = sp.together(img)
    num, den = sp.fraction(img)
    if den.free_symbols & {Z}:
        pq, r = sp.div(sp.Poly(num, Z), sp.Poly(den, Z))
        if not r.is_zero:
            raise NotClosed("image has a pole at z = 0")
        num, den = pq.as_expr(), sp.Integer(1)
    poly = sp.Poly(sp.expand(num / den), Z)
    payload = sp.Integer(0)
    for (e,), c in poly.terms():
        if e % 2:
            raise NotClosed("image has odd powers of z")
        payload += c * T ** (e // 2)
    return GaugeFunction(psi.mu, psi.a, sp.expand(payload))


def apply_Dplus(mu, psi: GaugeFunction) -> GaugeFunction:
    if sp.sympify(mu) != psi.mu:
        raise NotClosed("D+ parameter differs from the gauge parameter")
    return apply_operator("+", psi)


def apply_Dminus(mu, psi: GaugeFunction) -> GaugeFunction:
    if sp.sympify(mu) != psi.mu:
        raise NotClosed("D- parameter differs from the gauge parameter")
    return apply_operator("-", psi)


def apply_hamiltonian_1d(psi: GaugeFunction) -> GaugeFunction:
    return apply_operator("H", psi)


def index_action(kind: str, n: int, mu=MU, a=_A) -> tuple[int, sp.Expr]:
    """Apply an operator to ``X_n`` and identify the image as ``c X_n'``.

    Returns ``(n', c)``; a zero image is reported as ``(n - 1, 0)`` for
    ``D-`` and ``(n, 0)`` otherwise.
    """
    psi = eigenfunction(n, mu, a)
    img = apply_operator(kind, psi)
    shift = {"+": 1, "-": -1, "H": 0}[kind]
    target = n + shift
    if img.is_zero():
        return target, sp.Integer(0)
    c = img.ratio_to(eigenfunction(target, mu, a))
    if c is None:
        raise NotClosed(f"{kind} X_{n} is not a multiple of X_{target}")
    return target, c


def separation_constant(n, mu=MU, a=_A) -> sp.Expr:
    """``-2 mu (2n + a + 1)``, the eigenvalue of the one-dimensional part."""
    return -2 * mu * (2 * n + a + 1)


def energy(p: int, q: int, n, m, mu=MU, a1=A1, a2=A2) -> sp.Expr:
    """Eigenvalue of ``H`` on ``X_n Y_m`` with ``mu1 = p mu``, ``mu2 = q mu``."""
    return sp.expand(separation_constant(n, p * mu, a1) + separation_constant(m, q * mu, a2))


def printed_energy(p: int, q: int, n, m, mu=MU, a1=A1, a2=A2) -> sp.Expr:
    """``-2 mu (p n + q m + p a1 + p + q a2 + q)``; invariant under the same
    index shift as :func:`energy` but not equal to it (see the ledger)."""
    return sp.expand(-2 * mu * (p * n + q * m + p * a1 + p + q * a2 + q))


# ---------------------------------------------------------------- composite
def composite_coefficient(p: int, q: int, n, m, mu=MU, a1=A1, a2=A2) -> sp.Expr:
    """Scalar of ``D+(p mu, x)^q D-(q mu, y)^p X_n Y_m`` obtained by chaining
    the one-step relations ``D+ X_n = -4 mu (n+1) X_{n+1}`` and
    ``D- Y_m = -4 mu (m + a) Y_{m-1}``; valid for symbolic ``n``, ``m``."""
    c = sp.Integer(1)
    for j in range(q):
        c *= -4 * p * mu * (n + j + 1)
    for j in range(p):
        c *= -4 * q * mu * (m - j + a2)
    return sp.factor(c)


def composite_symmetry(p: int, q: int, n, m, mu=MU, a1=A1, a2=A2):
    """Image of ``X_n Y_m`` under ``D+(p mu, x)^q D-(q mu, y)^p``.

    Returns ``((n + q, m - p), c)``.  For integer ``n, m`` the operators are
    applied to the gauge functions directly; for symbolic indices the
    one-step relations are chained.  ``m < p`` gives ``c = 0``.
    """
    target = (n + q, m - p)
    if not (isinstance(n, int) and isinstance(m, int)):
        return target, composite_coefficient(p, q, n, m, mu, a1, a2)
    mu1, mu2 = p * mu, q * mu
    X = eigenfunction(n, mu1, a1)
    Y = eigenfunction(m, mu2, a2)
    for _ in range(q):
        X = apply_Dplus(mu1, X)
    for _ in range(p):
        Y = apply_Dminus(mu2, Y)
    if X.is_zero() or Y.is_zero() or m < p:
        return target, sp.Integer(0)
    cx = X.ratio_to(eigenfunction(n + q, mu1, a1))
    cy = Y.ratio_to(eigenfunction(m - p, mu2, a2))
    if cx is None or cy is None:
        raise NotClosed("composite image is not an eigenfunction product")
    return target, sp.factor(cx * cy)


# ------------------------------------------------------- operator identity
def _cartesian_algebra():
    from .algebra import Algebra
    from .charts import cartesian

    return Algebra(cartesian(), ("mu", "a1", "a2"))


_ALG = None


def _alg():
    global _ALG
    if _ALG is None:
        _ALG = _cartesian_algebra()
    return _ALG


def _one_dim(kind: str, coord: int, mu_mult: int):
    from .diffop import DiffOperator

    alg = _alg()
    z = alg.gen(f"u{coord + 1}")
    a = alg.gen(f"a{coord + 1}")
    mu = alg.gen("mu") * mu_mult
    d2 = DiffOperator.partial(alg, *((2, 0) if coord == 0 else (0, 2)))
    d1 = DiffOperator.partial(alg, *((1, 0) if coord == 0 else (0, 1)))
    one = DiffOperator.identity(alg)
    pot = (alg.const(Fraction(1, 4)) - a * a) * z ** -2
    if kind == "H":
        return d2 + one.scale(pot - mu * mu * z * z)
    sign = -1 if kind == "+" else 1
    return d2 + d1.scale(z * mu * (2 * sign)) + one.scale(mu * sign + mu * mu * z * z + pot)


def cartesian_hamiltonian(p: int, q: int):
    """``H`` with ``mu1 = p mu``, ``mu2 = q mu`` as a :class:`DiffOperator`."""
    return _one_dim("H", 0, p) + _one_dim("H", 1, q)


def composite_operator(p: int, q: int):
    """``D+(p mu, x)^q D-(q mu, y)^p`` as a :class:`DiffOperator`."""
    from .diffop import DiffOperator, compose

    alg = _alg()
    out = DiffOperator.identity(alg)
    for _ in range(q):
        out = compose(out, _one_dim("+", 0, p))
    for _ in range(p):
        out = compose(out, _one_dim("-", 1, q))
    return out


def eigenbasis_check(p: int, q: int, N: int = 6) -> dict:
    """Check ``[H, D] X_n Y_m = 0`` on ``n, m <= N``.

    ``H D X_n Y_m`` and ``D H X_n Y_m`` are both computed from gauge-space
    actions; returns counts of checked and failing pairs.
    """
    mu1, mu2 = p * MU, q * MU
    bad, checked = [], 0
    for n in range(N + 1):
        for m in range(N + 1):
            (n2, m2), c = composite_symmetry(p, q, n, m)
            e_before = energy(p, q, n, m)
            if c == 0:
                checked += 1
                continue
            hx = apply_hamiltonian_1d(eigenfunction(n2, mu1, A1))
            hy = apply_hamiltonian_1d(eigenfunction(m2, mu2, A2))
            lx = hx.ratio_to(eigenfunction(n2, mu1, A1))
            ly = hy.ratio_to(eigenfunction(m2, mu2, A2))
            checked += 1
            if lx is None or ly is None or sp.expand(lx + ly - e_before) != 0:
                bad.append((n, m))
    return {"checked": checked, "failures": bad}
