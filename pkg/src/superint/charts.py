"""Coordinate charts used by the catalog.

A chart fixes the two separable coordinates and the functions of them that
appear in potentials.  Frequencies such as ``k`` are exact rationals baked
into the derivative rules, so ``sin(k*theta)`` with ``k = 3/2`` differentiates
to ``3/2*cos(k*theta)`` without any symbolic ``k``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import Chart, GeneratorSpec, StructuralError

__all__ = ["cartesian", "polar", "spherical", "generic_exponential", "make_chart", "CHART_TYPES"]


def _r(k) -> str:
    k = Fraction(k)
    return f"({k.numerator}/{k.denominator})"


def _trig(sname, cname, coord, k):
    k = Fraction(k)
    kf = float(k)
    return (
        GeneratorSpec(sname, coord, f"{_r(k)}*{cname}", numeric=lambda z: np.sin(kf * z)),
        GeneratorSpec(cname, coord, f"-{_r(k)}*{sname}", relation=f"1 - {sname}^2",
                      numeric=lambda z: np.cos(kf * z)),
    )


def _expi(name, coord, k):
    """``exp(i*k*z)``."""
    k = Fraction(k)
    kf = float(k)
    return GeneratorSpec(name, coord, f"i*{_r(k)}*{name}", numeric=lambda z: np.exp(1j * kf * z))


def cartesian(names=("u1", "u2"), aliases=("x", "y")) -> Chart:
    """Laurent chart: the coordinates themselves, with negative powers."""
    return Chart(
        name="cartesian",
        coordinates=tuple(names),
        aliases=tuple(aliases),
        generators=(
            GeneratorSpec(names[0], 0, "1", numeric=lambda z: z),
            GeneratorSpec(names[1], 1, "1", numeric=lambda z: z),
        ),
    )


def polar(angular: str = "trig", k=1, double=False) -> Chart:
    """Exponential-radial chart ``x = R = ln r``, ``y = theta``.

    Generators: ``eR = exp(R)`` and either ``s = sin(k' theta)``,
    ``c = cos(k' theta)`` (``angular='trig'``) or ``w = exp(i k' theta)``
    (``angular='exp'``), where ``k' = 2k`` if ``double`` else ``k``.
    """
    kk = Fraction(k) * (2 if double else 1)
    ang = _trig("s", "c", 1, kk) if angular == "trig" else (_expi("w", 1, kk),)
    return Chart(
        name=f"polar-{angular}",
        coordinates=("R", "theta"),
        aliases=("x", "y"),
        generators=(GeneratorSpec("eR", 0, "eR", numeric=np.exp),) + ang,
        metadata=(("k", str(Fraction(k))), ("angle_multiplier", str(kk))),
    )


def spherical(angular: str = "trig", k=1) -> Chart:
    """Spherical-type chart ``x = phi``, ``y = psi`` with ``sigma = sinh(psi)``,
    ``chi = cosh(psi)`` and trig or exponential functions of ``k*phi``."""
    kk = Fraction(k)
    ang = _trig("s", "c", 0, kk) if angular == "trig" else (_expi("w", 0, kk),)
    hyp = (
        GeneratorSpec("sigma", 1, "chi", numeric=np.sinh),
        GeneratorSpec("chi", 1, "sigma", relation="1 + sigma^2", numeric=np.cosh),
    )
    return Chart(
        name=f"spherical-{angular}",
        coordinates=("phi", "psi"),
        aliases=("x", "y"),
        generators=ang + hyp,
        metadata=(("k", str(kk)),),
    )


def generic_exponential(kx=1, ky=1) -> Chart:
    """Chart for the generic family: ``w1 = exp(2 i kx x)``, ``w2 = exp(2 i ky y)``."""
    kx, ky = Fraction(kx), Fraction(ky)
    return Chart(
        name="generic-exp",
        coordinates=("x", "y"),
        aliases=("u1", "u2"),
        generators=(_expi("w1", 0, 2 * kx), _expi("w2", 1, 2 * ky)),
        metadata=(("kx", str(kx)), ("ky", str(ky))),
    )


CHART_TYPES = {
    "cartesian": lambda **kw: cartesian(),
    "polar-trig": lambda k=1, double=False, **kw: polar("trig", k, double),
    "polar-exp": lambda k=1, **kw: polar("exp", k),
    "spherical-trig": lambda k=1, **kw: spherical("trig", k),
    "spherical-exp": lambda k=1, **kw: spherical("exp", k),
    "generic-exp": lambda kx=1, ky=1, **kw: generic_exponential(kx, ky),
}


def make_chart(kind: str, **kwargs) -> Chart:
    try:
        factory = CHART_TYPES[kind]
    except KeyError:
        raise StructuralError(f"unknown chart type {kind!r}") from None
    return factory(**kwargs)
