"""Separable two-dimensional systems and their Hamiltonians."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Algebra, Chart, ChartElement, RadicalExtension, StructuralError
from .diffop import DiffOperator

__all__ = ["SystemSpec", "PhaseRatio", "caged_oscillator"]


@dataclass
class PhaseRatio:
    """``num / den`` with ``den`` free of momenta; used when the conformal
    factor ``f1 + f2`` is not a single invertible term."""

    num: ChartElement
    den: ChartElement

    @property
    def alg(self):
        return self.num.alg

    def is_zero(self) -> bool:
        return self.num.is_zero()


@dataclass
class SystemSpec:
    """Data of ``H = (p1^2 + s p2^2 + v1(u1) + v2(u2)) / (f1(u1) + f2(u2))``.

    ``metric_sign`` ``s`` is ``+1`` except for the generic family, whose
    kinetic term is ``p1^2 - p2^2``.  Functions are expression strings in the
    chart generators and ``parameters``.
    """

    id: str
    chart: Chart
    f1: str
    f2: str
    v1: str
    v2: str
    parameters: Sequence[str]
    k: Fraction = Fraction(1)
    radicals: Sequence[tuple[str, str]] = ()
    metric_sign: int = 1
    notes: str = ""
    _algs: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.k = Fraction(self.k)
        if self.k <= 0:
            raise ValueError(f"index k must be a positive rational, got {self.k}")
        self.parameters = tuple(self.parameters)

    @property
    def pq(self) -> tuple[int, int]:
        return self.k.numerator, self.k.denominator

    def algebra(self, momenta: bool = False, symbols: Sequence[str] = ("H", "L2")) -> Algebra:
        """Algebra holding the system's functions, with ``symbols`` adjoined as
        constant parameters (the values of ``H`` and ``L2``)."""
        key = (momenta, tuple(symbols))
        alg = self._algs.get(key)
        if alg is None:
            names = list(self.parameters) + [s for s in symbols if s not in self.parameters]
            alg = Algebra(self.chart, RadicalExtension(names, self.radicals), momenta=momenta)
            self._check(alg)
            self._algs[key] = alg
        return alg

    def functions(self, alg: Algebra):
        f1, f2, v1, v2 = (alg.parse(x) for x in (self.f1, self.f2, self.v1, self.v2))
        return f1, f2, v1, v2

    def _check(self, alg: Algebra):
        f1, f2, v1, v2 = self.functions(alg)
        if (f1 + f2).is_zero():
            raise StructuralError(f"{self.id}: f1 + f2 vanishes identically")
        for name, e, own in (("f1", f1, 0), ("v1", v1, 0), ("f2", f2, 1), ("v2", v2, 1)):
            if e.coordinate_dependence(1 - own):
                raise StructuralError(f"{self.id}: {name} depends on the wrong coordinate")

    # ---------------------------------------------------------------- classical
    def classical(self, symbols: Sequence[str] = ("H", "L2")):
        """Return ``(H, L2)`` as phase-space elements (or :class:`PhaseRatio`)."""
        alg = self.algebra(momenta=True, symbols=symbols)
        f1, f2, v1, v2 = self.functions(alg)
        p1, p2 = alg.gens("p1", "p2")
        s = self.metric_sign
        den = f1 + f2
        n_h = p1 * p1 + s * p2 * p2 + v1 + v2
        n_l = f2 * (p1 * p1 + v1) - f1 * (s * p2 * p2 + v2)
        try:
            inv = den.inverse()
        except Exception:
            return PhaseRatio(n_h, den), PhaseRatio(n_l, den)
        return n_h * inv, n_l * inv

    # ------------------------------------------------------------------ quantum
    def quantum(self, symbols: Sequence[str] = ("H", "L2")) -> tuple[DiffOperator, DiffOperator]:
        """Schroedinger operator and its separation partner ``L2``."""
        if self.metric_sign != 1:
            raise StructuralError("quantum operators are built for metric_sign = +1 only")
        alg = self.algebra(momenta=False, symbols=symbols)
        f1, f2, v1, v2 = self.functions(alg)
        inv = (f1 + f2).inverse()
        d11 = DiffOperator.partial(alg, 2, 0)
        d22 = DiffOperator.partial(alg, 0, 2)
        one = DiffOperator.identity(alg)
        part1 = d11 + one.scale(v1)
        part2 = d22 + one.scale(v2)
        H = (part1 + part2).scale(inv)
        L2 = part1.scale(f2 * inv) - part2.scale(f1 * inv)
        return H, L2


def caged_oscillator(p: int, q: int, extra_parameters: Sequence[str] = ()) -> SystemSpec:
    """``H = d11 + d22 + w^2 (p^2 u1^2 + q^2 u2^2) + alpha1/u1^2 + alpha2/u2^2``."""
    from .charts import cartesian

    if p <= 0 or q <= 0:
        raise ValueError("p, q must be positive")
    return SystemSpec(
        id="CAGED",
        chart=cartesian(),
        f1="1",
        f2="0",
        v1=f"w^2*{p * p}*u1^2 + alpha1*u1^-2",
        v2=f"w^2*{q * q}*u2^2 + alpha2*u2^-2",
        parameters=("w", "alpha1", "alpha2") + tuple(extra_parameters),
        k=Fraction(p, q),
    )
