"""Normal-ordered partial differential operators in two variables."""
from __future__ import annotations

import re
from math import comb
from typing import Mapping

from .algebra import Algebra, ChartElement, StructuralError

__all__ = ["DiffOperator", "compose", "commutator", "assemble_symmetry", "parse_operator"]


class DiffOperator:
    """Sum of ``coefficient * d1^m d2^n`` with coefficients to the left.

    ``terms`` maps ``(m, n)`` to a :class:`ChartElement`; zero coefficients are
    never stored, so the zero operator is the empty map.
    """

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: Mapping[tuple[int, int], ChartElement] | None = None):
        self.alg = alg
        clean = {}
        for idx, c in (terms or {}).items():
            if c.alg is not alg:
                raise StructuralError("coefficient from another algebra")
            if not c.is_zero():
                clean[tuple(idx)] = c
        self.terms = clean

    @classmethod
    def multiplication(cls, f: ChartElement) -> "DiffOperator":
        return cls(f.alg, {(0, 0): f})

    @classmethod
    def partial(cls, alg: Algebra, m: int, n: int) -> "DiffOperator":
        return cls(alg, {(m, n): alg.one()})

    @classmethod
    def identity(cls, alg: Algebra) -> "DiffOperator":
        return cls(alg, {(0, 0): alg.one()})

    def _check(self, other):
        if not isinstance(other, DiffOperator):
            raise TypeError(f"expected DiffOperator, got {type(other).__name__}")
        if other.alg is not self.alg:
            raise StructuralError(
                f"chart mismatch: {self.alg.chart.name!r} vs {other.alg.chart.name!r}")

    @property
    def order(self) -> int:
        return max((m + n for m, n in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        self._check(other)
        alg = self.alg
        out = {k: dict(v.terms) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            out[k] = alg._add(out.get(k, {}), v.terms)
        return DiffOperator(alg, {k: ChartElement(alg, v) for k, v in out.items()})

    def __neg__(self):
        return DiffOperator(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, f) -> "DiffOperator":
        """Left multiplication by a function (or constant)."""
        if not isinstance(f, ChartElement):
            f = self.alg.parse(f) if isinstance(f, str) else self.alg.const(f)
        if f.alg is not self.alg:
            raise StructuralError("chart mismatch")
        return DiffOperator(self.alg, {k: f * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def apply(self, f: ChartElement) -> ChartElement:
        """Action on a function of the chart."""
        alg = self.alg
        out = alg.zero()
        cache = {}
        for (m, n), c in self.terms.items():
            out = out + c * _derivative(f, m, n, cache)
        return out

    def coefficient(self, m, n) -> ChartElement:
        return self.terms.get((m, n), self.alg.zero())

    def to_str(self) -> str:
        """Canonical text: one ``d(m,n): coefficient`` line per term, highest order first."""
        lines = []
        for (m, n) in sorted(self.terms, key=lambda t: (-(t[0] + t[1]), -t[0])):
            lines.append(f"d({m},{n}): {self.terms[(m, n)].to_str()}")
        return "\n".join(lines) if lines else "0"

    __str__ = to_str

    def __repr__(self):
        return f"DiffOperator(order={self.order}, terms={len(self.terms)})"

    def subs(self, mapping) -> "DiffOperator":
        return DiffOperator(self.alg, {k: v.subs(mapping) for k, v in self.terms.items()})


def _derivative(f: ChartElement, m: int, n: int, cache: dict) -> ChartElement:
    key = (m, n)
    if key in cache:
        return cache[key]
    if m == 0 and n == 0:
        r = f
    elif m > 0:
        r = _derivative(f, m - 1, n, cache).diff(0)
    else:
        r = _derivative(f, m, n - 1, cache).diff(1)
    cache[key] = r
    return r


def _raw_derivative(alg: Algebra, terms: dict, m: int, n: int, cache: dict) -> dict:
    key = (m, n)
    r = cache.get(key)
    if r is not None:
        return r
    if m == 0 and n == 0:
        r = terms
    elif m > 0:
        r = alg._diff(_raw_derivative(alg, terms, m - 1, n, cache), 0)
    else:
        r = alg._diff(_raw_derivative(alg, terms, m, n - 1, cache), 1)
    cache[key] = r
    return r


def compose(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """Normal-ordered product via the Leibniz rule."""
    P._check(Q)
    alg = P.alg
    acc: dict[tuple[int, int], dict] = {}
    for (b1, b2), q in Q.terms.items():
        dcache: dict = {}
        for (a1, a2), p in P.terms.items():
            for j1 in range(a1 + 1):
                c1 = comb(a1, j1)
                for j2 in range(a2 + 1):
                    dq = _raw_derivative(alg, q.terms, j1, j2, dcache)
                    if not dq:
                        continue
                    prod = alg._mul(p.terms, dq)
                    if not prod:
                        continue
                    c = c1 * comb(a2, j2)
                    if c != 1:
                        prod = alg._scale(prod, c)
                    key = (a1 - j1 + b1, a2 - j2 + b2)
                    acc[key] = alg._add(acc.get(key, {}), prod)
    return DiffOperator(alg, {k: ChartElement(alg, v) for k, v in acc.items()})


def commutator(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """``P Q - Q P``, normal ordered and zero-pruned."""
    return compose(P, Q) - compose(Q, P)


def assemble_symmetry(A: ChartElement, B: ChartElement, C: ChartElement, D: ChartElement,
                      H_op: DiffOperator, L2_op: DiffOperator,
                      H: str = "H", L2: str = "L2") -> DiffOperator:
    """Build ``sum_{j,k} (A^{jk} d12 + B^{jk} d1 + C^{jk} d2 + D^{jk}) H^j L2^k``.

    ``A..D`` are elements polynomial in the parameter symbols ``H`` and ``L2``;
    each monomial ``H^j L2^k`` is replaced by the operator product with the
    operators standing to the right.
    """
    alg = H_op.alg
    H_op._check(L2_op)
    for e in (A, B, C, D):
        if e.alg is not alg:
            raise StructuralError("coefficients and operators live in different algebras")
    pieces: dict[tuple[int, int], dict[tuple[int, int], ChartElement]] = {}
    for idx, e in ((1, 1), A), ((1, 0), B), ((0, 1), C), ((0, 0), D):
        for (j, k), coeff in e.collect([H, L2]).items():
            if j < 0 or k < 0:
                raise StructuralError(f"negative power H^{j} L2^{k} in symmetry coefficient")
            pieces.setdefault((j, k), {})[idx] = coeff
    powers: dict[tuple[int, int], DiffOperator] = {(0, 0): DiffOperator.identity(alg)}

    def power(j, k):
        if (j, k) in powers:
            return powers[(j, k)]
        if k > 0:
            r = compose(power(j, k - 1), L2_op)
        else:
            r = compose(H_op, power(j - 1, 0))
        powers[(j, k)] = r
        return r

    total = DiffOperator(alg)
    for (j, k) in sorted(pieces):
        left = DiffOperator(alg, pieces[(j, k)])
        total = total + compose(left, power(j, k))
    return total


_LINE = re.compile(r"^\s*d\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*:\s*(.+?)\s*$")


def parse_operator(alg: Algebra, text: str) -> DiffOperator:
    """Inverse of :meth:`DiffOperator.to_str`. Blank lines and ``#`` comments are ignored."""
    terms: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line == "0":
            continue
        mt = _LINE.match(line)
        if not mt:
            raise ValueError(f"bad operator line: {raw!r}")
        key = (int(mt.group(1)), int(mt.group(2)))
        val = alg.parse(mt.group(3))
        terms[key] = terms[key] + val if key in terms else val
    return DiffOperator(alg, terms)
