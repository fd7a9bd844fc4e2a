"""Exact arithmetic on chart rings.

Every object handled by the toolkit lives in an :class:`Algebra`: a ring of
Laurent polynomials with rational coefficients in a flat list of generators

* ``i`` (the imaginary unit, relation ``i**2 = -1``),
* parameters (``w``, ``alpha``, ``H``, ``L2`` ...),
* radicals ``R`` with ``R**2 = rho(parameters)``,
* optionally the momenta ``p1``, ``p2``,
* chart functions of the two coordinates (``u1``, ``exp(R)``, ``sin(k*theta)``...),
  each with a derivative rule and at most one quadratic relation.

Quadratic relations are applied eagerly to nonnegative exponents, so a
polynomial element has a unique normal form.  Elements with negative
exponents on a relation generator are compared by clearing those
denominators first, which is exact because the quotient rings used here are
integral domains.
"""
from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "ParameterRing",
    "RadicalExtension",
    "GeneratorSpec",
    "Chart",
    "Algebra",
    "ChartElement",
    "NotClosed",
    "StructuralError",
    "ParseError",
]


class StructuralError(ValueError):
    """Objects from different algebras or unknown symbols were combined."""


class NotClosed(ArithmeticError):
    """An antiderivative or inverse leaves the ring."""


class ParseError(ValueError):
    pass


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    return mpq(x)


class GaussianRational:
    """Exact element of Q(i)."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = _q(real)
        self.imag = _q(imag)

    def __add__(self, other):
        other = _gauss(other)
        return GaussianRational(self.real + other.real, self.imag + other.imag)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __sub__(self, other):
        return self + (-_gauss(other))

    def __rsub__(self, other):
        return _gauss(other) - self

    def __mul__(self, other):
        o = _gauss(other)
        return GaussianRational(self.real * o.real - self.imag * o.imag,
                                self.real * o.imag + self.imag * o.real)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.real, -self.imag)

    def __truediv__(self, other):
        o = _gauss(other)
        n = o.real * o.real + o.imag * o.imag
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        p = self * o.conjugate()
        return GaussianRational(p.real / n, p.imag / n)

    def __rtruediv__(self, other):
        return _gauss(other) / self

    def __eq__(self, other):
        try:
            o = _gauss(other)
        except TypeError:
            return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self):
        if not self.imag:
            return str(self.real)
        if not self.real:
            return f"{self.imag}*i"
        return f"({self.real} + {self.imag}*i)"


def _gauss(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        raise TypeError("floating point complex numbers are not exact")
    if isinstance(x, float):
        raise TypeError("floats are not exact")
    return GaussianRational(x, 0)


class ParameterRing:
    """Ordered list of parameter symbols treated as constants."""

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate parameter names in {names}")
        self.names = tuple(names)

    def __repr__(self):
        return f"ParameterRing({list(self.names)})"


class RadicalExtension:
    """Parameters plus square roots ``R`` with ``R**2 = rho``.

    ``radicals`` is a list of ``(symbol, rho)`` pairs where ``rho`` is an
    expression string in the parameters.
    """

    def __init__(self, base: ParameterRing | Sequence[str], radicals: Sequence[tuple[str, str]] = ()):
        if not isinstance(base, ParameterRing):
            base = ParameterRing(base)
        self.base = base
        self.radicals = tuple((str(n), str(r)) for n, r in radicals)

    @property
    def names(self):
        return self.base.names

    def __repr__(self):
        return f"RadicalExtension({list(self.base.names)}, {list(self.radicals)})"


@dataclass(frozen=True)
class GeneratorSpec:
    """A chart function of one coordinate.

    ``derivative`` is an expression (in the chart generators and parameters)
    for d(gen)/d(coordinate); ``relation`` optionally gives ``gen**2``.
    ``numeric`` maps a (complex) coordinate value to the generator value.
    """

    name: str
    coordinate: int
    derivative: str
    relation: str | None = None
    invertible: bool = True
    numeric: Callable | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Chart:
    name: str
    coordinates: tuple[str, str]
    generators: tuple[GeneratorSpec, ...]
    aliases: tuple[str, str] = ("x", "y")
    metadata: tuple = ()

    def generator(self, name):
        for g in self.generators:
            if g.name == name:
                return g
        raise StructuralError(f"chart {self.name!r} has no generator {name!r}")


UNIT = "i"


class Algebra:
    """Flat Laurent ring over Q with relations; see module docstring."""

    def __init__(self, chart: Chart, extension: RadicalExtension | ParameterRing | Sequence[str] = (),
                 momenta: bool = False):
        if not isinstance(extension, RadicalExtension):
            extension = RadicalExtension(extension)
        self.chart = chart
        self.extension = extension
        self.momenta = momenta
        names = [UNIT] + list(extension.names) + [r for r, _ in extension.radicals]
        self.n_params = len(extension.names)
        self.momentum_names = ("p1", "p2") if momenta else ()
        names += list(self.momentum_names)
        names += [g.name for g in chart.generators]
        if len(set(names)) != len(names):
            raise StructuralError(f"generator names collide: {names}")
        self.names = tuple(names)
        self.index = {n: k for k, n in enumerate(names)}
        self.ngens = len(names)
        self.zero_exp = (0,) * self.ngens
        self._param_idx = tuple(range(1, 1 + self.n_params))
        r0 = 1 + self.n_params
        self._radical_idx = tuple(range(r0, r0 + len(extension.radicals)))
        m0 = r0 + len(extension.radicals)
        self._momentum_idx = tuple(range(m0, m0 + len(self.momentum_names)))
        c0 = m0 + len(self.momentum_names)
        self._chart_idx = tuple(range(c0, c0 + len(chart.generators)))
        # coordinate index -> generator indices depending on it
        self._coord_gens = {0: [], 1: []}
        for k, g in zip(self._chart_idx, chart.generators):
            self._coord_gens[g.coordinate].append(k)
        self.invertible = [False] * self.ngens
        for k in self._param_idx:
            self.invertible[k] = True
        for k in self._radical_idx:
            self.invertible[k] = True
        for k, g in zip(self._chart_idx, chart.generators):
            self.invertible[k] = g.invertible
        # relations, filled progressively so later ones may be parsed
        self._cache: dict = {}
        self._relations: dict[int, dict] = {0: {self.zero_exp: mpq(-1)}}
        self._relgens = (0,)
        self._rho_powers: dict[tuple[int, int], dict] = {}
        for (rname, rho) in extension.radicals:
            k = self.index[rname]
            self._add_relation(k, self.parse(rho).terms)
        for k, g in zip(self._chart_idx, chart.generators):
            if g.relation is not None:
                self._add_relation(k, self.parse(g.relation).terms)
        self._deriv: dict[tuple[int, int], dict] = {}
        for k, g in zip(self._chart_idx, chart.generators):
            self._deriv[(k, g.coordinate)] = self.parse(g.derivative).terms

    def _add_relation(self, k, rel):
        if any(m[k] for m in rel):
            raise StructuralError(f"relation for {self.names[k]} refers to itself")
        self._relations[k] = rel
        self._relgens = tuple(sorted(self._relations))
        self._rho_powers.clear()

    # ------------------------------------------------------------------ basics
    def __repr__(self):
        return f"Algebra(chart={self.chart.name!r}, gens={list(self.names)})"

    def element(self, terms=None) -> "ChartElement":
        return ChartElement(self, terms or {})

    def zero(self):
        return ChartElement(self, {})

    def one(self):
        return ChartElement(self, {self.zero_exp: mpq(1)})

    def const(self, c) -> "ChartElement":
        if isinstance(c, GaussianRational):
            t = {}
            if c.real:
                t[self.zero_exp] = c.real
            if c.imag:
                t[self.mono(**{UNIT: 1})] = c.imag
            return ChartElement(self, t)
        c = _q(c)
        return ChartElement(self, {self.zero_exp: c} if c else {})

    def mono(self, **exps) -> tuple:
        e = [0] * self.ngens
        for n, v in exps.items():
            e[self._idx(n)] = v
        return tuple(e)

    def gen(self, name) -> "ChartElement":
        return ChartElement(self, {self.mono(**{name: 1}): mpq(1)})

    def gens(self, *names):
        return [self.gen(n) for n in names]

    def _idx(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise StructuralError(f"unknown symbol {name!r} in {self!r}") from None

    @property
    def parameter_names(self):
        return self.extension.names

    @property
    def radical_names(self):
        return tuple(r for r, _ in self.extension.radicals)

    def coordinate_index(self, var) -> int:
        if isinstance(var, int):
            if var in (0, 1):
                return var
        else:
            coords = self.chart.coordinates
            if var in coords:
                return coords.index(var)
            if var in self.chart.aliases:
                return self.chart.aliases.index(var)
        raise StructuralError(f"{var!r} is not a coordinate of chart {self.chart.name!r}")

    # ------------------------------------------------------------ arithmetic
    def _add(self, a: dict, b: dict, sign=1) -> dict:
        out = dict(a)
        for m, c in b.items():
            v = out.get(m)
            if v is None:
                out[m] = c if sign > 0 else -c
            else:
                v = v + c if sign > 0 else v - c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return out

    def _mul(self, a: dict, b: dict) -> dict:
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        add = operator.add
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(map(add, m1, m2))
                out[m] = get(m, 0) + c1 * c2
        out = {m: c for m, c in out.items() if c}
        return self._reduce(out)

    def _scale(self, a: dict, c) -> dict:
        c = _q(c)
        if not c:
            return {}
        return {m: v * c for m, v in a.items()}

    def _shift(self, a: dict, mono: tuple) -> dict:
        add = operator.add
        return self._reduce({tuple(map(add, m, mono)): c for m, c in a.items()})

    def _rho_power(self, g, q):
        key = (g, q)
        r = self._rho_powers.get(key)
        if r is None:
            if q == 1:
                r = self._relations[g]
            else:
                r = self._mul(self._rho_power(g, q - 1), self._relations[g])
            self._rho_powers[key] = r
        return r

    def _reduce(self, terms: dict) -> dict:
        rel = self._relgens
        if not rel:
            return terms
        bad = [m for m in terms if any(m[g] >= 2 for g in rel)]
        if not bad:
            return terms
        out = {m: c for m, c in terms.items() if not any(m[g] >= 2 for g in rel)}
        work = [(m, terms[m]) for m in bad]
        while work:
            m, c = work.pop()
            g = next((g for g in reversed(rel) if m[g] >= 2), None)
            if g is None:
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
                continue
            q, r = divmod(m[g], 2)
            base = list(m)
            base[g] = r
            for rm, rc in self._rho_power(g, q).items():
                nm = tuple(x + y for x, y in zip(base, rm))
                work.append((nm, c * rc))
        return {m: c for m, c in out.items() if c}

    def _clear(self, terms: dict) -> dict:
        """Multiply by a monomial so no relation generator has a negative exponent."""
        shift = [0] * self.ngens
        need = False
        for g in self._relgens:
            lo = min((m[g] for m in terms), default=0)
            if lo < 0:
                shift[g] = -lo
                need = True
        if not need:
            return terms
        return self._shift(terms, tuple(shift))

    def is_zero_terms(self, terms: dict) -> bool:
        if not terms:
            return True
        return not self._clear(terms)

    # ---------------------------------------------------------- derivatives
    def _diff(self, terms: dict, coord: int) -> dict:
        out: dict = {}
        gens = self._coord_gens[coord]
        for m, c in terms.items():
            for g in gens:
                e = m[g]
                if not e:
                    continue
                base = list(m)
                base[g] -= 1
                dg = self._deriv[(g, coord)]
                for dm, dc in dg.items():
                    nm = tuple(x + y for x, y in zip(base, dm))
                    v = out.get(nm, 0) + c * e * dc
                    if v:
                        out[nm] = v
                    else:
                        out.pop(nm, None)
        return self._reduce(out)

    def _diff_gen(self, terms: dict, g: int) -> dict:
        """Partial derivative with respect to a free generator (momentum or parameter)."""
        out = {}
        for m, c in terms.items():
            e = m[g]
            if e:
                nm = list(m)
                nm[g] -= 1
                out[tuple(nm)] = c * e
        return out

    # -------------------------------------------------------------- parsing
    def parse(self, text: str | int | Fraction | "ChartElement") -> "ChartElement":
        if isinstance(text, ChartElement):
            if text.alg is not self:
                raise StructuralError("element belongs to another algebra")
            return text
        if isinstance(text, (int, Fraction, mpq)):
            return self.const(text)
        try:
            tree = ast.parse(str(text).strip().replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"cannot parse {text!r}: {exc}") from None
        return self._eval_ast(tree.body, text)

    def _eval_ast(self, node, text):
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self._eval_ast(node.left, text)
                exp = self._const_int(node.right, text)
                return base ** exp
            left = self._eval_ast(node.left, text)
            right = self._eval_ast(node.right, text)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left * right.inverse()
            raise ParseError(f"operator {type(node.op).__name__} not allowed in {text!r}")
        if isinstance(node, ast.UnaryOp):
            v = self._eval_ast(node.operand, text)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return self.const(node.value)
        if isinstance(node, ast.Name):
            return self.gen(node.id)
        raise ParseError(f"unsupported syntax in {text!r}: {ast.dump(node)}")

    def _const_int(self, node, text) -> int:
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -self._const_int(node.operand, text)
        raise ParseError(f"exponent must be an integer literal in {text!r}")

    # ----------------------------------------------------------- ordering
    def sort_key(self, m: tuple):
        """Graded lexicographic key: chart/momentum generators first, then parameters."""
        main = tuple(m[k] for k in self._chart_idx + self._momentum_idx)
        rest = tuple(m[k] for k in self._param_idx + self._radical_idx) + (m[0],)
        return (sum(main), main, sum(rest), rest)

    def format_monomial(self, m: tuple) -> str:
        parts = []
        for k in self._chart_idx + self._momentum_idx + self._param_idx + self._radical_idx:
            e = m[k]
            if e == 1:
                parts.append(self.names[k])
            elif e:
                parts.append(f"{self.names[k]}^{e}")
        return "*".join(parts)

    # --------------------------------------------------------- conversion
    def convert(self, elem: "ChartElement", mapping: Mapping[str, "ChartElement | str"] | None = None):
        """Ring map into this algebra: each source generator goes to ``mapping``'s
        image, or to the same-named generator here."""
        mapping = dict(mapping or {})
        src = elem.alg
        images = []
        for n in src.names:
            img = mapping.get(n)
            if img is None:
                img = self.gen(n) if n in self.index else None
                if img is None:
                    used = any(m[src.index[n]] for m in elem.terms)
                    if used:
                        raise StructuralError(f"no image for generator {n!r}")
            elif not isinstance(img, ChartElement):
                img = self.parse(img)
            elif img.alg is not self:
                raise StructuralError(f"image of {n!r} lives in another algebra")
            images.append(img)
        out = {}
        pow_cache: dict = {}
        for m, c in elem.terms.items():
            acc = {self.zero_exp: c}
            for k, e in enumerate(m):
                if not e:
                    continue
                key = (k, e)
                p = pow_cache.get(key)
                if p is None:
                    p = (images[k] ** e).terms
                    pow_cache[key] = p
                acc = self._mul(acc, p)
            out = self._add(out, acc)
        return ChartElement(self, out)


class ChartElement:
    """Immutable element of an :class:`Algebra`."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: Algebra, terms: dict):
        self.alg = alg
        self.terms = terms

    # -- helpers
    def _coerce(self, other) -> "ChartElement":
        if isinstance(other, ChartElement):
            if other.alg is not self.alg:
                raise StructuralError(
                    f"chart mismatch: {self.alg.chart.name!r} vs {other.alg.chart.name!r}")
            return other
        if isinstance(other, (int, Fraction, GaussianRational)) or type(other).__name__ == "mpq":
            return self.alg.const(other)
        if isinstance(other, str):
            return self.alg.parse(other)
        raise TypeError(f"cannot combine ChartElement with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(other)
        return ChartElement(self.alg, self.alg._add(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return ChartElement(self.alg, self.alg._add(self.terms, o.terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ChartElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return ChartElement(self.alg, self.alg._scale(self.terms, other))
        o = self._coerce(other)
        return ChartElement(self.alg, self.alg._mul(self.terms, o.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return ChartElement(self.alg, self.alg._scale(self.terms, 1 / _q(other)))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.alg.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "ChartElement":
        """Inverse of a single term (rational times invertible monomial), or of a
        Gaussian-rational constant."""
        alg = self.alg
        t = self.terms
        if not t:
            raise ZeroDivisionError("inverse of zero")
        if all(all(e == 0 for k, e in enumerate(m) if k) for m in t):
            c = GaussianRational(t.get(alg.zero_exp, 0), t.get(alg.mono(i=1), 0))
            return alg.const(1 / c)
        if len(t) != 1:
            raise NotClosed(f"cannot invert non-monomial {self}")
        (m, c), = t.items()
        coeff = 1 / c
        new = []
        for k, e in enumerate(m):
            if k == 0 and e:
                coeff = -coeff
                new.append(1)
                continue
            if e and not alg.invertible[k]:
                raise NotClosed(f"generator {alg.names[k]!r} is not invertible")
            new.append(-e)
        return ChartElement(alg, alg._reduce({tuple(new): coeff}))

    def is_zero(self) -> bool:
        return self.alg.is_zero_terms(self.terms)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        raise TypeError("ChartElement is not hashable")

    # -- calculus
    def diff(self, var) -> "ChartElement":
        alg = self.alg
        if isinstance(var, str) and var in alg.index and alg.index[var] not in alg._chart_idx:
            k = alg.index[var]
            return ChartElement(alg, alg._diff_gen(self.terms, k))
        c = alg.coordinate_index(var)
        return ChartElement(alg, alg._diff(self.terms, c))

    def antiderivative(self, var) -> "ChartElement":
        return _antiderivative(self, self.alg.coordinate_index(var))

    # -- structure
    def subs(self, mapping: Mapping[str, "ChartElement | str | int"]) -> "ChartElement":
        alg = self.alg
        mp = {}
        for k, v in mapping.items():
            alg._idx(k)
            mp[k] = v if isinstance(v, ChartElement) else alg.parse(v)
        return alg.convert(self, mp)

    def depends_on(self, name) -> bool:
        k = self.alg._idx(name)
        return any(m[k] for m in self.terms)

    def coordinate_dependence(self, coord) -> bool:
        c = self.alg.coordinate_index(coord)
        return any(m[g] for m in self.terms for g in self.alg._coord_gens[c])

    def collect(self, names: Sequence[str]) -> dict[tuple, "ChartElement"]:
        """Split as sum over monomials in ``names`` of (rest) coefficients."""
        alg = self.alg
        ks = [alg._idx(n) for n in names]
        out: dict = {}
        for m, c in self.terms.items():
            key = tuple(m[k] for k in ks)
            rest = list(m)
            for k in ks:
                rest[k] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: ChartElement(alg, v) for k, v in out.items()}

    def degree(self, names: Sequence[str]) -> int:
        ks = [self.alg._idx(n) for n in names]
        return max((sum(m[k] for k in ks) for m in self.terms), default=-1)

    def cleared(self) -> "ChartElement":
        """Same element times a monomial, with no negative relation-generator exponents."""
        return ChartElement(self.alg, self.alg._clear(self.terms))

    def constant_value(self) -> GaussianRational:
        """The Gaussian-rational value of a constant element."""
        alg = self.alg
        t = self.terms
        for m in t:
            if any(e for k, e in enumerate(m) if k):
                raise ValueError(f"{self} is not a constant")
        return GaussianRational(t.get(alg.zero_exp, 0), t.get(alg.mono(i=1), 0))

    def __len__(self):
        return len(self.terms)

    # -- printing
    def to_str(self) -> str:
        alg = self.alg
        if not self.terms:
            return "0"
        # pair up real/imaginary parts of the same monomial
        grouped: dict = {}
        for m, c in self.terms.items():
            base = (0,) + m[1:]
            grouped.setdefault(base, [mpq(0), mpq(0)])[m[0]] += c
        pieces = []
        for base in sorted(grouped, key=alg.sort_key, reverse=True):
            re, im = grouped[base]
            mono = alg.format_monomial(base)
            if re and im:
                coef = f"({_fmt_q(re)} + {_fmt_q(im)}*i)"
            elif im:
                coef = "i" if im == 1 else ("-i" if im == -1 else f"{_fmt_q(im)}*i")
            else:
                coef = _fmt_q(re)
            if mono:
                if coef == "1":
                    s = mono
                elif coef == "-1":
                    s = "-" + mono
                else:
                    s = f"{coef}*{mono}"
            else:
                s = coef
            pieces.append(s)
        out = pieces[0]
        for s in pieces[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    __str__ = to_str

    def __repr__(self):
        return f"ChartElement({self.to_str()})"


def _fmt_q(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# --------------------------------------------------------------- antiderivatives
def _classify(alg: Algebra, g: int, coord: int):
    """Return ('linear',), ('exp', lam_terms) or ('trig', partner, k) for generator g."""
    key = ("class", g, coord)
    if key in alg._cache:
        return alg._cache[key]
    d = alg._deriv[(g, coord)]
    res = ("other",)
    if d == {alg.zero_exp: mpq(1)}:
        res = ("linear",)
    else:
        gm = [0] * alg.ngens
        gm[g] = 1
        gm = tuple(gm)
        if d and all(tuple(x - y for x, y in zip(m, gm)) in (alg.zero_exp, alg.mono(i=1)) for m in d):
            lam = {tuple(x - y for x, y in zip(m, gm)): c for m, c in d.items()}
            res = ("exp", lam)
        elif len(d) == 1:
            (m, c), = d.items()
            others = [k for k in alg._coord_gens[coord] if k != g and m[k] == 1]
            if len(others) == 1 and sum(m) == 1:
                res = ("trig", others[0], c)
    alg._cache[key] = res
    return res


def _antiderivative(e: ChartElement, coord: int) -> ChartElement:
    alg = e.alg
    gens = alg._coord_gens[coord]
    out = alg.zero()
    for m, c in e.terms.items():
        active = [g for g in gens if m[g]]
        term = ChartElement(alg, {m: c})
        if not active:
            lin = [g for g in gens if _classify(alg, g, coord)[0] == "linear"]
            if not lin:
                raise NotClosed(f"antiderivative of {term} needs the bare coordinate")
            out = out + term * ChartElement(alg, {alg.mono(**{alg.names[lin[0]]: 1}): mpq(1)})
            continue
        kinds = {g: _classify(alg, g, coord) for g in active}
        if len(active) == 1 and kinds[active[0]][0] == "linear":
            g = active[0]
            if m[g] == -1:
                raise NotClosed(f"antiderivative of {term} is logarithmic")
            nm = list(m)
            nm[g] += 1
            out = out + ChartElement(alg, {tuple(nm): c / (m[g] + 1)})
            continue
        if all(kinds[g][0] == "exp" for g in active):
            lam = alg.zero()
            for g in active:
                lam = lam + ChartElement(alg, dict(kinds[g][1])) * m[g]
            if lam.is_zero():
                raise NotClosed(f"antiderivative of {term} is not periodic-closed")
            out = out + term * lam.inverse()
            continue
        if len(active) == 2:
            g1, g2 = active
            for s, cc in ((g1, g2), (g2, g1)):
                kind = kinds[s]
                if kind[0] == "trig" and kind[1] == cc and m[cc] == 1 and m[s] != -1:
                    nm = list(m)
                    nm[cc] = 0
                    nm[s] += 1
                    out = out + ChartElement(alg, alg._reduce({tuple(nm): c / (kind[2] * (m[s] + 1))}))
                    break
            else:
                raise NotClosed(f"no closed antiderivative for {term}")
            continue
        if len(active) == 1 and kinds[active[0]][0] == "trig":
            g = active[0]
            kind = kinds[g]
            # d(partner)/du = -k' g for the standard pair: int g = -partner/k'
            partner = kind[1]
            dp = alg._deriv.get((partner, coord))
            if m[g] == 1 and dp is not None and len(dp) == 1:
                (pm, pc), = dp.items()
                if pm == alg.mono(**{alg.names[g]: 1}):
                    nm = list(m)
                    nm[g] = 0
                    nm[partner] += 1
                    out = out + ChartElement(alg, alg._reduce({tuple(nm): c / pc}))
                    continue
        raise NotClosed(f"no closed antiderivative for {term}")
    return out
