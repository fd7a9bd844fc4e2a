"""Classical constants of the motion from action-angle data.

For a separable system the functions ``sinh A``, ``cosh A`` (depending on
``u1, p1``) and ``sinh B``, ``cosh B`` (on ``u2, p2``) are registered per
catalog entry.  Writing ``D = f1 + f2``,

    kA * D * {sinh A, H} = cosh A,      kB * D * {sinh B, H} = cosh B,

with constants ``kA``, ``kB``, so ``m*A + n*B`` Poisson-commutes with ``H``
whenever ``m/n = -kA/kB``.  The multiple-angle expansion of
``sinh(m A + n B)`` is a polynomial in the four functions over the radical
extension, and clearing the radicals leaves a polynomial constant ``K``.

``H`` and ``L2`` enter ``K`` as constant symbols.  Brackets with such
expressions are evaluated on shell: ``p1**2`` and ``p2**2`` are eliminated
with the separation relations

    p1^2 + v1 = f1*H + L2,      s*p2^2 + v2 = f2*H - L2,

after which every element has momentum degree at most one in each ``p_i``
and the zero test is exact.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import comb
from pathlib import Path
from typing import Mapping

from .algebra import ChartElement, StructuralError
from .charts import make_chart
from .system import PhaseRatio, SystemSpec

__all__ = [
    "CatalogEntry",
    "load_catalog",
    "catalog",
    "register_system",
    "catalog_spec",
    "build_hamiltonian",
    "poisson_bracket",
    "on_shell",
    "is_zero_on_shell",
    "bracket_on_shell",
    "AngleData",
    "AngleCheck",
    "angle_data",
    "printed_angle_data",
    "expand_combination",
    "extract_polynomial_constant",
    "ClassicalConstant",
    "construct_constant",
    "ConsistencyError",
    "momentum_order",
    "phase_order",
    "strip_constants",
    "divide_content",
    "commuting_gate",
    "CLASSICAL_SWEEP",
]

CLASSICAL_SWEEP = ("E1", "E2", "E8", "E16", "E17", "S2", "S4", "S7", "S9", "GENERIC")


class ConsistencyError(ArithmeticError):
    """A registered closed form failed one of its identities."""


# ----------------------------------------------------------------- catalog
@dataclass
class CatalogEntry:
    id: str
    chart: dict
    parameters: tuple
    f1: str
    f2: str
    v1: str
    v2: str
    radicals: tuple
    angle: dict
    printed: dict | None = None
    metric_sign: int = 1
    status: str = "printed"
    notes: str = ""
    frequency: dict | None = None

    @classmethod
    def from_dict(cls, d: Mapping) -> "CatalogEntry":
        return cls(
            id=d["id"],
            chart=dict(d["chart"]),
            parameters=tuple(d["parameters"]),
            f1=d["f1"], f2=d["f2"], v1=d["v1"], v2=d["v2"],
            radicals=tuple(tuple(r) for r in d.get("radicals", ())),
            angle=dict(d["angle"]),
            printed=d.get("printed"),
            metric_sign=int(d.get("metric_sign", 1)),
            status=d.get("status", "printed"),
            notes=d.get("notes", ""),
            frequency=d.get("frequency"),
        )


_CATALOG: dict[str, CatalogEntry] = {}


def load_catalog(path: str | Path | None = None) -> dict[str, CatalogEntry]:
    """Read a catalog file (default: the one shipped with the package)."""
    if path is None:
        text = resources.files("superint").joinpath("data/catalog.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    return {d["id"]: CatalogEntry.from_dict(d) for d in data["systems"]}


def catalog() -> dict[str, CatalogEntry]:
    if not _CATALOG:
        _CATALOG.update(load_catalog())
    return _CATALOG


def register_system(entry: Mapping | CatalogEntry) -> CatalogEntry:
    """Add or replace a catalog record at run time."""
    if not isinstance(entry, CatalogEntry):
        entry = CatalogEntry.from_dict(entry)
    catalog()[entry.id] = entry
    return entry


def _index(k) -> Fraction:
    k = Fraction(k)
    if k <= 0:
        raise ValueError(f"index k must be a positive rational, got {k}")
    return k


def _instantiate(text: str, k: Fraction) -> str:
    p, q = k.numerator, k.denominator
    text = re.sub(r"\bk\b", f"({p}/{q})", text)
    text = re.sub(r"\bp\b", f"({p})", text)
    return re.sub(r"\bq\b", f"({q})", text)


def _chart_for(entry: CatalogEntry, k: Fraction):
    kind = entry.chart["type"]
    if kind == "cartesian":
        return make_chart(kind)
    if kind == "generic-exp":
        return make_chart(kind, kx=1, ky=k)
    return make_chart(kind, k=k * int(entry.chart.get("multiplier", 1)))


_SPECS: dict = {}


def oracle_scale(system_id: str, k=1) -> dict:
    """Factors applied to randomly drawn parameters in numeric checks.

    Oscillator families list their frequency multipliers; the shared
    parameter is divided by the largest one so that every physical frequency
    stays in the draw range and a fixed RK4 step resolves it.
    """
    k = _index(k)
    entry = catalog().get(system_id)
    if entry is None or not entry.frequency:
        return {}
    idx = {"p": k.numerator, "q": k.denominator}
    top = max(c * idx[s] for c, s in entry.frequency["multipliers"])
    return {entry.frequency["parameter"]: 1.0 / top}


def catalog_spec(system_id: str, k=1, printed: bool = False) -> SystemSpec:
    """Instantiate a catalog system at index ``k = p/q``.

    ``printed=True`` uses the transcribed radicals and potential overrides of
    the printed closed forms instead of the validated ones.
    """
    k = _index(k)
    key = (system_id, k, printed)
    if key in _SPECS:
        return _SPECS[key]
    try:
        entry = catalog()[system_id]
    except KeyError:
        raise StructuralError(f"unregistered system {system_id!r}") from None
    src = dict(f1=entry.f1, f2=entry.f2, v1=entry.v1, v2=entry.v2)
    radicals = entry.radicals
    if printed:
        if not entry.printed:
            raise StructuralError(f"{system_id} has no printed closed forms")
        radicals = tuple(tuple(r) for r in entry.printed["radicals"])
        for name in ("f1", "f2", "v1", "v2"):
            if name in entry.printed:
                src[name] = entry.printed[name]
    spec = SystemSpec(
        id=system_id,
        chart=_chart_for(entry, k),
        parameters=entry.parameters,
        k=k,
        radicals=tuple((r, _instantiate(rho, k)) for r, rho in radicals),
        metric_sign=entry.metric_sign,
        notes=entry.notes,
        **{n: _instantiate(t, k) for n, t in src.items()},
    )
    _SPECS[key] = spec
    return spec


# ----------------------------------------------------------------- brackets
def _parts(spec: SystemSpec):
    """Numerators of ``H`` and ``L2`` and their common denominator ``f1 + f2``."""
    alg = spec.algebra(momenta=True)
    f1, f2, v1, v2 = spec.functions(alg)
    p1, p2 = alg.gens("p1", "p2")
    s = spec.metric_sign
    n_h = p1 * p1 + s * p2 * p2 + v1 + v2
    n_l = f2 * (p1 * p1 + v1) - f1 * (s * p2 * p2 + v2)
    return n_h, n_l, f1 + f2


def build_hamiltonian(spec: SystemSpec):
    """``(H, L2)`` as phase-space elements, or :class:`PhaseRatio` when
    ``f1 + f2`` is not invertible in the chart ring."""
    return spec.classical()


def _bracket(a: ChartElement, b: ChartElement) -> ChartElement:
    alg = a.alg
    if b.alg is not alg:
        raise StructuralError("bracket of elements from different algebras")
    out = alg.zero()
    for i, pn in ((0, "p1"), (1, "p2")):
        out = out + a.diff(i) * b.diff(pn) - a.diff(pn) * b.diff(i)
    return out


def poisson_bracket(a, b):
    """``{a, b} = sum_i da/du_i db/dp_i - da/dp_i db/du_i``.

    Parameters, radicals and the symbols ``H``, ``L2`` are constants.  Either
    argument may be a :class:`PhaseRatio`; the result is then a ratio too.
    """
    if isinstance(a, ChartElement) and isinstance(b, ChartElement):
        return _bracket(a, b)
    an, ad = (a.num, a.den) if isinstance(a, PhaseRatio) else (a, a.alg.one())
    bn, bd = (b.num, b.den) if isinstance(b, PhaseRatio) else (b, b.alg.one())
    num = (_bracket(an, bn) * ad * bd - an * bd * _bracket(ad, bn)
           - bn * ad * _bracket(an, bd) + an * bn * _bracket(ad, bd))
    return PhaseRatio(num, ad * ad * bd * bd)


def on_shell(expr: ChartElement, spec: SystemSpec) -> ChartElement:
    """Eliminate ``p1**2`` and ``p2**2`` with the separation relations."""
    alg = expr.alg
    f1, f2, v1, v2 = spec.functions(alg)
    H, L2 = alg.gens("H", "L2")
    s = spec.metric_sign
    sq1 = f1 * H + L2 - v1
    sq2 = (f2 * H - L2 - v2) * s
    p1, p2 = alg.gens("p1", "p2")
    pw1, pw2 = {0: alg.one()}, {0: alg.one()}
    out = alg.zero()
    for (a, b), c in expr.collect(("p1", "p2")).items():
        if a // 2 not in pw1:
            pw1[a // 2] = sq1 ** (a // 2)
        if b // 2 not in pw2:
            pw2[b // 2] = sq2 ** (b // 2)
        t = c * pw1[a // 2] * pw2[b // 2]
        if a % 2:
            t = t * p1
        if b % 2:
            t = t * p2
        out = out + t
    return out


def is_zero_on_shell(expr: ChartElement, spec: SystemSpec) -> bool:
    return on_shell(expr, spec).is_zero()


def bracket_on_shell(K: ChartElement, spec: SystemSpec, which: str = "H") -> ChartElement:
    """``(f1 + f2) * {K, H}`` (or ``L2``) reduced on shell.

    ``K`` may contain the symbols ``H``, ``L2``; they are constants for the
    bracket, which is sound once ``{H, L2} = 0`` is known.
    """
    n_h, n_l, den = _parts(spec)
    num = n_h if which == "H" else n_l
    sym = K.alg.gen(which)
    return on_shell(_bracket(K, num) - sym * _bracket(K, den), spec)


def commuting_gate(spec: SystemSpec) -> bool:
    """``{H, L2} = 0`` as phase-space functions (no on-shell reduction)."""
    n_h, n_l, den = _parts(spec)
    # {N/D, M/D} * D^3 = {N,M} D - N {D,M} - M {N,D}
    val = _bracket(n_h, n_l) * den - n_h * _bracket(den, n_l) - n_l * _bracket(n_h, den)
    return val.is_zero()


# --------------------------------------------------------------- angle data
@dataclass
class AngleCheck:
    hyperbolic_A: bool
    hyperbolic_B: bool
    kappa_A: ChartElement | None
    kappa_B: ChartElement | None
    l2_A: bool
    l2_B: bool
    prefactor_A: bool | None = None
    prefactor_B: bool | None = None

    @property
    def ok(self) -> bool:
        return (self.hyperbolic_A and self.hyperbolic_B and self.l2_A and self.l2_B
                and self.kappa_A is not None and self.kappa_B is not None)

    def as_dict(self) -> dict:
        return {
            "hyperbolic_A": self.hyperbolic_A,
            "hyperbolic_B": self.hyperbolic_B,
            "kappa_A": None if self.kappa_A is None else self.kappa_A.to_str(),
            "kappa_B": None if self.kappa_B is None else self.kappa_B.to_str(),
            "l2_A": self.l2_A,
            "l2_B": self.l2_B,
            "prefactor_A": self.prefactor_A,
            "prefactor_B": self.prefactor_B,
        }


@dataclass
class AngleData:
    """Closed-form hyperbolic functions of the two angle variables."""

    spec: SystemSpec
    sinhA: ChartElement
    coshA: ChartElement
    sinhB: ChartElement
    coshB: ChartElement
    radicals: tuple
    check: AngleCheck
    prefactors: tuple = (None, None)
    printed: bool = False

    @property
    def alg(self):
        return self.sinhA.alg

    @property
    def kappa(self):
        return self.check.kappa_A, self.check.kappa_B

    def combination(self) -> tuple[int, int]:
        """Smallest ``(m, n)`` with ``m > 0`` and ``{m A + n B, H} = 0``."""
        kA, kB = self.kappa
        if kA is None or kB is None:
            raise ConsistencyError(f"{self.spec.id}: angle data failed validation")
        r = -(kA * kB.inverse())
        try:
            val = r.constant_value()
        except ValueError:
            raise ConsistencyError(f"{self.spec.id}: kA/kB = {r.to_str()} is not constant") from None
        if val.imag != 0:
            raise ConsistencyError(f"{self.spec.id}: kA/kB = {r.to_str()} is not rational")
        ratio = Fraction(int(val.real.numerator), int(val.real.denominator))
        m, n = ratio.numerator, ratio.denominator
        return (m, n) if m > 0 else (-m, -n)


def _kappa(sinh: ChartElement, cosh: ChartElement, spec: SystemSpec):
    """The constant ``c`` with ``c * D {sinh, H} = cosh`` on shell, or None."""
    x = bracket_on_shell(sinh, spec, "H")
    y = on_shell(cosh, spec)
    if x.is_zero():
        return None
    names = [n for n in x.alg.names if n not in x.alg.parameter_names
             and n not in x.alg.radical_names and n != "i"]
    cx = x.collect(names)
    cy = y.collect(names)
    mono = next(iter(cx))
    if mono not in cy:
        return None
    try:
        kap = cy[mono] * cx[mono].inverse()
    except Exception:
        return None
    if not on_shell(kap * x - y, spec).is_zero():
        return None
    return kap


def _validate(spec, sA, cA, sB, cB, prefs=(None, None)) -> AngleCheck:
    f1, f2, _, _ = spec.functions(sA.alg)
    one = sA.alg.one()
    hA = on_shell(cA * cA - sA * sA - one, spec).is_zero()
    hB = on_shell(cB * cB - sB * sB - one, spec).is_zero()
    kA = _kappa(sA, cA, spec)
    kB = _kappa(sB, cB, spec)
    l2A = kA is not None and on_shell(kA * bracket_on_shell(sA, spec, "L2") - f2 * cA, spec).is_zero()
    l2B = kB is not None and on_shell(kB * bracket_on_shell(sB, spec, "L2") + f1 * cB, spec).is_zero()
    pA = pB = None
    if prefs[0] is not None and kA is not None:
        pA = (prefs[0] - kA).is_zero()
    if prefs[1] is not None and kB is not None:
        pB = (prefs[1] - kB).is_zero()
    return AngleCheck(hA, hB, kA, kB, l2A, l2B, pA, pB)


def angle_data(spec_or_id, k=None) -> AngleData:
    """Validated angle data for a catalog system.

    Accepts a catalog id (with index ``k``) or a :class:`SystemSpec` built by
    :func:`catalog_spec`.
    """
    spec = catalog_spec(spec_or_id, 1 if k is None else k) if isinstance(spec_or_id, str) else spec_or_id
    entry = catalog()[spec.id]
    alg = spec.algebra(momenta=True)
    forms = [alg.parse(_instantiate(entry.angle[n], spec.k)) for n in ("sinhA", "coshA", "sinhB", "coshB")]
    check = _validate(spec, *forms)
    if not check.ok:
        raise ConsistencyError(f"{spec.id}: registered angle data fails validation: {check.as_dict()}")
    return AngleData(spec, *forms, radicals=tuple(spec.radicals), check=check)


def printed_angle_data(system_id: str, k=1) -> AngleData:
    """The printed closed forms, checked but not required to pass.

    ``check.prefactor_*`` compares the printed multipliers of the angles with
    the effective constants of the validated forms.
    """
    entry = catalog()[system_id]
    spec = catalog_spec(system_id, k, printed=True)
    alg = spec.algebra(momenta=True)
    pr = entry.printed
    forms = [alg.parse(_instantiate(pr[n], spec.k)) for n in ("sinhA", "coshA", "sinhB", "coshB")]
    prefs = tuple(alg.parse(_instantiate(pr[n], spec.k)) if n in pr else None for n in ("M", "N"))
    check = _validate(spec, *forms, prefs=prefs)
    return AngleData(spec, *forms, radicals=tuple(spec.radicals), check=check,
                     prefactors=prefs, printed=True)


# ----------------------------------------------------- multiple-angle expansion
def expand_combination(data: AngleData, m: int, n: int):
    """``(sinh(m A + n B), cosh(m A + n B))`` as polynomials in the angle data.

    Uses ``exp(+-x) = cosh x +- sinh x`` and the binomial theorem, which is the
    same as the multiple-angle sums.
    """
    sA, cA, sB, cB = data.sinhA, data.coshA, data.sinhB, data.coshB
    alg = data.alg

    def power_parts(s, c, e):
        # cosh(e x), sinh(e x) for e >= 0
        ch, sh = alg.zero(), alg.zero()
        spow = [alg.one()]
        for _ in range(e):
            spow.append(spow[-1] * s)
        cpow = [alg.one()]
        for _ in range(e):
            cpow.append(cpow[-1] * c)
        for j in range(e + 1):
            t = comb(e, j) * spow[j] * cpow[e - j]
            if j % 2:
                sh = sh + t
            else:
                ch = ch + t
        return sh, ch

    shA, chA = power_parts(sA, cA, abs(m))
    shB, chB = power_parts(sB, cB, abs(n))
    if m < 0:
        shA = -shA
    if n < 0:
        shB = -shB
    return chA * shB + shA * chB, chA * chB + shA * shB


def extract_polynomial_constant(expr: ChartElement):
    """Clear radicals: ``K = expr * prod R_i**n_i`` with minimal ``n_i``.

    Returns ``(K, {radical: n_i})``.  Raises :class:`ConsistencyError` if some
    radical occurs with exponents of both parities, since then no monomial
    multiplier removes it.
    """
    alg = expr.alg
    powers = {}
    shift = [0] * alg.ngens
    for r in alg.radical_names:
        g = alg.index[r]
        exps = {m[g] for m in expr.terms}
        if not exps:
            powers[r] = 0
            continue
        if len({e % 2 for e in exps}) > 1:
            raise ConsistencyError(f"radical {r} occurs with mixed parity {sorted(exps)}")
        lo = min(exps)
        powers[r] = shift[g] = -lo if lo < 0 else lo % 2
    # shift exponents first, then reduce R**2 -> rho
    K = ChartElement(alg, alg._shift(expr.terms, tuple(shift)))
    for r in alg.radical_names:
        g = alg.index[r]
        if any(m[g] for m in K.terms):
            raise ConsistencyError(f"radical {r} survives clearing")
    return K, powers


def momentum_order(K: ChartElement) -> int:
    """Weighted degree: momenta count 1, the symbols ``H`` and ``L2`` count 2."""
    names = K.alg.names
    ip = [names.index(n) for n in ("p1", "p2")]
    iq = [names.index(n) for n in ("H", "L2")]
    best = 0
    for m in K.terms:
        best = max(best, sum(m[i] for i in ip) + 2 * sum(m[i] for i in iq))
    return best


def phase_order(K: ChartElement, spec: SystemSpec) -> int:
    """Momentum degree of ``K`` with ``H`` and ``L2`` replaced by their
    phase-space expressions (numerators homogenized by ``f1 + f2``)."""
    n_h, n_l, den = _parts(spec)
    parts = K.collect(("H", "L2"))
    top = max(j + k for j, k in parts)
    cache: dict = {}

    def pw(x, tag, e):
        if (tag, e) not in cache:
            cache[(tag, e)] = x ** e
        return cache[(tag, e)]

    full = K.alg.zero()
    for (j, k), c in parts.items():
        full = full + c * pw(n_h, "h", j) * pw(n_l, "l", k) * pw(den, "d", top - j - k)
    return full.degree(("p1", "p2"))


def strip_constants(K: ChartElement) -> ChartElement:
    """Drop terms that involve neither coordinates nor momenta; they are
    functions of ``H``, ``L2`` and the parameters, hence constants already."""
    alg = K.alg
    live = list(alg._chart_idx) + list(alg._momentum_idx)
    return ChartElement(alg, {m: c for m, c in K.terms.items() if any(m[g] for g in live)})


def divide_content(K: ChartElement) -> ChartElement:
    """Divide by the largest monomial in ``H``, ``L2`` and the parameters
    that divides every term; such a factor is a constant of the motion
    itself and only inflates the order."""
    alg = K.alg
    if K.is_zero():
        return K
    idx = [alg.index[n] for n in alg.parameter_names]
    low = {k: min(m[k] for m in K.terms) for k in idx}
    shift = [0] * alg.ngens
    for k, e in low.items():
        if e > 0 or (e < 0 and alg.invertible[k]):
            shift[k] = -e
    if not any(shift):
        return K
    return ChartElement(alg, alg._shift(K.terms, tuple(shift)))


# ------------------------------------------------------------ construction
@dataclass
class ClassicalConstant:
    spec: SystemSpec
    combination: tuple[int, int]
    K_sinh: ChartElement
    K_cosh: ChartElement
    powers_sinh: dict
    powers_cosh: dict
    primary: str
    gate: bool
    bracket_H: dict = field(default_factory=dict)
    bracket_L2: dict = field(default_factory=dict)

    @property
    def K(self) -> ChartElement:
        return self.K_sinh if self.primary == "sinh" else self.K_cosh

    orders: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.orders[self.primary]


def construct_constant(system_id: str, k=1, check: bool = True) -> ClassicalConstant:
    """Full pipeline: gate, angle data, expansion, radical clearing, brackets."""
    spec = catalog_spec(system_id, k)
    gate = commuting_gate(spec)
    if not gate:
        raise ConsistencyError(f"{system_id}: {{H, L2}} does not vanish")
    data = angle_data(spec)
    m, n = data.combination()
    sh, ch = expand_combination(data, m, n)
    Ks, ps = extract_polynomial_constant(sh)
    Kc, pc = extract_polynomial_constant(ch)
    Ks, Kc = divide_content(strip_constants(Ks)), divide_content(strip_constants(Kc))
    orders = {"sinh": phase_order(Ks, spec), "cosh": phase_order(Kc, spec)}
    primary = "sinh" if orders["sinh"] <= orders["cosh"] else "cosh"
    out = ClassicalConstant(spec, (m, n), Ks, Kc, ps, pc, primary, gate, orders=orders)
    if check:
        for name, K in (("sinh", Ks), ("cosh", Kc)):
            out.bracket_H[name] = bracket_on_shell(K, spec, "H").is_zero()
            out.bracket_L2[name] = not bracket_on_shell(K, spec, "L2").is_zero()
    return out
