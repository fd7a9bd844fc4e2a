"""Acceptance criteria 1-7.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""
import time
from fractions import Fraction
from functools import lru_cache
from math import gcd

import pytest
import sympy as sp

RESULTS: dict[int, str] = {}

INDICES = [Fraction(p, q) for p in range(1, 5) for q in range(1, 5) if gcd(p, q) == 1]


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    return ok


# ------------------------------------------------------------ 1
def test_criterion_1_caged_64_golden():
    from superint.cli import cmd_solve_quantum

    t0 = time.perf_counter()
    rep = cmd_solve_quantum("caged", 6, 4)
    dt = time.perf_counter() - t0
    cmp = rep.details["printed_comparison"]
    mismatches = {k: v for k, v in cmp.items() if v != "match"}
    ok = (rep.summary["support_size"] == 17 and cmp["support"] == "match" and not mismatches
          and rep.verdicts["[H,L]"] == "proved-zero" and dt < 300)
    items = "; ".join(f"{k}: computed - printed = {v}" for k, v in mismatches.items()) or "all match"
    record(1, ok, f"support {rep.summary['support_size']} entries ({cmp['support']}), "
                  f"[H,L] {rep.verdicts['[H,L]']}, order {rep.summary['order']}, {dt:.1f}s; {items}")
    assert rep.verdicts["[H,L]"] == "proved-zero"
    assert cmp["support"] == "match"
    assert not mismatches, items


# ------------------------------------------------------------ 2
def test_criterion_2_kepler_k2_golden():
    from superint.diffop import assemble_symmetry, commutator
    from superint.stackel import KEPLER_K2, kepler_map, kepler_symmetry, transform_spec

    t0 = time.perf_counter()
    spec = transform_spec(kepler_map(2))
    alg = spec.algebra()
    H, L2 = spec.quantum()
    printed = {n: alg.parse(KEPLER_K2[n]) for n in "ABCD"}
    op = assemble_symmetry(*(printed[n] for n in "ABCD"), H, L2)
    commutes = commutator(H, op).is_zero()
    ks = kepler_symmetry(2)
    same = {n: getattr(ks, n) == ks.A.alg.parse(KEPLER_K2[n]) for n in "ABCD"}
    dt = time.perf_counter() - t0
    ok = op.order == 5 and commutes and all(same.values()) and dt < 60
    record(2, ok, f"printed operator order {op.order}, [H,L]=0 {commutes}; "
                  f"swap of TTW solution reproduces {''.join(n for n in 'ABCD' if same[n]) or 'nothing'}; "
                  f"{dt:.1f}s")
    assert ok


# ------------------------------------------------------------ 3
@lru_cache(maxsize=None)
def sweep():
    from superint.classical import CLASSICAL_SWEEP, construct_constant

    t0 = time.perf_counter()
    out = {(sid, k): construct_constant(sid, k) for sid in CLASSICAL_SWEEP for k in INDICES}
    return out, time.perf_counter() - t0


def test_criterion_3_classical_sweep():
    consts, dt = sweep()
    bad = [f"{sid} {k}" for (sid, k), c in consts.items()
           if not (c.gate and all(c.bracket_H.values()) and all(c.bracket_L2.values()))]
    ok = not bad and dt < 600
    record(3, ok, f"{len(consts)} (system, k) cases x 2 constants, {{K,H}}=0 and {{K,L2}}!=0 "
                  f"exactly; failures: {bad or 'none'}; {dt:.0f}s")
    assert ok


# ------------------------------------------------------------ 4
def test_criterion_4_oracle_concordance():
    from superint.classical import catalog_spec
    from superint.oracle import H_TOL, K_TOL, conservation_drifts

    consts, _ = sweep()
    t0 = time.perf_counter()
    base = conservation_drifts(catalog_spec("E1", 1), None, seeds=range(5))
    baseline_ok = all(r.h_drift <= H_TOL for r in base)
    checked = flagged = 0
    discordant, uncovered, raw_over = [], [], 0
    for (sid, k), c in consts.items():
        for name, K in (("sinh", c.K_sinh), ("cosh", c.K_cosh)):
            res = conservation_drifts(c.spec, K, seeds=range(5), candidates=8)
            cal = [r for r in res if r.calibrated]
            checked += len(cal)
            flagged += len(res) - len(cal)
            raw_over += sum(r.k_drift_raw > K_TOL for r in cal)
            if not cal:
                uncovered.append(f"{sid} {k} {name}")
            discordant += [f"{sid} {k} {name} seed {r.seed}: {r.k_drift:.1e}"
                           for r in cal if r.k_drift > K_TOL]
    dt = time.perf_counter() - t0
    ok = baseline_ok and not discordant
    record(4, ok, f"baseline H drift <= {H_TOL:g}: {baseline_ok}; {checked} calibrated seeds, "
                  f"discordant: {discordant or 'none'}; {flagged} seeds flagged (H calibration failed), "
                  f"no calibrated seed for {len(uncovered)} of {2 * len(consts)} constants "
                  f"({', '.join(uncovered) or '-'}); plain |dK|/max(1,|K0|) above {K_TOL:g} "
                  f"on {raw_over} calibrated seeds; {dt:.0f}s")
    assert ok


# ------------------------------------------------------------ 5
def test_criterion_5_ladder_suite():
    from superint.ladder import (
        MU, A2, composite_coefficient, composite_symmetry, energy, index_action,
        recurrence_residuals,
    )

    t0 = time.perf_counter()
    a = sp.Symbol("a")
    rec = all(r == 0 for n in range(11) for r in recurrence_residuals(n))
    plus = all(index_action("+", n) == (n + 1, sp.factor(-4 * MU * (n + 1))) for n in range(11))
    minus = all(index_action("-", m)[0] == m - 1
                and sp.expand(index_action("-", m)[1] + 4 * MU * (m + a)) == 0 for m in range(1, 11))
    n, m = sp.symbols("n m")
    target = -128 * MU ** 3 * (n + 1) * (m + A2) * (m - 1 + A2)
    comp = (sp.expand(composite_symmetry(2, 1, n, m)[1] - target) == 0
            and all(sp.expand(composite_symmetry(2, 1, i, j)[1] - composite_coefficient(2, 1, i, j)) == 0
                    for i in range(3) for j in range(2, 5)))
    pq = [(p, q) for p in range(1, 5) for q in range(1, 5) if gcd(p, q) == 1]
    inv = all(sp.expand(energy(p, q, i, j) - energy(p, q, i + q, j - p)) == 0
              for p, q in pq for i in range(11) for j in range(11))
    dt = time.perf_counter() - t0
    ok = rec and plus and minus and comp and inv and dt < 60
    record(5, ok, f"recurrences n<=10 {rec}; D+ {plus}; D- {minus}; "
                  f"p=2,q=1 coefficient {comp}; energy invariance {inv}; {dt:.1f}s")
    assert ok


# ------------------------------------------------------------ 6
def test_criterion_6_hyperboloid():
    from superint.lattice import normalize_pq
    from superint.stackel import embedding_potential, hyperboloid_potential, hyperboloid_symmetry

    parts = []
    ok = True
    for p, q in ((2, 2), (6, 4)):
        hs = hyperboloid_symmetry(p, q)
        zero = hs.commutator_with_H().is_zero()
        V = hyperboloid_potential(p, q)
        pot = (V - embedding_potential(*normalize_pq(p, q), V.alg)).is_zero()
        ok &= zero and pot
        parts.append(f"({p},{q}): order {hs.order}, [H,L]=0 {zero}, potential identity {pot}")
    record(6, ok, "; ".join(parts))
    assert ok


# ------------------------------------------------------------ 7
def test_criterion_7_property_suites():
    import test_algebra as ta
    import test_classical as tc
    import test_diffop as td
    import test_lattice as tl
    from strategies import CART, CART_P, POLAR, POLAR_P

    suites = {
        "ring axioms": lambda: [ta.test_ring_axioms(alg) for alg in (CART, POLAR)],
        "derivation law": lambda: [ta.test_derivation_law(alg) for alg in (CART, POLAR)],
        "bracket antisymmetry/Jacobi": lambda: [tc.test_bracket_antisymmetry_and_jacobi(alg)
                                                for alg in (CART_P, POLAR_P)],
        "commutator antisymmetry/Jacobi": lambda: (td.test_commutator_antisymmetry(),
                                                   td.test_commutator_jacobi()),
        "lattice parity": lambda: (tl.test_recurrence_preserves_parity(),
                                   [tl.test_march_solution_has_parity_structure(pq) for pq in tl.PAIRS]),
        "march in nullspace": lambda: [tl.test_march_lies_in_generic_nullspace(pq) for pq in tl.PAIRS],
    }
    status = {}
    for name, fn in suites.items():
        try:
            fn()
            status[name] = True
        except Exception as exc:  # noqa: BLE001 - reported per suite
            status[name] = f"{type(exc).__name__}: {exc}"
    ok = all(v is True for v in status.values())
    record(7, ok, "; ".join(f"{k} {'ok' if v is True else v}" for k, v in status.items())
           + f"; pairs {tl.PAIRS}")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
