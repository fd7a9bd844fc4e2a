"""Ladder operators on Laguerre eigenfunctions: the composite
D+(p mu)^q D-(q mu)^p shifts (n, m) to (n + q, m - p) at fixed energy."""
import sympy as sp

from superint.ladder import composite_symmetry, eigenbasis_check, energy

p, q = 2, 1
for n, m in [(0, 3), (1, 4), (2, 2)]:
    (n2, m2), c = composite_symmetry(p, q, n, m)
    same = sp.simplify(energy(p, q, n, m) - energy(p, q, n2, m2)) == 0
    print(f"X_{n} Y_{m} -> {sp.factor(c)} X_{n2} Y_{m2}, energy preserved: {same}")
print("[H, D] on n, m <= 6:", eigenbasis_check(p, q, 6))
