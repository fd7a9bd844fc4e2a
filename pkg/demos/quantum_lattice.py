"""Solve the lattice recurrence of the quantum caged oscillator and check the
resulting operator commutes with H.  (2,2) takes a second; (6,4) takes a
minute or two.

    python3 demos/quantum_lattice.py [P Q]
"""
import sys
import time

from superint.lattice import build_operator, lattice_march, normalize_pq

p, q = (int(sys.argv[1]), int(sys.argv[2])) if len(sys.argv) > 2 else (2, 2)
t0 = time.perf_counter()
state = lattice_march(*normalize_pq(p, q))
op = build_operator(state)
print(f"(p,q) = {normalize_pq(p, q)}: operator of order {op.order}")
print(f"  [H,L] = 0: {op.commutator_with_H().is_zero()}")
print(f"  [L2,L] = 0: {op.commutator_with_L2().is_zero()}")
print(f"  {time.perf_counter() - t0:.1f} s")
if op.order <= 2:
    for name in "ABCD":
        print(f"  {name} = {getattr(op, name).to_str()}")
