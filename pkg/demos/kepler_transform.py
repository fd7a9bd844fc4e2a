"""Carry the TTW k = 2 symmetry through the Staeckel transform to the
deformed Kepler-Coulomb system and compare with the tabulated coefficients."""
from superint.stackel import KEPLER_K2, kepler_symmetry

ts = kepler_symmetry(2)
alg = ts.A.alg
print(f"transported operator: order {ts.order}")
print(f"  [H,L] = 0: {ts.commutator_with_H().is_zero()}")
for name in "ABCD":
    diff = getattr(ts, name) - alg.parse(KEPLER_K2[name])
    print(f"  {name}: {'matches table' if diff.is_zero() else diff.to_str()}")
