"""A family of forms that defeats every continuous choice of positive direction.

Each form in the family has a unit-eigenvalue direction, but any continuous
nonvanishing vector field over the ball of radius 2 must somewhere see the
value 1 - 4 exp(-1/4) = -2.115...  The scan certifies that numerically for
twenty test fields.
"""

import numpy as np

from qpos.geometry import (
    counterexample_build,
    counterexample_scan,
    sphere_eigenvalue_residuals,
    standard_test_fields,
    stereographic,
    unit_eigenvector_residuals,
)

R = 2.0
field = counterexample_build(R=R, grid_n=48)
print(f"grid points inside the ball: {len(field)}")

print("\npointwise identities:")
print(f"  unit-eigenvector residual (off the bad axis): "
      f"{np.max(unit_eigenvector_residuals(field)):.2e}")
print(f"  sphere eigenvalue residual                  : "
      f"{np.max(sphere_eigenvalue_residuals(R)):.2e}")
print(f"  theoretical floor 1 - 4 exp(-1/4)            : {1 - 4*np.exp(-0.25):+.6f}")

print("\nscanning twenty continuous nonvanishing fields:")
for name, v in standard_test_fields(R):
    point, value = counterexample_scan(field, v)
    tag = "negative found" if value < 0 else "NO NEGATIVE (unexpected)"
    print(f"  {name:18s} min value {value:+9.4f} at {np.round(point, 2)}  [{tag}]")

print("\nthe stereographic chart used to build the test fields:")
for z in ((1.0, 1.0), (0.0, 1.0), (1.0, 0.0)):
    print(f"  [{z[0]} : {z[1]}] -> {np.round(stereographic(*z), 6)}")
