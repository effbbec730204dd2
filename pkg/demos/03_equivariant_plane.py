"""Rotations of the plane: the BRST complex, its basic part and the Cartan model.

Polynomials are kept up to total degree 3 in x and y, so the top entries
are marked provisional where they meet that bound.

Run: python3 demos/03_equivariant_plane.py
"""

from qalgebroid import samples
from qalgebroid.models import basic_betti, basic_operators, brst, cartan_model

spec = samples.so2_on_plane(bound=3)
B = brst(spec)
print("BRST differential:")
for name in B.ctx.names():
    img = B.D.image(name)
    if img:
        print(f"  {name:>4} -> {img}")

ops = basic_operators(spec)
table = basic_betti(ops, range(5))
print("\nbasic cohomology, degrees 0..4:")
for line in table.lines():
    print(" ", line)
print("(the plane contracts to the fixed origin, so this is a polynomial ring on one class of degree 2)")

C = cartan_model(spec)
print("\nCartan differential on the base coordinates:")
for name in ("x", "y", "dx", "dy"):
    print(f"  {name:>3} -> {C.d_c.image(name)}")
