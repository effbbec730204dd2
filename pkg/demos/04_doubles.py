"""Doubles of Lie bialgebras and matched pairs.

Run: python3 demos/04_doubles.py
"""

from qalgebroid import samples
from qalgebroid.derivations import is_homological
from qalgebroid.models import CompatibilityError, drinfeld_double, matched_pair_double

bl = samples.bialgebra_2d(1, 0)
DD = drinfeld_double(bl)
print("aff(1) with [f1, f2] = f1 on the dual:")
print("  cobracket compatible:", DD.compatible())
print("  total differential squares to zero:", is_homological(DD.total))

# every cobracket on this two dimensional algebra is compatible; an
# incompatible one needs a third direction
try:
    drinfeld_double(samples.bialgebra_3d(False))
except CompatibilityError as err:
    gen, value = err.witness
    print(f"\nthree dimensional example with [f1, f2] = f1: rejected, mixed term on {gen} is {value}")

mp = samples.matched_pair_example()
D = matched_pair_double(mp)
print("\nmatched pair aff(1) acting on a line:")
print("  total homological:", is_homological(D.total))
print("  basic Betti numbers, degrees 0..2:", D.basic_betti(range(3)).as_list())
