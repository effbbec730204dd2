"""The Weil algebra of sl(2): acyclic as a whole, with the invariant polynomials as basic part.

Run: python3 demos/02_weil_algebra.py
"""

from qalgebroid import samples
from qalgebroid.cohomology import betti, subcomplex_betti
from qalgebroid.derivations import conjugation_series, exp_conjugate
from qalgebroid.models import tangent_lift_differential, weil

g = samples.sl2()
W = weil(g)
print("d_W on the generators:")
for name in W.ctx.names():
    print(f"  {name:>4} -> {W.d_w.image(name)}")

print("\nBetti numbers of W(sl2), degrees 0..6:", betti(W.d_w, range(7)).as_list())

basic = subcomplex_betti(W.contractions() + W.lie_derivatives(), W.d_w, range(9))
print("basic part, degrees 0..8:          ", basic.as_list())
print("(one class in each degree 4k: powers of the quadratic Casimir)")

# the same differential appears as the lift of sl(2) to its shifted tangent bundle
T = tangent_lift_differential(g)
print("\nthe tangent lift reproduces the Chevalley-Eilenberg part:", T.L == W.d_ce)
series = conjugation_series(T.iota_da, T.d)
print(f"conjugating d by exp(contraction with d_A) stops after {len(series)} terms;",
      "result is d + L:", exp_conjugate(T.iota_da, T.d) == T.d + T.L)
