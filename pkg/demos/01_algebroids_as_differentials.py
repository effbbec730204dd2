"""From structure constants to a differential and back.

Run: python3 demos/01_algebroids_as_differentials.py
"""

from qalgebroid import samples
from qalgebroid.algebroid import (AlgebroidSpec, anchor_and_bracket_from_differential, build_differential,
                                  check_cartan_relations, jacobiator_witness)
from qalgebroid.cohomology import betti
from qalgebroid.derivations import square_witness

spec = samples.sl2()
d = build_differential(spec)
print("sl(2) as a differential on its fibre coordinates:")
for name in spec.chart().ctx.names():
    print(f"  d({name}) = {d.image(name)}")

print("\nChevalley-Eilenberg Betti numbers:", betti(d, range(4)).as_list())

# the bracket comes back out of the differential unchanged
rec = anchor_and_bracket_from_differential(spec.chart(), d).to_spec(spec.base, spec.fibre_prefix)
print("recovered brackets agree:", rec.brackets == spec.brackets)

# break Jacobi by nudging one constant, and d stops squaring to zero
broken = AlgebroidSpec(spec.base, spec.frame, spec.anchor,
                       {("h", "e", "e"): 2, ("h", "f", "f"): -2, ("e", "f", "h"): 1, ("e", "f", "e"): 1},
                       spec.fibre_prefix)
print("\nafter adding [e,f] += e:")
print(" ", jacobiator_witness(broken))
gen, value = square_witness(build_differential(broken))
print(f"  d^2({gen}) = {value}")

# a geometric example: rotations of the plane
rot = samples.so2_on_plane()
report = check_cartan_relations(rot, random_sections=2, seed=0)
print("\nCartan calculus for rotations of the plane:")
for c in report.checks:
    print(f"  {c.name:<24} {'ok' if c.passed else 'FAIL'} ({c.witnesses} checks)")
