"""Poisson and Courant structures as functions on symplectic graded manifolds.

Run: python3 demos/05_poisson_and_courant.py
"""

from qalgebroid import samples
from qalgebroid.symplectic import (CourantError, coadjoint_action, courant_lifted_action, courant_model,
                                   derived_bracket, lie_poisson, poisson_structure_check,
                                   recovered_poisson_algebroid)

g = samples.sl2()
C, pi = lie_poisson(g)
print("linear Poisson structure on the dual of sl(2):", pi)
print("integrable:", poisson_structure_check(C.poisson, pi))
e, f, h = C.ctx.gens("e", "f", "h")
print("{e, f} =", derived_bracket(C.poisson, pi, e, f))
print("{h, e^2} =", derived_bracket(C.poisson, pi, h, e * e))
co = coadjoint_action(g)
rec = recovered_poisson_algebroid(C, pi, g.labels).to_spec(co.base, "p")
print("cotangent algebroid equals the coadjoint action algebroid:",
      rec.anchor == co.anchor and rec.brackets == co.brackets)

model = courant_model(samples.gl2_quadratic())
print("\ngl(2) with the trace form, cubic function:", model.theta)
E, F = model.ctx.gens("E", "F")
print("derived bracket [E, F] =", model.bracket(E, F))
line = samples.abelian(1, stem="v")
rep = courant_lifted_action(model, line, {"v1": E})
print(f"the line acting through the null vector E: {rep.homomorphism_pairs} bracket pairs preserved")
try:
    courant_lifted_action(model, line, {"v1": model.ctx.gen("H")})
except CourantError as err:
    print("acting through H is refused: <H, H> =", err.value)
