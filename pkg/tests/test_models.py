from fractions import Fraction
from itertools import product

import pytest
import sympy

from qalgebroid import samples
from qalgebroid.algebroid import (AlgebroidSpec, anchor_and_bracket_from_differential, anchor_of,
                                  bracket_of_sections, build_differential, jacobiator_witness)
from qalgebroid.cohomology import basis_elements, betti, joint_kernel, make_slice, matrix_of
from qalgebroid.core import Context
from qalgebroid.derivations import (Derivation, apply, commutator, conjugation_series, exp_conjugate,
                                    is_homological)
from qalgebroid.models import (ActionError, BialgebraSpec, CompatibilityError, MatchedPairSpec,
                               SplittingData, basic_betti, basic_operators, brst, cartan_model,
                               compare_connections, de_rham, drinfeld_double, ginzburg_model,
                               matched_pair_double, restricted_equal, six_term_lie_derivative,
                               tangent_lift_differential, vector_contraction, vector_lie_derivative, weil)
from oracles import invariant_polynomial_dims, is_bialgebra, structure_constants


# -- Weil algebra -------------------------------------------------------------

def test_weil_identities():
    W = weil(samples.sl2())
    assert is_homological(W.d_w)
    assert commutator(W.d_k_star, W.d_k) == W.euler
    assert is_homological(W.d_ce)


def test_weil_acyclic():
    W = weil(samples.sl2())
    t = betti(W.d_w, range(7))
    assert t.as_list() == [1, 0, 0, 0, 0, 0, 0] and t.all_valid


@pytest.mark.parametrize("name,top", [("sl2", 8), ("so3", 4), ("aff1", 4), ("heisenberg", 4)])
def test_weil_basic_matches_invariant_polynomials(name, top):
    from qalgebroid.cohomology import subcomplex_betti

    spec = getattr(samples, name)()
    W = weil(spec)
    got = subcomplex_betti(W.contractions() + W.lie_derivatives(), W.d_w, range(top + 1)).as_list()
    dims = invariant_polynomial_dims(spec.labels, structure_constants(spec), top // 2)
    expected = [dims[k // 2] if k % 2 == 0 else 0 for k in range(top + 1)]
    assert got == expected


def test_sl2_invariants_are_killing_powers():
    dims = invariant_polynomial_dims(("e", "f", "h"), structure_constants(samples.sl2()), 4)
    assert dims == [1, 0, 1, 0, 1]


# -- tangent lift ---------------------------------------------------------------

LIFTABLE = {
    "sl2": samples.sl2,
    "super": samples.super_example,
    "tangent": lambda: AlgebroidSpec.tangent(samples.plane(2), "v"),
    "aff1_line": samples.aff1_on_line,
    "so2_plane": samples.so2_on_plane,
    "random": lambda: samples.random_spec(7),
}


@pytest.mark.parametrize("name", sorted(LIFTABLE))
def test_six_term_formula_and_commutation(name):
    spec = LIFTABLE[name]()
    T = tangent_lift_differential(spec)
    assert T.L == six_term_lie_derivative(spec, T)
    assert is_homological(T.L)
    assert commutator(T.L, T.d).is_zero()


def test_tangent_lift_is_weil_for_lie_algebras():
    spec = samples.sl2()
    T = tangent_lift_differential(spec)
    W = weil(spec)
    assert T.ctx == W.ctx
    assert T.L == W.d_ce
    assert T.d == W.d_k
    for name in T.ctx.names():
        assert T.L.image(name) == W.d_ce.image(name)


def _lift_bracket_checks(spec):
    T = tangent_lift_differential(spec)
    ch = T.lifted_chart()
    rec_d = T.L
    C = {a: T.complete_lift(a) for a in spec.labels}
    V = {a: T.vertical_lift(a) for a in spec.labels}
    n = 0
    for a in spec.labels:
        for b in spec.labels:
            ab_C = ch.zero_section(C[a].degree + C[b].degree)
            ab_V = ch.zero_section(V[a].degree + C[b].degree)
            for c in spec.labels:
                s = spec.structure(a, b, c)
                if s:
                    f = spec.base.embed(s, T.ctx) if spec.base.generators else T.ctx.const(s.constant_value())
                    ab_C = ab_C + f * C[c]
                    ab_V = ab_V + f * V[c]
            assert bracket_of_sections(C[a], C[b], rec_d) == ab_C
            assert bracket_of_sections(C[a], V[b], rec_d) == ab_V
            assert bracket_of_sections(V[a], V[b], rec_d).is_zero()
            n += 3
    return T, C, V, n


def test_lifted_brackets_on_sl2():
    _, _, _, n = _lift_bracket_checks(samples.sl2())
    assert n == 27


def test_lifted_anchor_on_action():
    spec = samples.aff1_on_line()
    T, C, V, _ = _lift_bracket_checks(spec)
    for a in spec.labels:
        phi = spec.vector_field(a)
        rho_C = anchor_of(C[a], T.L)
        rho_V = anchor_of(V[a], T.L)
        iota = vector_contraction(phi, T.ctx)
        L = vector_lie_derivative(phi, T.ctx, de_rham(T.ctx, spec.base.names()))
        for name in ("x", "dx"):
            assert rho_C.image(name) == L.image(name)
            assert rho_V.image(name) == iota.image(name)


def test_total_complex_acyclic_for_sl2():
    T = tangent_lift_differential(samples.sl2())
    t = betti(T.total, range(7))
    assert t.as_list() == [1, 0, 0, 0, 0, 0, 0] and t.all_valid


@pytest.mark.parametrize("maker", [samples.sl2, samples.so2_on_plane, samples.super_example])
def test_mqk_conjugation(maker):
    T = tangent_lift_differential(maker())
    assert exp_conjugate(T.iota_da, T.d) == T.d + T.L
    assert len(conjugation_series(T.iota_da, T.d)) == 2
    # the automorphism itself is an algebra map
    a, b = T.ctx.generators[0].name, T.ctx.generators[-1].name
    x, y = T.ctx.gens(a, b)
    assert T.gamma(x * y) == T.gamma(x) * T.gamma(y)


# -- BRST and Cartan models -----------------------------------------------------

def test_brst_equals_lift():
    spec = samples.so2_on_plane()
    B = brst(spec)
    assert B.D == B.lift.total
    assert is_homological(B.D)


def test_brst_rejects_non_actions():
    base = Context([("x", 0)])
    spec = AlgebroidSpec(base, (("a", 0),), {("a", "x"): "x"}, {})
    brst(spec)  # abelian with one field: fine
    bad = AlgebroidSpec(base, (("a", 0), ("b", 0)), {("a", "x"): "1", ("b", "x"): "x"}, {})
    with pytest.raises(ActionError):
        brst(bad)


def _cartan_on_lift(spec, ctx):
    dM = de_rham(ctx, spec.base.names())
    out = dM
    for a in spec.labels:
        phi = spec.vector_field(a)
        iota = Derivation(ctx, -1, {"d" + x: spec.base.embed(phi.image(x), ctx) for x in spec.base.names()
                                    if phi.image(x)})
        out = out - ctx.gen("d" + spec.fibre_name(a)) * iota
    return out


def test_basic_brst_is_cartan_as_matrices():
    spec = samples.so2_on_plane()
    ops = basic_operators(spec)
    dC = _cartan_on_lift(spec, ops.lift.ctx)
    for k in range(5):
        S, N = make_slice(ops.lift.ctx, k), make_slice(ops.lift.ctx, k + 1)
        K = joint_kernel(ops.family(), S)
        if not K:
            continue
        M1 = sympy.Matrix(matrix_of(ops.total, S, N).rows) * sympy.Matrix(K).T
        M2 = sympy.Matrix(matrix_of(dC, S, N).rows) * sympy.Matrix(K).T
        assert M1 == M2


def test_so2_equivariant_cohomology_of_plane():
    ops = basic_operators(samples.so2_on_plane())
    t = basic_betti(ops, range(5))
    # the plane retracts equivariantly to the origin: H(BS^1) = Q[u] with |u| = 2
    assert t.as_list() == [1, 0, 1, 0, 1]


def test_cartan_model_squares_to_minus_lie_derivative():
    spec = samples.so2_on_plane()
    C = cartan_model(spec)
    sq = commutator(C.d_c, C.d_c).scale(Fraction(1, 2))
    # d_C^2 = -dtheta^r L_r
    assert sq == -(C.ctx.gen("dθr") * C.lie_derivatives["r"])


def test_flat_splitting_horizontal_operators_kill_mu():
    spec = samples.so2_on_plane()
    gamma = SplittingData({("x", "r", "r"): spec.base.parse("y")})
    ops = basic_operators(spec, gamma)
    for a, I in ops.I.items():
        for b, m in ops.mu.items():
            assert apply(I, m).is_zero()
    first, second = compare_connections(spec, SplittingData.flat(), gamma, range(3))
    assert first.as_list()[0] == second.as_list()[0] == 1


# -- matched pairs and doubles --------------------------------------------------

def test_matched_pair_double():
    mp = samples.matched_pair_example()
    D = matched_pair_double(mp)
    assert is_homological(D.total)
    assert D.total == D.direct_sum_differential()
    # basic = invariants of Lambda(B*) under the A-action; B is abelian so d vanishes there
    # e1 acts on beta_y with weight -1, so only constants survive
    assert D.basic_betti(range(3)).as_list() == [1, 0, 0]


def test_matched_pair_horizontal_choice():
    mp = samples.matched_pair_example()
    other = MatchedPairSpec(mp.A, mp.B, mp.a_on_b, mp.b_on_a, "A")
    D = matched_pair_double(other)
    # contracting B instead leaves Lambda(A*) with the CE differential of aff1
    assert D.basic_betti(range(3)).as_list() == [1, 1, 0]


def test_non_representation_is_incompatible():
    g = samples.aff1("α")
    b = AlgebroidSpec.lie_algebra(["y"], {}, fibre_prefix="β")
    mp = MatchedPairSpec(g, b, {("e2", "y", "y"): 1}, {}, "B")
    with pytest.raises(CompatibilityError):
        matched_pair_double(mp)


def _bialgebra_oracle(bl):
    return is_bialgebra(structure_constants(bl.g), bl.g.labels, structure_constants(bl.g_dual), bl.g_dual.labels)


def test_two_dimensional_cobrackets_all_compatible():
    for a, b in product(range(-2, 3), repeat=2):
        bl = samples.bialgebra_2d(a, b)
        DD = drinfeld_double(bl, check=False)
        assert DD.compatible() == _bialgebra_oracle(bl) == True
        assert is_homological(DD.total)


def test_three_dimensional_search_agrees_with_cocycle_oracle():
    g = samples.bialgebra_3d(True).g
    L = ["f1", "f2", "f3"]
    seen = {True: 0, False: 0}
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        for k in range(3):
            gd = AlgebroidSpec.lie_algebra(L, {(L[i], L[j], L[k]): 1}, fibre_prefix="ξ")
            bl = BialgebraSpec(g, gd)
            ok = drinfeld_double(bl, check=False).compatible()
            assert ok == _bialgebra_oracle(bl)
            seen[ok] += 1
    assert seen[True] and seen[False]


def test_incompatible_double_raises_with_witness():
    with pytest.raises(CompatibilityError) as info:
        drinfeld_double(samples.bialgebra_3d(False))
    assert info.value.witness[0]


def test_sl2_standard_bialgebra_double_is_six_dimensional_lie_algebra():
    from qalgebroid import ingest

    bl = ingest.load("problems/sl2_bialgebra.toml").bialgebra()
    assert _bialgebra_oracle(bl)
    DD = drinfeld_double(bl)
    assert is_homological(DD.total)
    table = DD.bracket_table()
    rec = anchor_and_bracket_from_differential(DD.double.chart, DD.total)
    spec = rec.to_spec(Context(), "z")
    assert len(spec.labels) == 6 and jacobiator_witness(spec) is None
    assert table


# -- equivariant model ------------------------------------------------------------

def _ginzburg_checks(G, degrees):
    assert is_homological(G.total)
    assert G.conjugated() == G.total
    assert G.brst_form() == G.total
    checked = 0
    for k in degrees:
        S = make_slice(G.ctx, k)
        els = basis_elements(S, joint_kernel(G.basic_family(), S))
        assert restricted_equal(G.total, G.cartan_differential(), els) is None
        checked += len(els)
    return checked


def test_ginzburg_identity_on_sl2():
    A = samples.sl2("λ")
    g = samples.sl2()
    ch = A.chart()
    G = ginzburg_model(A, g, {v: ch.frame_section(v) for v in g.labels})
    assert _ginzburg_checks(G, range(5)) == 5


def test_ginzburg_rank_one_on_line():
    M = Context([("x", 0)], {"x": 3})
    TM = AlgebroidSpec.tangent(M, fibre_prefix="v")
    R = samples.abelian(1)
    X = TM.chart().section({"x": "x"})
    G = ginzburg_model(TM, R, {"v1": X})
    assert _ginzburg_checks(G, range(4)) > 0


def test_ginzburg_rejects_non_homomorphism():
    A = samples.sl2("λ")
    g = samples.sl2()
    ch = A.chart()
    with pytest.raises(ActionError):
        ginzburg_model(A, g, {"e": ch.frame_section("e"), "f": ch.frame_section("f")})


@pytest.mark.parametrize("horizontal", ["A", "B"])
def test_matched_pair_basic_matches_exterior_oracle(horizontal):
    from oracles import invariant_ce_betti

    mp = samples.matched_pair_example()
    mp = MatchedPairSpec(mp.A, mp.B, mp.a_on_b, mp.b_on_a, horizontal)
    acting, rep, kept = (mp.A, mp.a_on_b, mp.B) if horizontal == "B" else (mp.B, mp.b_on_a, mp.A)
    oracle = invariant_ce_betti(acting.labels, {k: v.constant_value() for k, v in rep.items()},
                                kept.labels, structure_constants(kept), 2)
    assert matched_pair_double(mp).basic_betti(range(3)).as_list() == oracle
