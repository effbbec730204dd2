"""Named double complexes built from algebroid data.

Naming: fibre coordinates of ``[-1]A`` are ``prefix + label`` and every
generator ``y`` of a tangent-lifted context has a partner ``"d" + y`` of
degree ``|y| + 1`` (so the lift of a Lie algebra is exactly its Weil context).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .algebroid import (AlgebroidChart, AlgebroidSpec, ConsistencyError, Section, SpecError,
                        anchor_and_bracket_from_differential, bracket_of_sections, build_differential,
                        contraction, is_morphic, lie_derivative)
from .cohomology import BettiTable, make_slice, subcomplex_betti
from .core import AlgebraError, Context, Element, as_scalar
from .derivations import (Derivation, apply, commutator, conjugation_series, embed_derivation, euler,
                          exp_apply, exp_conjugate, is_homological, restrict_images, square_witness,
                          zero_derivation)


class CompatibilityError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ActionError(AlgebraError):
    pass


def dot(name: str) -> str:
    return "d" + name


def _require_lie(lie: AlgebroidSpec):
    if lie.base.generators:
        raise SpecError("expected a Lie algebra (point base)")
    if any(p for _, p in lie.frame):
        raise SpecError("only ordinary (degree-0) Lie algebras are supported here")


def _const(lie: AlgebroidSpec, a, b, c) -> Fraction:
    v = lie.structure(a, b, c)
    return v.constant_value() if v else Fraction(0)


# ---------------------------------------------------------------------------
# Weil algebra


@dataclass
class WeilContext:
    lie: AlgebroidSpec
    ctx: Context
    d_ce: Derivation
    d_k: Derivation
    d_w: Derivation
    d_k_star: Derivation
    euler: Derivation

    def theta_name(self, label: str) -> str:
        return self.lie.fibre_name(label)

    def dtheta_name(self, label: str) -> str:
        return dot(self.lie.fibre_name(label))

    def chart(self) -> AlgebroidChart:
        fib = tuple(self.theta_name(a) for a in self.lie.labels) + \
            tuple(self.dtheta_name(a) for a in self.lie.labels)
        return AlgebroidChart(self.ctx, (), fib)

    def I(self, label: str) -> Derivation:
        """Contraction I_v = d/dtheta^v."""
        return Derivation(self.ctx, -1, {self.theta_name(label): self.ctx.one()})

    def L(self, label: str) -> Derivation:
        return commutator(self.I(label), self.d_w)

    def contractions(self) -> List[Derivation]:
        return [self.I(a) for a in self.lie.labels]

    def lie_derivatives(self) -> List[Derivation]:
        return [self.L(a) for a in self.lie.labels]


def weil(lie: AlgebroidSpec, truncation=None) -> WeilContext:
    """W(g) with d_CE = -1/2 c theta theta d/dtheta - c theta dtheta d/ddtheta."""
    _require_lie(lie)
    labels = lie.labels
    th = [lie.fibre_name(a) for a in labels]
    gens = [(t, 1, (1, 0)) for t in th] + [(dot(t), 2, (1, 1)) for t in th]
    ctx = Context(gens, truncation)
    T = {a: ctx.gen(t) for a, t in zip(labels, th)}
    D = {a: ctx.gen(dot(t)) for a, t in zip(labels, th)}
    ce: Dict[str, Element] = {}
    for a in labels:
        for b in labels:
            for k, t in zip(labels, th):
                c = _const(lie, a, b, k)
                if not c:
                    continue
                ce[t] = ce.get(t, ctx.zero()) + (T[a] * T[b]).scale(-c / 2)
                ce[dot(t)] = ce.get(dot(t), ctx.zero()) + (T[a] * D[b]).scale(-c)
    d_ce = Derivation(ctx, 1, ce)
    d_k = Derivation(ctx, 1, {t: ctx.gen(dot(t)) for t in th})
    d_ks = Derivation(ctx, -1, {dot(t): ctx.gen(t) for t in th})
    e = euler(ctx, {g.name: 1 for g in ctx.generators})
    return WeilContext(lie, ctx, d_ce, d_k, d_ce + d_k, d_ks, e)


# ---------------------------------------------------------------------------
# tangent lifts


def lift_context(ctx: Context, truncation=None) -> Context:
    """Generators y and dy with |dy| = |y| + 1 and bidegree shifted by (0, 1)."""
    gens = [(g.name, g.degree, (g.p_weight, g.q_weight)) for g in ctx.generators]
    gens += [(dot(g.name), g.degree + 1, (g.p_weight, g.q_weight + 1)) for g in ctx.generators]
    clash = sorted(set(ctx.names()) & {dot(n) for n in ctx.names()})
    if clash:
        raise AlgebraError(f"lifted generator {clash[0]!r} collides with an existing name; "
                           "choose a fibre prefix other than 'd'")
    if truncation is None:
        truncation = {}
        for names, bound in ctx.truncation_map().items():
            truncation[tuple(names) + tuple(dot(n) for n in names)] = bound
    return Context(gens, truncation or None)


def de_rham(lifted: Context, names: Optional[Sequence[str]] = None) -> Derivation:
    """d: y -> dy on the named (default: all undotted) generators."""
    if names is None:
        names = [g.name for g in lifted.generators if dot(g.name) in lifted.names()
                 and not (g.name.startswith("d") and g.name[1:] in lifted.names())]
    return Derivation(lifted, 1, {n: lifted.gen(dot(n)) for n in names})


def vector_contraction(phi: Derivation, lifted: Context) -> Derivation:
    """iota_phi: dy -> phi(y), y -> 0."""
    imgs = {}
    for i, v in phi.images.items():
        imgs[dot(phi.ctx.generators[i].name)] = phi.ctx.embed(v, lifted)
    return Derivation(lifted, phi.degree - 1, imgs)


def vector_lie_derivative(phi: Derivation, lifted: Context, d: Optional[Derivation] = None) -> Derivation:
    return commutator(vector_contraction(phi, lifted), d if d is not None else de_rham(lifted, phi.ctx.names()))


@dataclass
class TangentLift:
    spec: AlgebroidSpec
    chart_a: AlgebroidChart
    d_a: Derivation
    ctx: Context
    d: Derivation
    iota_da: Derivation
    L: Derivation

    @property
    def total(self) -> Derivation:
        return self.d + self.L

    def lifted_chart(self) -> AlgebroidChart:
        """[-1]TA over [-1]TM: fibres lam, dlam dual to the frame (X^C, -X^V)."""
        base = tuple(self.spec.base.names()) + tuple(dot(n) for n in self.spec.base.names())
        fib = tuple(self.spec.fibre_name(a) for a in self.spec.labels)
        fib = fib + tuple(dot(f) for f in fib)
        labels = tuple(f"{a}^C" for a in self.spec.labels) + tuple(f"-{a}^V" for a in self.spec.labels)
        return AlgebroidChart(self.ctx, base, fib, labels)

    def complete_lift(self, label: str) -> Section:
        return self.lifted_chart().frame_section(f"{label}^C")

    def vertical_lift(self, label: str) -> Section:
        return -self.lifted_chart().frame_section(f"-{label}^V")

    def gamma(self, e: Element) -> Element:
        """The MQK automorphism exp(iota_{d_A})."""
        return exp_apply(self.iota_da, e)


def tangent_lift_differential(spec: AlgebroidSpec, truncation=None) -> TangentLift:
    """L_{d_A} = [iota_{d_A}, d] on forms on [-1]A, together with d."""
    chart = spec.chart()
    d_a = build_differential(spec, chart)
    lifted = lift_context(chart.ctx, truncation)
    d = de_rham(lifted, chart.ctx.names())
    iota = vector_contraction(d_a, lifted)
    L = commutator(iota, d)
    return TangentLift(spec, chart, d_a, lifted, d, iota, L)


def six_term_lie_derivative(spec: AlgebroidSpec, lift: TangentLift) -> Derivation:
    """L_{d_A} written out term by term in coordinates (x, lam, dx, dlam)."""
    ctx = lift.ctx
    base = spec.base
    d_base = de_rham(lift_context(base), base.names())
    lam = {a: ctx.gen(spec.fibre_name(a)) for a in spec.labels}
    dlam = {a: ctx.gen(dot(spec.fibre_name(a))) for a in spec.labels}
    imgs: Dict[str, Element] = {}

    def add(name, term):
        imgs[name] = imgs[name] + term if name in imgs else term

    lb = lift_context(base)
    for (a, x), r in spec.anchor.items():
        pa = spec.p(a)
        r_up = base.embed(r, lb)
        add(x, lam[a] * lb.embed(r_up, ctx))
        dr = apply(d_base, r_up)
        add(dot(x), (lam[a] * lb.embed(dr, ctx)).scale(-1 if pa % 2 else 1))
        add(dot(x), -(dlam[a] * lb.embed(r_up, ctx)))
    for (a, b, c), v in spec.brackets.items():
        pa, pb = spec.p(a), spec.p(b)
        v_up = base.embed(v, lb)
        name = spec.fibre_name(c)
        s1 = -1 if (pa * (pb - 1)) % 2 else 1
        add(name, (lam[a] * lam[b] * lb.embed(v_up, ctx)).scale(Fraction(-s1, 2)))
        s2 = -1 if (pa * pb) % 2 else 1
        add(dot(name), (lam[a] * dlam[b] * lb.embed(v_up, ctx)).scale(-s2))
        s3 = -1 if ((pa + 1) * pb) % 2 else 1
        dv = apply(d_base, v_up)
        add(dot(name), (lam[a] * lam[b] * lb.embed(dv, ctx)).scale(Fraction(s3, 2)))
    return Derivation(ctx, 1, imgs)


# ---------------------------------------------------------------------------
# action algebroids: BRST, Cartan model


def _action_parts(spec: AlgebroidSpec):
    lie_labels = spec.labels
    fields = {a: spec.vector_field(a) for a in lie_labels}
    for a in lie_labels:
        for b in lie_labels:
            lhs = commutator(fields[a], fields[b])
            rhs = zero_derivation(spec.base, 0)
            for c in lie_labels:
                s = spec.structure(a, b, c)
                if s:
                    if not s.is_constant():
                        raise ActionError("structure functions of an action algebroid must be constant")
                    rhs = rhs + fields[c].scale(s.constant_value())
            if lhs != rhs:
                raise ActionError(f"the action is not a Lie algebra homomorphism on ({a},{b})")
    return fields


@dataclass
class BRSTModel:
    lift: TangentLift
    weil: WeilContext
    d_m: Derivation
    d_w: Derivation
    theta_L: Derivation
    dtheta_iota: Derivation

    @property
    def ctx(self) -> Context:
        return self.lift.ctx

    @property
    def D(self) -> Derivation:
        return self.d_m + self.d_w + self.theta_L - self.dtheta_iota


def brst(spec: AlgebroidSpec, truncation=None) -> BRSTModel:
    """D_B = d_M + d_W + theta^i L_{rho(v_i)} - dtheta^i iota_{rho(v_i)}."""
    fields = _action_parts(spec)
    lift = tangent_lift_differential(spec, truncation)
    ctx = lift.ctx
    lie = AlgebroidSpec(Context(), spec.frame, {}, {k: v.constant_value() for k, v in spec.brackets.items()},
                        spec.fibre_prefix)
    W = weil(lie)
    d_w = embed_derivation(W.d_w, ctx)
    base_names = spec.base.names()
    d_m = de_rham(ctx, base_names)
    tl = zero_derivation(ctx, 1)
    ti = zero_derivation(ctx, 1)
    for a in spec.labels:
        iota = _form_contraction(fields[a], ctx)
        Lx = commutator(iota, d_m)
        tl = tl + ctx.gen(spec.fibre_name(a)) * Lx
        ti = ti + ctx.gen(dot(spec.fibre_name(a))) * iota
    return BRSTModel(lift, W, d_m, d_w, tl, ti)


def _form_contraction(X: Derivation, lifted: Context) -> Derivation:
    """iota_X on forms of the base: dx -> X(x)."""
    imgs = {}
    for i, v in X.images.items():
        imgs[dot(X.ctx.generators[i].name)] = X.ctx.embed(v, lifted)
    return Derivation(lifted, X.degree - 1, imgs)


@dataclass
class CartanModel:
    ctx: Context
    d_c: Derivation
    lie_derivatives: Dict[str, Derivation]


def cartan_model(spec: AlgebroidSpec, truncation=None) -> CartanModel:
    """(Omega(M) x Sym g*) with d_C = d_M - dtheta^i iota_{rho(v_i)}."""
    fields = _action_parts(spec)
    base = spec.base
    lb = lift_context(base, truncation)
    gens = [(g.name, g.degree, (g.p_weight, g.q_weight)) for g in lb.generators]
    gens += [(dot(spec.fibre_name(a)), 2 - p, (1, 1 - p)) for a, p in spec.frame]
    ctx = Context(gens, lb.truncation_map() or None)
    d_m = de_rham(ctx, base.names())
    d_c = d_m
    Ls = {}
    for a in spec.labels:
        iota = _form_contraction(fields[a], ctx)
        d_c = d_c - ctx.gen(dot(spec.fibre_name(a))) * iota
        # g acts on forms by Lie derivatives and on Sym g* by coadjoint terms
        L = commutator(iota, d_m)
        imgs = dict((ctx.generators[i].name, v) for i, v in L.images.items())
        for k in spec.labels:
            v = ctx.zero()
            for j in spec.labels:
                c = _const_spec(spec, a, j, k)
                if c:
                    v = v - ctx.gen(dot(spec.fibre_name(j))).scale(c)
            if v:
                imgs[dot(spec.fibre_name(k))] = v
        Ls[a] = Derivation(ctx, 0, imgs)
    return CartanModel(ctx, d_c, Ls)


def _const_spec(spec: AlgebroidSpec, a, b, c) -> Fraction:
    v = spec.structure(a, b, c)
    return v.constant_value() if v else Fraction(0)


# ---------------------------------------------------------------------------
# splittings and basic subcomplexes


@dataclass
class SplittingData:
    """Connection coefficients Gamma[(x, a, b)] giving mu^b = dlam^b + Gamma_{x a}^b dx lam^a."""

    gamma: Dict[Tuple[str, str, str], Element] = field(default_factory=dict)

    @classmethod
    def flat(cls) -> "SplittingData":
        return cls({})


@dataclass
class BasicOperators:
    lift: TangentLift
    total: Derivation
    I: Dict[str, Derivation]
    L: Dict[str, Derivation]
    mu: Dict[str, Element]

    def family(self) -> List[Derivation]:
        return list(self.I.values()) + list(self.L.values())

    def horizontal(self) -> List[Derivation]:
        return list(self.I.values())


def basic_operators(spec: AlgebroidSpec, splitting: Optional[SplittingData] = None,
                    truncation=None, lift: Optional[TangentLift] = None) -> BasicOperators:
    """I_{X_a} = d/dlam^a after the change of generators dlam -> mu; L = [I, d + L_{d_A}]."""
    splitting = splitting or SplittingData.flat()
    lift = lift or tangent_lift_differential(spec, truncation)
    ctx = lift.ctx
    base = spec.base
    mu = {}
    for b in spec.labels:
        lb = spec.fibre_name(b)
        m = ctx.gen(dot(lb))
        for (x, a, bb), g in splitting.gamma.items():
            if bb != b:
                continue
            if x not in base.names() or a not in spec.labels:
                raise SpecError(f"connection entry ({x},{a},{bb}) refers to an undeclared index")
            m = m + base.embed(g, ctx) * ctx.gen(dot(x)) * ctx.gen(spec.fibre_name(a))
        if m.degree() is None:
            raise SpecError(f"connection coefficients for {b} have inconsistent degrees")
        mu[b] = m
    I, L = {}, {}
    total = lift.total
    for a in spec.labels:
        la = spec.fibre_name(a)
        raw = Derivation(ctx, -ctx[la].degree, {la: ctx.one()})
        imgs = {la: ctx.one()}
        for b in spec.labels:
            corr = apply(raw, mu[b] - ctx.gen(dot(spec.fibre_name(b))))
            if corr:
                imgs[dot(spec.fibre_name(b))] = -corr
        Ia = Derivation(ctx, raw.degree, imgs)
        for b in spec.labels:
            if apply(Ia, mu[b]):
                raise ConsistencyError("splitting does not give a triangular change of generators")
        I[a] = Ia
        L[a] = commutator(Ia, total)
    return BasicOperators(lift, total, I, L, mu)


def basic_betti(ops: BasicOperators, degrees) -> BettiTable:
    return subcomplex_betti(ops.family(), ops.total, degrees)


def restricted_equal(D1: Derivation, D2: Derivation, vectors: Sequence[Element]) -> Optional[Element]:
    """First element on which D1 and D2 differ, or None."""
    for v in vectors:
        if apply(D1, v) != apply(D2, v):
            return v
    return None


def compare_connections(spec: AlgebroidSpec, first: SplittingData, second: SplittingData, degrees,
                        truncation=None) -> Tuple[BettiTable, BettiTable]:
    """Basic Betti numbers under two connections; no invariance is asserted."""
    lift = tangent_lift_differential(spec, truncation)
    a = basic_betti(basic_operators(spec, first, lift=lift), degrees)
    b = basic_betti(basic_operators(spec, second, lift=lift), degrees)
    return a, b


# ---------------------------------------------------------------------------
# matched pairs and doubles


@dataclass
class MatchedPairSpec:
    """Two algebroids over one base with mutual representations.

    ``a_on_b[(i, j, k)]`` is the Y_k coefficient of nabla_{X_i} Y_j and
    ``b_on_a[(j, i, m)]`` the X_m coefficient of nabla_{Y_j} X_i.
    """

    A: AlgebroidSpec
    B: AlgebroidSpec
    a_on_b: Dict[Tuple[str, str, str], Element] = field(default_factory=dict)
    b_on_a: Dict[Tuple[str, str, str], Element] = field(default_factory=dict)
    horizontal: str = "B"

    def __post_init__(self):
        if self.A.base != self.B.base:
            raise SpecError("both algebroids must share one base")
        if self.horizontal not in ("A", "B"):
            raise SpecError("horizontal must name factor A or B")
        if set(self.A.labels) & set(self.B.labels):
            raise SpecError("frame labels of A and B must be distinct")
        if self.A.fibre_prefix == self.B.fibre_prefix and \
                {self.A.fibre_name(a) for a in self.A.labels} & {self.B.fibre_name(b) for b in self.B.labels}:
            raise SpecError("fibre coordinates of A and B collide")
        if any(p for _, p in self.A.frame + self.B.frame):
            raise SpecError("matched pairs are supported for degree-0 frames")
        base = self.A.base
        conv = lambda v: v if isinstance(v, Element) else (base.parse(v) if isinstance(v, str) else base.const(v))
        self.a_on_b = {k: conv(v) for k, v in self.a_on_b.items()}
        self.b_on_a = {k: conv(v) for k, v in self.b_on_a.items()}
        for (i, j, k) in self.a_on_b:
            if i not in self.A.labels or j not in self.B.labels or k not in self.B.labels:
                raise SpecError(f"representation entry ({i},{j},{k}) refers to an undeclared index")
        for (j, i, m) in self.b_on_a:
            if j not in self.B.labels or i not in self.A.labels or m not in self.A.labels:
                raise SpecError(f"representation entry ({j},{i},{m}) refers to an undeclared index")

    def direct_sum(self) -> AlgebroidSpec:
        """A + B with [X_i, Y_j] = nabla_{X_i} Y_j - nabla_{Y_j} X_i."""
        A, B = self.A, self.B
        frame = A.frame + B.frame
        anchor = dict(A.anchor)
        anchor.update(B.anchor)
        brackets = dict(A.brackets)
        brackets.update(B.brackets)
        zero = A.base.zero()
        mixed: Dict[Tuple[str, str, str], Element] = {}
        for (i, j, k), v in self.a_on_b.items():
            mixed[(i, j, k)] = mixed.get((i, j, k), zero) + v
        for (j, i, m), v in self.b_on_a.items():
            mixed[(i, j, m)] = mixed.get((i, j, m), zero) - v
        brackets.update({k: v for k, v in mixed.items() if v})
        return _SumSpec(A.base, frame, anchor, brackets, A, B)


class _SumSpec(AlgebroidSpec):
    """Direct sum keeping each summand's own fibre prefix."""

    def __init__(self, base, frame, anchor, brackets, A, B):
        self._names = {a: A.fibre_name(a) for a in A.labels}
        self._names.update({b: B.fibre_name(b) for b in B.labels})
        super().__init__(base, frame, anchor, brackets, "")

    def fibre_name(self, a: str) -> str:
        return self._names[a]


@dataclass
class MatchedPairDouble:
    spec: MatchedPairSpec
    chart: AlgebroidChart
    d_a_bar: Derivation
    d_b_bar: Derivation

    @property
    def ctx(self) -> Context:
        return self.chart.ctx

    @property
    def total(self) -> Derivation:
        return self.d_a_bar + self.d_b_bar

    def compatibility(self) -> Derivation:
        return commutator(self.d_a_bar, self.d_b_bar)

    def direct_sum_differential(self) -> Derivation:
        """d of the direct-sum algebroid, built independently in the same chart."""
        return build_differential(self.spec.direct_sum(), self.chart)

    def contracted_factor(self) -> AlgebroidSpec:
        return self.spec.A if self.spec.horizontal == "B" else self.spec.B

    def contractions(self) -> List[Derivation]:
        S = self.contracted_factor()
        return [Derivation(self.ctx, -1, {S.fibre_name(a): self.ctx.one()}) for a in S.labels]

    def basic_family(self) -> List[Derivation]:
        Is = self.contractions()
        return Is + [commutator(I, self.total) for I in Is]

    def basic_betti(self, degrees) -> BettiTable:
        return subcomplex_betti(self.basic_family(), self.total, degrees)


def _bar_differential(X: AlgebroidSpec, Y: AlgebroidSpec, rep: Mapping[Tuple[str, str, str], Element],
                      ctx: Context) -> Derivation:
    """d_Xbar = d_X + x^i sigma_ij^k y^j d/dy^k with sigma = -nabla."""
    chart = AlgebroidChart(ctx, X.base.names(), tuple(X.fibre_name(a) for a in X.labels), X.labels)
    d = build_differential(X, chart)
    imgs = {ctx.generators[i].name: v for i, v in d.images.items()}
    for (i, j, k), v in rep.items():
        name = Y.fibre_name(k)
        term = -(ctx.gen(X.fibre_name(i)) * X.base.embed(v, ctx) * ctx.gen(Y.fibre_name(j)))
        imgs[name] = imgs[name] + term if name in imgs else term
    return Derivation(ctx, 1, imgs)


def matched_pair_double(spec: MatchedPairSpec, truncation=None, check: bool = True) -> MatchedPairDouble:
    A, B = spec.A, spec.B
    base = A.base
    gens = [(g.name, g.degree, (0, g.degree)) for g in base.generators]
    gens += [(A.fibre_name(a), 1 - p, (1, -p)) for a, p in A.frame]
    gens += [(B.fibre_name(b), 1 - p, (0, 1 - p)) for b, p in B.frame]
    ctx = Context(gens, truncation if truncation is not None else (base.truncation_map() or None))
    d_a = _bar_differential(A, B, spec.a_on_b, ctx)
    d_b = _bar_differential(B, A, spec.b_on_a, ctx)
    fib = tuple(A.fibre_name(a) for a in A.labels) + tuple(B.fibre_name(b) for b in B.labels)
    chart = AlgebroidChart(ctx, base.names(), fib, A.labels + B.labels)
    double = MatchedPairDouble(spec, chart, d_a, d_b)
    if check:
        for name, part in (("d_Abar", d_a), ("d_Bbar", d_b)):
            w = square_witness(part)
            if w is not None:
                raise CompatibilityError(f"{name}^2 is nonzero on {w[0]}: {w[1]} (not a representation)", w)
        comm = double.compatibility()
        if not comm.is_zero():
            i = min(comm.images)
            raise CompatibilityError(
                f"[d_Abar, d_Bbar] is nonzero on {ctx.generators[i].name}: {comm.images[i]}",
                (ctx.generators[i].name, comm.images[i]))
    return double


@dataclass
class BialgebraSpec:
    g: AlgebroidSpec
    g_dual: AlgebroidSpec

    def __post_init__(self):
        _require_lie(self.g)
        _require_lie(self.g_dual)
        if len(self.g.labels) != len(self.g_dual.labels):
            raise SpecError("g and its dual must have the same dimension")

    def dual_of(self, a: str) -> str:
        return self.g_dual.labels[self.g.labels.index(a)]

    def matched_pair(self) -> MatchedPairSpec:
        """g and g* acting on each other by coadjoint representations."""
        g, h = self.g, self.g_dual
        a_on_b, b_on_a = {}, {}
        for i in g.labels:
            for j in h.labels:
                for k in h.labels:
                    # ad*_{e_i} xi^j = -sum_k c_ik^j xi^k
                    c = _const(g, i, g.labels[h.labels.index(k)], g.labels[h.labels.index(j)])
                    if c:
                        a_on_b[(i, j, k)] = -c
        for j in h.labels:
            for i in g.labels:
                for m in g.labels:
                    c = _const(h, j, h.labels[g.labels.index(m)], h.labels[g.labels.index(i)])
                    if c:
                        b_on_a[(j, i, m)] = -c
        return MatchedPairSpec(g, h, a_on_b, b_on_a, "B")


@dataclass
class DrinfeldDouble:
    bialgebra: BialgebraSpec
    double: MatchedPairDouble

    @property
    def delta(self) -> Derivation:
        return self.double.d_a_bar

    @property
    def delta_star(self) -> Derivation:
        return self.double.d_b_bar

    @property
    def total(self) -> Derivation:
        return self.double.total

    def compatible(self) -> bool:
        return self.double.compatibility().is_zero()

    def bracket_table(self):
        return anchor_and_bracket_from_differential(self.double.chart, self.total).structure_table


def drinfeld_double(spec: BialgebraSpec, check: bool = True) -> DrinfeldDouble:
    for part in (spec.g, spec.g_dual):
        w = square_witness(build_differential(part))
        if w is not None:
            raise CompatibilityError(f"Jacobi identity fails: d^2({w[0]}) = {w[1]}", w)
    return DrinfeldDouble(spec, matched_pair_double(spec.matched_pair(), check=check))


# ---------------------------------------------------------------------------
# equivariant algebroid cohomology


@dataclass
class GinzburgModel:
    spec: AlgebroidSpec
    weil: WeilContext
    action: AlgebroidSpec
    chart: AlgebroidChart
    d_a: Derivation
    d_k: Derivation
    d_a_bar: Derivation
    d_k_star: Derivation
    a_tilde: Dict[str, Section]
    d_a_small: Derivation

    @property
    def ctx(self) -> Context:
        return self.chart.ctx

    @property
    def total(self) -> Derivation:
        return self.d_a + self.d_k + self.d_a_bar

    @property
    def Q(self) -> Derivation:
        return commutator(self.d_k_star, self.d_a_bar)

    def conjugated(self) -> Derivation:
        return exp_conjugate(-self.Q, self.d_a + self.d_k)

    def I(self, v: str) -> Derivation:
        return Derivation(self.ctx, -1, {self.weil.theta_name(v): self.ctx.one()})

    def L(self, v: str) -> Derivation:
        return commutator(self.I(v), self.total)

    def basic_family(self) -> List[Derivation]:
        labels = self.weil.lie.labels
        return [self.I(v) for v in labels] + [self.L(v) for v in labels]

    def iota_tilde(self, v: str) -> Derivation:
        return embed_derivation(contraction(self.a_tilde[v]), self.ctx)

    def L_tilde(self, v: str) -> Derivation:
        return embed_derivation(lie_derivative(self.a_tilde[v], self.d_a_small), self.ctx)

    def cartan_differential(self) -> Derivation:
        """d_A - dtheta^i iota_{a(v_i)}."""
        out = self.d_a
        for v in self.weil.lie.labels:
            out = out - self.ctx.gen(self.weil.dtheta_name(v)) * self.iota_tilde(v)
        return out

    def brst_form(self) -> Derivation:
        """d_A + d_W + theta^i L_{a(v_i)} - dtheta^i iota_{a(v_i)}."""
        out = self.d_a + embed_derivation(self.weil.d_w, self.ctx)
        for v in self.weil.lie.labels:
            out = out + self.ctx.gen(self.weil.theta_name(v)) * self.L_tilde(v)
            out = out - self.ctx.gen(self.weil.dtheta_name(v)) * self.iota_tilde(v)
        return out


def ginzburg_model(spec: AlgebroidSpec, lie: AlgebroidSpec, a_tilde: Mapping[str, Section],
                   truncation=None) -> GinzburgModel:
    """Equivariant model with rho(v^C) = L_{a(v)}, rho(v^V) = iota_{a(v)}."""
    _require_lie(lie)
    chart_a = spec.chart(truncation)
    d_small = build_differential(spec, chart_a)
    secs = {}
    for v in lie.labels:
        X = a_tilde.get(v)
        secs[v] = X if X is not None else chart_a.zero_section(0)
        if secs[v].chart != chart_a:
            secs[v] = Section(chart_a, [f.ctx.embed(f, chart_a.ctx) for f in secs[v].coeffs], secs[v].degree)
        if not secs[v].is_zero() and secs[v].degree != 0:
            raise ActionError(f"a({v}) must be a degree-0 section")
    for v in lie.labels:
        for w in lie.labels:
            lhs = bracket_of_sections(secs[v], secs[w], d_small)
            rhs = chart_a.zero_section(0)
            for c in lie.labels:
                s = _const(lie, v, w, c)
                if s:
                    rhs = rhs + secs[c].scale(s)
            if lhs != rhs:
                raise ActionError(f"a is not a Lie algebra homomorphism on ({v},{w})")
    W = weil(lie)
    rec = anchor_and_bracket_from_differential(W.chart(), W.d_ce)
    base_ctx = chart_a.ctx
    anchor = {}
    for v in lie.labels:
        Lv = lie_derivative(secs[v], d_small)
        Iv = contraction(secs[v])
        for g in base_ctx.generators:
            a = Lv.image(g.index)
            if a:
                anchor[(W.theta_name(v), g.name)] = a
            b = Iv.image(g.index)
            if b:
                anchor[(W.dtheta_name(v), g.name)] = -b
    frame = tuple((lab, W.chart().p(i)) for i, lab in enumerate(rec.chart.labels))
    brackets = {k: base_ctx.const(val.constant_value()) for k, val in rec.structure_table.items()}
    action = AlgebroidSpec(base_ctx, frame, anchor, brackets, fibre_prefix="")
    chart = action.chart()
    d_bar = build_differential(action, chart)
    ctx = chart.ctx
    model = GinzburgModel(spec, W, action, chart, embed_derivation(d_small, ctx),
                          embed_derivation(W.d_k, ctx), d_bar, embed_derivation(W.d_k_star, ctx), secs, d_small)
    return model
