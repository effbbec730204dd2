"""Graded Poisson brackets given by a pairing of generators.

A :class:`PoissonContext` fixes constants ``{g_i, g_j}`` and a bracket degree
``n``; the bracket is extended as a biderivation with

    {f, g} = -(-1)^{(|f|+n)(|g|+n)} {g, f}
    {f, gh} = {f, g} h + (-1)^{(|f|+n)|g|} g {f, h}.

``{f, -}`` is the Hamiltonian derivation ``V_f`` of degree ``|f| + n``.  Shifted
cotangent contexts, Lie-Poisson structures, cotangent lifts and the point-base
Courant (quadratic Lie algebra) model are built on top of this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import linalg
from .algebroid import AlgebroidChart, AlgebroidSpec, anchor_and_bracket_from_differential
from .core import AlgebraError, Context, Element, as_scalar
from .derivations import (Derivation, DegreeError, apply, commutator, embed_derivation,
                          is_homological, square_witness, zero_derivation)


class IntegrabilityError(AlgebraError):
    pass


class RepresentationError(AlgebraError):
    pass


class CourantError(AlgebraError):
    def __init__(self, message, pair=None, value=None):
        super().__init__(message)
        self.pair = pair
        self.value = value


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


class PoissonContext:
    """A context with constant fundamental brackets of degree ``n``."""

    def __init__(self, ctx: Context, pairing: Mapping[Tuple[str, str], object], n: int):
        self.ctx = ctx
        self.n = int(n)
        table: Dict[Tuple[int, int], Fraction] = {}
        for (a, b), v in pairing.items():
            i, j = ctx.index(a), ctx.index(b)
            v = as_scalar(v)
            if not v:
                continue
            di, dj = ctx.generators[i].degree, ctx.generators[j].degree
            if di + dj + self.n != 0:
                raise DegreeError(f"{{{a},{b}}} must vanish: degrees {di}+{dj} do not match -{self.n}")
            partner = -_sign((di + self.n) * (dj + self.n)) * v
            if (j, i) in table and table[(j, i)] != partner:
                raise AlgebraError(f"pairing of ({a},{b}) is not graded antisymmetric")
            table[(i, j)] = v
            table[(j, i)] = partner
        self.table = table
        self._gen_fields = [self._generator_field(i) for i in range(len(ctx))]

    def pairing(self, a, b) -> Fraction:
        return self.table.get((self.ctx.index(a), self.ctx.index(b)), Fraction(0))

    def _generator_field(self, i: int) -> Derivation:
        imgs = {j: self.ctx.const(v) for (k, j), v in self.table.items() if k == i}
        return Derivation(self.ctx, self.ctx.generators[i].degree + self.n, imgs)

    def partner(self, name) -> str:
        """The unique generator paired with ``name``."""
        i = self.ctx.index(name)
        js = [j for (k, j) in self.table if k == i]
        if len(js) != 1:
            raise RepresentationError(f"{self.ctx.generators[i].name} is not paired with a single generator")
        return self.ctx.generators[js[0]].name


def hamiltonian_derivation(P: PoissonContext, f: Element) -> Derivation:
    """V_f = {f, -}."""
    ctx = P.ctx
    if f.is_zero():
        return zero_derivation(ctx, P.n)
    d = f.degree()
    if d is None:
        raise DegreeError("Hamiltonian derivations need a homogeneous function")
    imgs = {}
    for g in ctx.generators:
        v = apply(P._gen_fields[g.index], f)
        if v:
            imgs[g.index] = v.scale(-_sign((d + P.n) * (g.degree + P.n)))
    return Derivation(ctx, d + P.n, imgs)


def poisson_bracket(P: PoissonContext, f: Element, g: Element) -> Element:
    if f.ctx != P.ctx or g.ctx != P.ctx:
        from .core import ContextMismatch
        raise ContextMismatch("elements are not from the Poisson context")
    from .core import degree_components
    out = P.ctx.zero()
    for _, part in degree_components(f).items():
        out = out + apply(hamiltonian_derivation(P, part), g)
    return out


def derived_bracket(P: PoissonContext, pi: Element, f: Element, g: Element) -> Element:
    """[[f, pi], g]."""
    return poisson_bracket(P, poisson_bracket(P, f, pi), g)


def poisson_structure_check(P: PoissonContext, pi: Element, degree: Optional[int] = None) -> bool:
    """True iff [pi, pi] = 0; pi must have degree 1 - n (default)."""
    want = 1 - P.n if degree is None else degree
    if not pi.is_zero() and pi.degree() != want:
        raise DegreeError(f"bivector has degree {pi.degree()}, expected {want}")
    return poisson_bracket(P, pi, pi).is_zero()


def poisson_differential(P: PoissonContext, pi: Element) -> Derivation:
    """d_pi = [pi, -]."""
    if not poisson_structure_check(P, pi):
        raise IntegrabilityError("[pi, pi] does not vanish")
    if pi.is_zero():
        return zero_derivation(P.ctx, 1)
    return hamiltonian_derivation(P, pi)


# ---------------------------------------------------------------------------
# shifted cotangent contexts


@dataclass
class CotangentContext:
    """Base coordinates x^i and momenta p_i with {x^i, p_i} = 1."""

    poisson: PoissonContext
    base: Tuple[str, ...]
    momenta: Tuple[str, ...]
    k: int

    @property
    def ctx(self) -> Context:
        return self.poisson.ctx

    def chart(self, labels: Optional[Sequence[str]] = None) -> AlgebroidChart:
        return AlgebroidChart(self.ctx, self.base, self.momenta, tuple(labels or self.base))


def cotangent_context(base: Context, k: int = 0, prefix: str = "p", truncation=None) -> CotangentContext:
    """Context for [k-1]T*M carrying the degree k-1 Schouten-type bracket."""
    n = k - 1
    gens = [(g.name, g.degree, (0, g.degree)) for g in base.generators]
    momenta = []
    for g in base.generators:
        deg = -g.degree - n
        gens.append((prefix + g.name, deg, (1, deg - 1)))
        momenta.append(prefix + g.name)
    trunc = dict(truncation or base.truncation_map())
    ctx = Context(gens, trunc or None)
    pairing = {(g.name, prefix + g.name): 1 for g in base.generators}
    return CotangentContext(PoissonContext(ctx, pairing, n), base.names(), tuple(momenta), k)


def bivector(C: CotangentContext, components: Mapping[Tuple[str, str], Union[Element, str, int]]) -> Element:
    """pi with derived bracket {x^i, x^j} = pi^{ij} on an ordinary (k = 0) base."""
    if C.k != 0 or any(C.ctx[x].degree for x in C.base):
        raise RepresentationError("bivectors are only built for degree-0 bases with k = 0")
    ctx = C.ctx
    full: Dict[Tuple[str, str], Element] = {}
    for (i, j), v in components.items():
        v = ctx.parse(v) if isinstance(v, str) else (v if isinstance(v, Element) else ctx.const(v))
        if (j, i) in components and full.get((j, i)) is not None and full[(j, i)] != -v:
            raise AlgebraError(f"bivector components ({i},{j}) are not antisymmetric")
        full[(i, j)] = v
        full[(j, i)] = -v
    pi = ctx.zero()
    for (i, j), v in full.items():
        if i == j and v:
            raise AlgebraError("bivector diagonal must vanish")
        pi = pi + (v * ctx.gen(C.momenta[C.base.index(i)]) * ctx.gen(C.momenta[C.base.index(j)])).scale(Fraction(-1, 2))
    return pi


def lie_poisson(lie: AlgebroidSpec, prefix: str = "p") -> Tuple[CotangentContext, Element]:
    """The linear Poisson structure {x_a, x_b} = c_ab^c x_c on the dual of a Lie algebra."""
    base = Context([(a, 0) for a in lie.labels])
    C = cotangent_context(base, 0, prefix)
    comps = {}
    for a in lie.labels:
        for b in lie.labels:
            v = C.ctx.zero()
            for c in lie.labels:
                s = lie.structure(a, b, c)
                if s:
                    v = v + C.ctx.gen(c).scale(s.constant_value())
            if v and (b, a) not in comps:
                comps[(a, b)] = v
    return C, bivector(C, comps)


def coadjoint_action(lie: AlgebroidSpec) -> AlgebroidSpec:
    """Action algebroid of g on its dual, v_a = c_ab^c x_c d/dx_b."""
    base = Context([(a, 0) for a in lie.labels])
    fields = {}
    for a in lie.labels:
        imgs = {}
        for b in lie.labels:
            v = base.zero()
            for c in lie.labels:
                s = lie.structure(a, b, c)
                if s:
                    v = v + base.gen(c).scale(s.constant_value())
            if v:
                imgs[b] = v
        fields[a] = imgs
    return AlgebroidSpec.action(lie, base, fields, fibre_prefix="p")


def cotangent_lift(P: PoissonContext, X: Derivation, base: Optional[Sequence[str]] = None) -> Derivation:
    """Hamiltonian lift of a vector field on the base coordinates.

    X is written as the linear function sum X(b) m_b / {m_b, b} in the
    momenta m_b paired with the base coordinates b, so that V restricts to X.
    """
    ctx = P.ctx
    if X.ctx != ctx:
        X = embed_derivation(X, ctx)
    names = tuple(base) if base is not None else tuple(ctx.generators[i].name for i in sorted(X.images))
    phi = ctx.zero()
    for b in names:
        img = X.image(b)
        if not img:
            continue
        m = P.partner(b)
        c = P.pairing(m, b)
        phi = phi + (img * ctx.gen(m)).scale(1 / c)
    V = hamiltonian_derivation(P, phi)
    if not V.is_zero() and V.degree != X.degree:
        raise RepresentationError("lift has the wrong degree")
    for b in names:
        if V.image(b) != X.image(b):
            raise RepresentationError(f"lift does not restrict to the vector field on {b}")
    return V


def recovered_poisson_algebroid(C: CotangentContext, pi: Element, labels=None):
    """Anchor and bracket read off d_pi on the shifted cotangent chart."""
    d = poisson_differential(C.poisson, pi)
    return anchor_and_bracket_from_differential(C.chart(labels), d)


# ---------------------------------------------------------------------------
# quadratic Lie algebras as point-base Courant algebroids


@dataclass
class QuadraticLieSpec:
    labels: Tuple[str, ...]
    inner: Dict[Tuple[str, str], Fraction]
    brackets: Dict[Tuple[str, str, str], Fraction]

    def __post_init__(self):
        self.labels = tuple(self.labels)
        inner = {}
        for (a, b), v in self.inner.items():
            v = as_scalar(v)
            if (b, a) in inner and inner[(b, a)] != v:
                raise CourantError(f"inner product is not symmetric on ({a},{b})", (a, b), v)
            inner[(a, b)] = v
            inner[(b, a)] = v
        self.inner = {k: v for k, v in inner.items() if v}
        br = {}
        for (a, b, c), v in self.brackets.items():
            v = as_scalar(v)
            if (b, a, c) in br and br[(b, a, c)] != -v:
                raise CourantError(f"bracket is not antisymmetric on ({a},{b})", (a, b), v)
            br[(a, b, c)] = v
            br[(b, a, c)] = -v
        self.brackets = {k: v for k, v in br.items() if v}
        if linalg.rank(self.gram()) != len(self.labels):
            raise CourantError("inner product is degenerate")
        # ad-invariance: <[a,b],c> + <b,[a,c]> = 0
        for a in self.labels:
            for b in self.labels:
                for c in self.labels:
                    v = self.C(a, b, c) + self.C(a, c, b)
                    if v:
                        raise CourantError(f"inner product is not ad-invariant on ({a},{b},{c})",
                                           (a, b, c), v)

    def g(self, a, b) -> Fraction:
        return self.inner.get((a, b), Fraction(0))

    def c(self, a, b, c) -> Fraction:
        return self.brackets.get((a, b, c), Fraction(0))

    def gram(self):
        return [[self.g(a, b) for b in self.labels] for a in self.labels]

    def C(self, a, b, c) -> Fraction:
        """<[e_a, e_b], e_c>."""
        return sum((self.c(a, b, d) * self.g(d, c) for d in self.labels), Fraction(0))


@dataclass
class CourantModel:
    spec: QuadraticLieSpec
    poisson: PoissonContext
    theta: Element
    delta: Derivation

    @property
    def ctx(self) -> Context:
        return self.poisson.ctx

    def element(self, coeffs: Mapping[str, object]) -> Element:
        out = self.ctx.zero()
        for a, v in coeffs.items():
            out = out + self.ctx.gen(a).scale(as_scalar(v))
        return out

    def bracket(self, u: Element, v: Element) -> Element:
        """The derived bracket {{u, Theta}, v}."""
        return derived_bracket(self.poisson, self.theta, u, v)


def courant_model(spec: QuadraticLieSpec) -> CourantModel:
    """Degree-1 generators with {e_a, e_b} = <e_a, e_b> and cubic Theta."""
    ctx = Context([(a, 1, (1, 0)) for a in spec.labels])
    P = PoissonContext(ctx, {(a, b): v for (a, b), v in spec.inner.items()}, -2)
    ginv = linalg.inverse(spec.gram())
    dual = []
    for i in range(len(spec.labels)):
        e = ctx.zero()
        for j, b in enumerate(spec.labels):
            if ginv[i][j]:
                e = e + ctx.gen(b).scale(ginv[i][j])
        dual.append(e)
    theta = ctx.zero()
    for i, a in enumerate(spec.labels):
        for j, b in enumerate(spec.labels):
            for k, c in enumerate(spec.labels):
                v = spec.C(a, b, c)
                if v:
                    theta = theta + (dual[i] * dual[j] * dual[k]).scale(v * Fraction(-1, 6))
    delta = hamiltonian_derivation(P, theta) if theta else zero_derivation(ctx, 1)
    model = CourantModel(spec, P, theta, delta)
    for a in spec.labels:
        for b in spec.labels:
            want = model.element({c: spec.c(a, b, c) for c in spec.labels})
            if model.bracket(ctx.gen(a), ctx.gen(b)) != want:
                raise CourantError("derived bracket does not reproduce the Lie bracket", (a, b))
    w = square_witness(delta)
    if w is not None:
        raise CourantError(f"delta does not square to zero on {w[0]}: Jacobi fails", (w[0],), w[1])
    return model


@dataclass
class LiftedActionReport:
    model: CourantModel
    rho_vertical: Dict[str, Derivation]
    rho_complete: Dict[str, Derivation]
    action_spec: AlgebroidSpec
    morphic: Derivation
    homomorphism_pairs: int


def _tangent_lie(lie: AlgebroidSpec):
    """[-1]Tg as a Lie superalgebra read off the Weil differential."""
    from .models import weil

    W = weil(lie)
    rec = anchor_and_bracket_from_differential(W.chart(), W.d_ce)
    return W, rec


def courant_lifted_action(model: CourantModel, lie: AlgebroidSpec,
                          a_tilde: Mapping[str, Element]) -> LiftedActionReport:
    """Lifted action rho(v^V) = V_a(v), rho(v^C) = V_{delta a(v)} and its Q-algebroid."""
    ctx = model.ctx
    P = model.poisson
    labels = lie.labels
    imgs = {}
    for v in labels:
        e = a_tilde.get(v, ctx.zero())
        if isinstance(e, str):
            e = ctx.parse(e)
        if e and e.degree() != 1:
            raise CourantError(f"image of {v} is not a degree-1 element", (v,), e)
        imgs[v] = e
    for v in labels:
        for w in labels:
            val = poisson_bracket(P, imgs[v], imgs[w])
            if val:
                raise CourantError(f"image is not isotropic: <a({v}), a({w})> = {val}", (v, w), val)
    for v in labels:
        for w in labels:
            lhs = ctx.zero()
            for c in labels:
                s = lie.structure(v, w, c)
                if s:
                    lhs = lhs + imgs[c].scale(s.constant_value())
            rhs = model.bracket(imgs[v], imgs[w])
            if lhs != rhs:
                raise CourantError(f"lifted action does not respect the bracket on ({v},{w})", (v, w),
                                   lhs - rhs)
    rho_V = {v: hamiltonian_derivation(P, imgs[v]) if imgs[v] else zero_derivation(ctx, -1) for v in labels}
    rho_C = {}
    for v in labels:
        da = apply(model.delta, imgs[v])
        rho_C[v] = hamiltonian_derivation(P, da) if da else zero_derivation(ctx, 0)
    # homomorphism on all lift pairs
    pairs = 0
    for v in labels:
        for w in labels:
            def comb(table, c_fn):
                out = None
                for c in labels:
                    s = lie.structure(v, w, c)
                    if s:
                        t = table[c].scale(s.constant_value())
                        out = t if out is None else out + t
                return out
            checks = [
                ("C", "C", commutator(rho_C[v], rho_C[w]), comb(rho_C, None)),
                ("C", "V", commutator(rho_C[v], rho_V[w]), comb(rho_V, None)),
                ("V", "V", commutator(rho_V[v], rho_V[w]), None),
            ]
            for kv, kw, lhs, rhs in checks:
                pairs += 1
                ok = lhs.is_zero() if rhs is None else lhs == rhs
                if not ok:
                    raise CourantError(f"lifted action is not a homomorphism on ({v}^{kv}, {w}^{kw})",
                                       (f"{v}^{kv}", f"{w}^{kw}"))
    # action algebroid E x [-1]Tg -> E with frame (v^C, -v^V) dual to (theta, dtheta)
    W, rec = _tangent_lie(lie)
    frame = tuple((lab, W.chart().p(i)) for i, lab in enumerate(rec.chart.labels))
    anchor = {}
    for v in labels:
        cl, vl = W.theta_name(v), W.dtheta_name(v)
        for g in ctx.generators:
            a = rho_C[v].image(g.index)
            if a:
                anchor[(cl, g.name)] = a
            b = rho_V[v].image(g.index)
            if b:
                anchor[(vl, g.name)] = -b
    brackets = {k: ctx.const(v.constant_value()) for k, v in rec.structure_table.items()}
    spec = AlgebroidSpec(ctx, frame, anchor, brackets, fibre_prefix="")
    from .algebroid import build_differential, is_morphic
    chart = spec.chart()
    d_act = build_differential(spec, chart)
    morphic = embed_derivation(model.delta, chart.ctx) + embed_derivation(W.d_k, chart.ctx)
    if not is_homological(d_act):
        raise CourantError("action algebroid differential does not square to zero")
    if not is_morphic(chart, morphic, d_act):
        raise CourantError("delta + d_K is not morphic for the action algebroid")
    return LiftedActionReport(model, rho_V, rho_C, spec, morphic, pairs)
