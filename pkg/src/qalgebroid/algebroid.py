"""Superalgebroids described by structure functions, and their differentials.

An algebroid over a base with coordinates ``x^i`` is given by a frame
``X_a`` of degrees ``p_a``, anchor coefficients ``rho(X_a) = rho_a^i d/dx^i``
and structure functions ``[X_a, X_b] = c_ab^c X_c``.  The dual shifted fibre
coordinates ``lam^a`` have degree ``1 - p_a`` and bidegree ``(1, -p_a)``.

Everything else here works on an :class:`AlgebroidChart`: a context split
into base and fibre generators, with a degree-1 derivation playing the role
of the algebroid differential.  Contractions are normalised by
``iota_{X_a}(lam^b) = delta_a^b`` and sections carry left coefficients,
``X = f^a X_a`` with ``iota_X(lam^a) = f^a``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .core import AlgebraError, Context, Element, as_scalar
from .derivations import (Derivation, DegreeError, apply, commutator, is_homological,
                          square_witness, zero_derivation)


class SpecError(AlgebraError):
    pass


class ShapeError(AlgebraError):
    pass


class LinearityError(AlgebraError):
    pass


class ConsistencyError(AlgebraError):
    pass


class HypothesisError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


Coeff = Union[Element, int, Fraction, str]


def _base_coeff(base: Context, value: Coeff) -> Element:
    if isinstance(value, Element):
        if value.ctx != base:
            raise SpecError("coefficient is not over the base context")
        return value
    if isinstance(value, str):
        return base.parse(value)
    return base.const(value)


@dataclass
class AlgebroidSpec:
    """Structure-constant description of an algebroid in a global frame."""

    base: Context
    frame: Tuple[Tuple[str, int], ...]
    anchor: Dict[Tuple[str, str], Element] = field(default_factory=dict)
    brackets: Dict[Tuple[str, str, str], Element] = field(default_factory=dict)
    fibre_prefix: str = "θ"

    def __post_init__(self):
        self.frame = tuple((str(a), int(p)) for a, p in self.frame)
        self.anchor = {k: _base_coeff(self.base, v) for k, v in self.anchor.items()}
        self.anchor = {k: v for k, v in self.anchor.items() if v}
        raw = {k: _base_coeff(self.base, v) for k, v in self.brackets.items()}
        errors = []
        full: Dict[Tuple[str, str, str], Element] = {}
        labels = self._labels()
        for (a, b, c), v in raw.items():
            partner = (b, a, c)
            if a not in labels or b not in labels:
                full[(a, b, c)] = v  # reported by validate()
                continue
            # [X_b, X_a] = -(-1)^{p_a p_b} [X_a, X_b]
            sym = v.scale(1 if (self.p(a) * self.p(b)) % 2 else -1)
            if partner in raw and raw[partner] != sym:
                errors.append(f"antisymmetry violated for [{a},{b}] -> {c}: "
                              f"{v} vs {raw[partner]}")
            if v:
                full[(a, b, c)] = v
                if partner not in raw and sym:
                    full[partner] = sym
        if errors:
            raise SpecError("; ".join(errors))
        self.brackets = full
        problems = self.validate()
        if problems:
            raise SpecError("; ".join(problems))

    # -- lookup -----------------------------------------------------------
    def _labels(self):
        return {a for a, _ in self.frame}

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(a for a, _ in self.frame)

    def p(self, label: str) -> int:
        for a, p in self.frame:
            if a == label:
                return p
        raise SpecError(f"unknown frame label {label!r}")

    def structure(self, a: str, b: str, c: str) -> Element:
        return self.brackets.get((a, b, c)) or self.base.zero()

    def rho(self, a: str, x: str) -> Element:
        return self.anchor.get((a, x)) or self.base.zero()

    def fibre_name(self, a: str) -> str:
        return f"{self.fibre_prefix}{a}"

    def validate(self) -> List[str]:
        errs = []
        labels = self._labels()
        if len(labels) != len(self.frame):
            errs.append("frame labels must be unique")
        base_names = set(self.base.names())
        for (a, x), v in self.anchor.items():
            if a not in labels or x not in base_names:
                errs.append(f"anchor entry ({a},{x}) refers to an undeclared index")
                continue
            want = self.p(a) + self.base[x].degree
            if v.degree() != want:
                errs.append(f"anchor ({a},{x}) has degree {v.degree()}, expected {want}")
        for (a, b, c), v in self.brackets.items():
            if not {a, b, c} <= labels:
                errs.append(f"bracket entry ({a},{b},{c}) refers to an undeclared index")
                continue
            want = self.p(a) + self.p(b) - self.p(c)
            if v.degree() != want:
                errs.append(f"structure function ({a},{b},{c}) has degree {v.degree()}, expected {want}")
        return errs

    # -- charts -----------------------------------------------------------
    def context(self, truncation=None) -> Context:
        """[-1]A; the truncation defaults to the base's own."""
        gens = [(g.name, g.degree, (g.p_weight, g.q_weight)) for g in self.base.generators]
        gens += [(self.fibre_name(a), 1 - p, (1, -p)) for a, p in self.frame]
        if truncation is None:
            truncation = self.base.truncation_map() or None
        return Context(gens, truncation)

    def chart(self, truncation=None) -> "AlgebroidChart":
        ctx = self.context(truncation)
        return AlgebroidChart(ctx, self.base.names(), tuple(self.fibre_name(a) for a in self.labels),
                              self.labels)

    # -- constructors -----------------------------------------------------
    @classmethod
    def lie_algebra(cls, labels: Sequence[str], brackets: Mapping[Tuple[str, str, str], Coeff],
                    degrees: Optional[Mapping[str, int]] = None, fibre_prefix: str = "θ") -> "AlgebroidSpec":
        degrees = degrees or {}
        frame = tuple((a, degrees.get(a, 0)) for a in labels)
        return cls(Context(), frame, {}, dict(brackets), fibre_prefix)

    @classmethod
    def tangent(cls, base: Context, fibre_prefix: str = "d") -> "AlgebroidSpec":
        """TM with the coordinate frame d/dx^i (degree -|x^i|)."""
        frame = tuple((g.name, -g.degree) for g in base.generators)
        anchor = {(g.name, g.name): base.one() for g in base.generators}
        return cls(base, frame, anchor, {}, fibre_prefix)

    @classmethod
    def action(cls, lie: "AlgebroidSpec", base: Context,
               vector_fields: Mapping[str, Union[Derivation, Mapping[str, Coeff]]],
               fibre_prefix: Optional[str] = None) -> "AlgebroidSpec":
        """Action algebroid base x g for an action v -> rho(v) by vector fields."""
        if lie.base.generators:
            raise SpecError("the acting Lie algebra must have a point base")
        unknown = sorted(set(vector_fields) - set(lie.labels))
        if unknown:
            raise SpecError(f"vector field given for undeclared label {unknown[0]!r}")
        anchor = {}
        for a in lie.labels:
            vf = vector_fields.get(a)
            if vf is None:
                continue
            if isinstance(vf, Derivation):
                items = {base.generators[i].name: img for i, img in vf.images.items()}
            else:
                items = vf
            for x, v in items.items():
                anchor[(a, x)] = _base_coeff(base, v)
        brackets = {k: base.const(v.constant_value()) for k, v in lie.brackets.items()}
        spec = cls(base, lie.frame, anchor, brackets, fibre_prefix or lie.fibre_prefix)
        return spec

    def vector_field(self, a: str) -> Derivation:
        """rho(X_a) as a derivation of the base."""
        imgs = {x: v for (b, x), v in self.anchor.items() if b == a}
        return Derivation(self.base, self.p(a), imgs)


@dataclass(frozen=True)
class AlgebroidChart:
    """A context split into base generators and fibre coordinates dual to a frame."""

    ctx: Context
    base: Tuple[str, ...]
    fibre: Tuple[str, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(self.fibre))
        if len(self.labels) != len(self.fibre):
            raise SpecError("one label per fibre coordinate is required")

    @property
    def base_idx(self) -> frozenset:
        return frozenset(self.ctx.index(n) for n in self.base)

    @property
    def fibre_idx(self) -> Tuple[int, ...]:
        return tuple(self.ctx.index(n) for n in self.fibre)

    def p(self, a: int) -> int:
        """Degree of the frame section dual to the a-th fibre coordinate."""
        return 1 - self.ctx[self.fibre[a]].degree

    def label_index(self, label: str) -> int:
        return self.labels.index(label)

    def fibre_order(self, e: Element) -> Optional[int]:
        """Common total exponent of fibre coordinates in e, or None."""
        fib = set(self.fibre_idx)
        orders = {sum(k for i, k in m if i in fib) for m in e.terms}
        return orders.pop() if len(orders) == 1 else None

    def is_base_function(self, e: Element) -> bool:
        base = self.base_idx
        return all(i in base for m in e.terms for i, _ in m)

    def frame_section(self, label) -> "Section":
        a = label if isinstance(label, int) else self.label_index(label)
        coeffs = [self.ctx.zero()] * len(self.fibre)
        coeffs[a] = self.ctx.one()
        return Section(self, tuple(coeffs))

    def frame_sections(self) -> List["Section"]:
        return [self.frame_section(a) for a in range(len(self.fibre))]

    def section(self, coeffs: Mapping[str, Coeff]) -> "Section":
        vals = [self.ctx.zero()] * len(self.fibre)
        for label, v in coeffs.items():
            vals[self.label_index(label)] = self.ctx.parse(v) if isinstance(v, str) else (
                v if isinstance(v, Element) else self.ctx.const(v))
        return Section(self, tuple(vals))

    def zero_section(self, degree: int = 0) -> "Section":
        return Section(self, tuple(self.ctx.zero() for _ in self.fibre), degree)


class Section:
    """X = f^a X_a with coefficients functions on the base."""

    __slots__ = ("chart", "coeffs", "degree")

    def __init__(self, chart: AlgebroidChart, coeffs: Sequence[Element], degree: Optional[int] = None):
        self.chart = chart
        self.coeffs = tuple(coeffs)
        if len(self.coeffs) != len(chart.fibre):
            raise SpecError("wrong number of section coefficients")
        degs = set()
        for a, f in enumerate(self.coeffs):
            if f.is_zero():
                continue
            if not chart.is_base_function(f):
                raise SpecError("section coefficients must be base functions")
            d = f.degree()
            if d is None:
                raise DegreeError("section coefficients must be homogeneous")
            degs.add(d + chart.p(a))
        if len(degs) > 1:
            raise DegreeError(f"inhomogeneous section (degrees {sorted(degs)})")
        if degs:
            found = degs.pop()
            if degree is not None and degree != found:
                raise DegreeError(f"section has degree {found}, not {degree}")
            degree = found
        self.degree = 0 if degree is None else degree

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.coeffs)

    def __add__(self, other: "Section") -> "Section":
        deg = other.degree if self.is_zero() else self.degree
        return Section(self.chart, [a + b for a, b in zip(self.coeffs, other.coeffs)], deg)

    def __neg__(self):
        return Section(self.chart, [-a for a in self.coeffs], self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, f):
        if isinstance(f, Element):
            d = f.degree()
            return Section(self.chart, [f * a for a in self.coeffs],
                           None if d is None else self.degree + d)
        return Section(self.chart, [a.scale(f) for a in self.coeffs], self.degree)

    def scale(self, c):
        return Section(self.chart, [a.scale(c) for a in self.coeffs], self.degree)

    def __eq__(self, other):
        if not isinstance(other, Section):
            return NotImplemented
        return self.chart == other.chart and self.coeffs == other.coeffs and (
            self.is_zero() or self.degree == other.degree)

    __hash__ = None

    def __repr__(self):
        parts = [f"({f})*{lab}" for f, lab in zip(self.coeffs, self.chart.labels) if f]
        return "Section(" + (" + ".join(parts) or "0") + ")"


# ---------------------------------------------------------------------------
# the algebroid differential


def build_differential(spec: AlgebroidSpec, chart: Optional[AlgebroidChart] = None) -> Derivation:
    """d_A = lam^a rho_a^i d/dx^i - (-1)^{p_a(p_b-1)} 1/2 lam^a lam^b c_ab^c d/dlam^c."""
    chart = chart or spec.chart()
    ctx = chart.ctx
    base = spec.base
    lam = {a: ctx.gen(spec.fibre_name(a)) for a in spec.labels}
    imgs: Dict[str, Element] = {}
    for (a, x), r in spec.anchor.items():
        term = lam[a] * base.embed(r, ctx)
        imgs[x] = imgs[x] + term if x in imgs else term
    half = Fraction(1, 2)
    for (a, b, c), v in spec.brackets.items():
        pa, pb = spec.p(a), spec.p(b)
        sign = -1 if (pa * (pb - 1)) % 2 else 1
        term = (lam[a] * lam[b] * base.embed(v, ctx)).scale(-sign * half)
        key = spec.fibre_name(c)
        imgs[key] = imgs[key] + term if key in imgs else term
    return Derivation(ctx, 1, imgs)


def contraction(X: Section) -> Derivation:
    """iota_X: zero on the base, lam^a -> f^a; degree |X| - 1."""
    chart = X.chart
    imgs = {name: f for name, f in zip(chart.fibre, X.coeffs) if f}
    return Derivation(chart.ctx, X.degree - 1, imgs)


def lie_derivative(X: Section, d: Derivation) -> Derivation:
    """L_X = [iota_X, d]."""
    return commutator(contraction(X), d)


def section_from_contraction(chart: AlgebroidChart, D: Derivation) -> Section:
    """The section X with iota_X = D; raises if D is not a contraction."""
    for i in chart.base_idx:
        if D.images.get(i):
            raise ConsistencyError(
                f"operator is not a contraction: nonzero on base generator {chart.ctx.generators[i].name}")
    coeffs = []
    for name in chart.fibre:
        f = D.image(name)
        if f and not chart.is_base_function(f):
            raise ConsistencyError(f"operator is not a contraction: image of {name} is {f}")
        coeffs.append(f)
    return Section(chart, coeffs, D.degree + 1)


def anchor_of(X: Section, d: Derivation) -> Derivation:
    """rho(X) = [iota_X, d] restricted to base functions."""
    L = lie_derivative(X, d)
    names = set(X.chart.base)
    imgs = {g.name: L.image(g.index) for g in X.chart.ctx.generators if g.name in names}
    return Derivation(X.chart.ctx, X.degree, imgs, check=False)


def bracket_of_sections(X: Section, Y: Section, d: Derivation) -> Section:
    """[X, Y] through iota_[X,Y] = [[iota_X, d], iota_Y]."""
    op = commutator(lie_derivative(X, d), contraction(Y))
    return section_from_contraction(X.chart, op)


@dataclass
class RecoveredAlgebroid:
    chart: AlgebroidChart
    d: Derivation
    anchor_table: Dict[Tuple[str, str], Element]
    structure_table: Dict[Tuple[str, str, str], Element]

    def anchor(self, X: Section) -> Derivation:
        return anchor_of(X, self.d)

    def bracket(self, X: Section, Y: Section) -> Section:
        return bracket_of_sections(X, Y, self.d)

    def to_spec(self, base: Context, fibre_prefix: str = "θ") -> AlgebroidSpec:
        """Re-express the recovered data over ``base`` (matched by name)."""
        ctx = self.chart.ctx
        frame = tuple((lab, self.chart.p(a)) for a, lab in enumerate(self.chart.labels))
        sub = Context([(g.name, g.degree) for g in ctx.generators if g.name in set(self.chart.base)])
        anchor = {k: _restrict(v, sub, base) for k, v in self.anchor_table.items()}
        brackets = {k: _restrict(v, sub, base) for k, v in self.structure_table.items()}
        return AlgebroidSpec(base, frame, anchor, brackets, fibre_prefix)


def _restrict(e: Element, sub: Context, base: Context) -> Element:
    # e only involves base generators; rebuild it over ``base`` by name
    out = base.zero()
    for mono, c in e.terms.items():
        term = base.const(c)
        for i, k in mono:
            term = term * base.gen(e.ctx.generators[i].name) ** k
        out = out + term
    return out


def check_anti_algebroid_shape(chart: AlgebroidChart, d: Derivation) -> None:
    if d.degree != 1:
        raise ShapeError("the differential must have degree 1")
    for name in chart.base:
        img = d.image(name)
        if img and chart.fibre_order(img) != 1:
            raise ShapeError(f"d({name}) is not linear in the fibre coordinates")
    for name in chart.fibre:
        img = d.image(name)
        if img and chart.fibre_order(img) != 2:
            raise ShapeError(f"d({name}) is not quadratic in the fibre coordinates")


def anchor_and_bracket_from_differential(chart: AlgebroidChart, d: Derivation) -> RecoveredAlgebroid:
    """Read the anchor and structure functions off a degree-1 differential."""
    check_anti_algebroid_shape(chart, d)
    frames = chart.frame_sections()
    anchor_table = {}
    structure_table = {}
    lies = [lie_derivative(X, d) for X in frames]
    iotas = [contraction(X) for X in frames]
    for a, lab in enumerate(chart.labels):
        for x in chart.base:
            v = lies[a].image(x)
            if v:
                anchor_table[(lab, x)] = v
        for b, lab2 in enumerate(chart.labels):
            sec = section_from_contraction(chart, commutator(lies[a], iotas[b]))
            for c, lab3 in enumerate(chart.labels):
                if sec.coeffs[c]:
                    structure_table[(lab, lab2, lab3)] = sec.coeffs[c]
    return RecoveredAlgebroid(chart, d, anchor_table, structure_table)


# ---------------------------------------------------------------------------
# Cartan calculus checks


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    witnesses: int
    failure: Optional[str] = None


@dataclass
class CartanReport:
    checks: List[IdentityCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Optional[IdentityCheck]:
        return next((c for c in self.checks if not c.passed), None)


def random_section(chart: AlgebroidChart, degree: int, rng: random.Random,
                   max_exponent: int = 2, max_terms: int = 3) -> Section:
    """A random polynomial section of the given degree (zero if none exists)."""
    from .cohomology import enumerate_basis  # local import: cohomology depends on core only

    base_ctx = Context([(n, chart.ctx[n].degree) for n in chart.base],
                       {tuple(chart.base): max_exponent} if chart.base else None)
    coeffs = []
    for a in range(len(chart.fibre)):
        want = degree - chart.p(a)
        try:
            monos = enumerate_basis(base_ctx, want)
        except AlgebraError:
            monos = []
        f = chart.ctx.zero()
        if monos:
            for mono in rng.sample(monos, min(len(monos), rng.randint(0, max_terms))):
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                term = chart.ctx.const(c)
                for i, k in mono:
                    term = term * chart.ctx.gen(base_ctx.generators[i].name) ** k
                f = f + term
        coeffs.append(f)
    return Section(chart, coeffs, degree)


def frame_bracket(spec: AlgebroidSpec, chart: AlgebroidChart, a: str, b: str) -> Section:
    """[X_a, X_b] = c_ab^c X_c read from the structure constants."""
    coeffs = [spec.base.embed(spec.structure(a, b, c), chart.ctx) for c in spec.labels]
    return Section(chart, coeffs, spec.p(a) + spec.p(b))


def check_cartan_relations(spec: AlgebroidSpec, random_sections: int = 2, seed: int = 0,
                           chart: Optional[AlgebroidChart] = None) -> CartanReport:
    """Verify the five Cartan commutation relations on all generators."""
    chart = chart or spec.chart()
    d = build_differential(spec, chart)
    rng = random.Random(seed)
    frames = [(lab, chart.frame_section(lab)) for lab in spec.labels]
    extra = []
    degrees = sorted({p for _, p in spec.frame}) or [0]
    for k in range(random_sections):
        X = random_section(chart, rng.choice(degrees), rng)
        if not X.is_zero():
            extra.append((None, X))
    sections = frames + extra
    checks = []

    w = square_witness(d)
    checks.append(IdentityCheck("[d,d] = 0", w is None, len(chart.ctx),
                                None if w is None else f"d^2({w[0]}) = {w[1]}"))

    def bracket(X, Y, la, lb):
        if la is not None and lb is not None:
            return frame_bracket(spec, chart, la, lb)
        return bracket_of_sections(X, Y, d)

    def run(name, fn):
        count = 0
        for la, X in sections:
            for lb, Y in sections:
                lhs, rhs = fn(X, Y, la, lb)
                count += len(chart.ctx)
                if lhs != rhs:
                    diff = lhs - rhs
                    g = min(diff.images)
                    checks.append(IdentityCheck(name, False, count,
                                                f"on {chart.ctx.generators[g].name}: {diff.images[g]}"))
                    return
        checks.append(IdentityCheck(name, True, count))

    run("[i_X,i_Y] = 0", lambda X, Y, la, lb: (commutator(contraction(X), contraction(Y)),
                                                zero_derivation(chart.ctx)))
    run("[L_X,i_Y] = i_[X,Y]", lambda X, Y, la, lb: (commutator(lie_derivative(X, d), contraction(Y)),
                                                     contraction(bracket(X, Y, la, lb))))
    run("[L_X,L_Y] = L_[X,Y]", lambda X, Y, la, lb: (commutator(lie_derivative(X, d), lie_derivative(Y, d)),
                                                     lie_derivative(bracket(X, Y, la, lb), d)))
    count = 0
    ok = True
    failure = None
    for _, X in sections:
        v = commutator(d, lie_derivative(X, d))
        count += len(chart.ctx)
        if not v.is_zero():
            ok = False
            g = min(v.images)
            failure = f"on {chart.ctx.generators[g].name}: {v.images[g]}"
            break
    checks.append(IdentityCheck("[d,L_X] = 0", ok, count, failure))
    return CartanReport(checks)


def jacobiator_witness(spec: AlgebroidSpec) -> Optional[str]:
    """Brute-force check of Jacobi and the anchor identity for constant-coefficient frames.

    Independent of the differential: brackets of frame sections are expanded by
    the Leibniz rule with anchors acting on structure functions.
    """
    labels = spec.labels
    base = spec.base
    rho = {a: spec.vector_field(a) for a in labels}

    def br(a, b):  # [X_a, X_b] as {c: coefficient}
        return {c: spec.structure(a, b, c) for c in labels if spec.structure(a, b, c)}

    def br_with_sum(a, Y):
        # [X_a, f^c X_c] = rho(X_a)(f^c) X_c + (-1)^{p_a |f^c|} f^c [X_a, X_c]
        out: Dict[str, Element] = {}
        for c, f in Y.items():
            df = apply(rho[a], f)
            if df:
                out[c] = out.get(c, base.zero()) + df
            sign = -1 if (spec.p(a) * (f.degree() or 0)) % 2 else 1
            for e, g in br(a, c).items():
                out[e] = out.get(e, base.zero()) + (f * g).scale(sign)
        return {k: v for k, v in out.items() if v}

    def bracket_left_sum(Y, b):
        # [f^c X_c, X_b] via graded antisymmetry
        deg = None
        for c, f in Y.items():
            deg = (f.degree() or 0) + spec.p(c)
            break
        if deg is None:
            return {}
        sign = -1 if (spec.p(b) * deg) % 2 else 1
        inner = br_with_sum(b, Y)
        return {k: v.scale(-sign) for k, v in inner.items()}

    for a in labels:
        for b in labels:
            for c in labels:
                pa, pb, pc = spec.p(a), spec.p(b), spec.p(c)
                # [X_a,[X_b,X_c]] = [[X_a,X_b],X_c] + (-1)^{pa pb} [X_b,[X_a,X_c]]
                lhs = br_with_sum(a, br(b, c))
                r1 = bracket_left_sum(br(a, b), c)
                r2 = br_with_sum(b, br(a, c))
                s = -1 if (pa * pb) % 2 else 1
                keys = set(lhs) | set(r1) | set(r2)
                for k in keys:
                    val = lhs.get(k, base.zero()) - r1.get(k, base.zero()) - r2.get(k, base.zero()).scale(s)
                    if val:
                        return f"Jacobi fails on ({a},{b},{c}) in component {k}: {val}"
        for b in labels:
            # rho([X_a,X_b]) = [rho(X_a), rho(X_b)]
            lhs = zero_derivation(base, spec.p(a) + spec.p(b))
            for c, f in br(a, b).items():
                lhs = lhs + f * rho[c]
            rhs = commutator(rho[a], rho[b])
            if lhs != rhs:
                return f"anchor identity fails on ({a},{b})"
    return None


# ---------------------------------------------------------------------------
# morphic vector fields


def check_linear(chart: AlgebroidChart, Xi: Derivation) -> None:
    for name in chart.base:
        img = Xi.image(name)
        if img and chart.fibre_order(img) != 0:
            raise LinearityError(f"image of base coordinate {name} is not a base function")
    for name in chart.fibre:
        img = Xi.image(name)
        if img and chart.fibre_order(img) != 1:
            raise LinearityError(f"image of fibre coordinate {name} is not fibrewise linear")


def is_morphic(chart: AlgebroidChart, Xi1: Derivation, d_A: Derivation) -> bool:
    """[d_A, Xi_1] = 0 for a linear vector field Xi_1."""
    check_linear(chart, Xi1)
    return commutator(d_A, Xi1).is_zero()


def d_xi(Xi1: Derivation, X: Section) -> Section:
    """D_Xi X defined by iota_{D_Xi X} = [Xi_1, iota_X]."""
    return section_from_contraction(X.chart, commutator(Xi1, contraction(X)))


def base_vector_field(chart: AlgebroidChart, Xi1: Derivation) -> Derivation:
    check_linear(chart, Xi1)
    keep = {chart.ctx.index(n) for n in chart.base}
    return Derivation(chart.ctx, Xi1.degree, {i: v for i, v in Xi1.images.items() if i in keep},
                      check=False)


def morphic_from_operator(chart: AlgebroidChart, d_A: Derivation, D: Callable[[Section], Section],
                          phi: Derivation, degree: Optional[int] = None) -> Derivation:
    """Build the morphic vector field Xi_1 with D_Xi = D and base field phi.

    D must satisfy D(fX) = phi(f) X + (-1)^{|f||D|} f D(X) and be a derivation
    of the bracket; both hypotheses are checked on base generators and frame
    sections.
    """
    ctx = chart.ctx
    deg = phi.degree if degree is None else degree
    frames = chart.frame_sections()
    images_of_frames = [D(X) for X in frames]
    for X, DX in zip(frames, images_of_frames):
        if not DX.is_zero() and DX.degree != X.degree + deg:
            raise HypothesisError(f"D does not have degree {deg}", (None, X))
    # Leibniz over the base
    for name in chart.base:
        f = ctx.gen(name)
        for X, DX in zip(frames, images_of_frames):
            lhs = D(f * X)
            sign = -1 if (ctx[name].degree * deg) % 2 else 1
            rhs = apply(phi, f) * X + (f * DX).scale(sign)
            if lhs != rhs:
                raise HypothesisError(f"D violates the Leibniz rule on ({name}, {X})", (name, X))
    # derivation of the bracket
    for X, DX in zip(frames, images_of_frames):
        for Y, DY in zip(frames, images_of_frames):
            lhs = D(bracket_of_sections(X, Y, d_A))
            sign = -1 if (deg * X.degree) % 2 else 1
            rhs = bracket_of_sections(DX, Y, d_A) + bracket_of_sections(X, DY, d_A).scale(sign)
            if lhs != rhs:
                raise HypothesisError(f"D is not a derivation of the bracket on ({X}, {Y})", (X, Y))
    imgs: Dict[str, Element] = {}
    for name in chart.base:
        v = phi.image(name)
        if v:
            imgs[name] = v
    for c, name in enumerate(chart.fibre):
        # iota_{X_b} Xi_1(lam^c) = -(-1)^{|D|(p_b - 1)} (D X_b)^c
        v = ctx.zero()
        for b, lam_b in enumerate(chart.fibre):
            coeff = images_of_frames[b].coeffs[c]
            if coeff:
                sign = -1 if (deg * (chart.p(b) - 1)) % 2 else 1
                v = v + (ctx.gen(lam_b) * coeff).scale(-sign)
        if v:
            imgs[name] = v
    Xi1 = Derivation(ctx, deg, imgs)
    if not is_morphic(chart, Xi1, d_A):
        raise ConsistencyError("constructed vector field is not morphic")
    for X, DX in zip(frames, images_of_frames):
        if d_xi(Xi1, X) != DX:
            raise ConsistencyError("constructed vector field does not reproduce D")
    return Xi1
