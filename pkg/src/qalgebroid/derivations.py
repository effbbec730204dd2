"""Graded derivations, their supercommutator, and nilpotent exponentials.

A derivation is stored by its images on generators and extended to the whole
algebra by the graded Leibniz rule

    D(ab) = D(a) b + (-1)^{|D||a|} a D(b).

Two derivations are equal exactly when all generator images agree.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .core import (AlgebraError, Context, ContextMismatch, Element, Monomial, ScalarLike,
                   _check_same, as_scalar)


class DegreeError(AlgebraError):
    pass


class NonNilpotentError(AlgebraError):
    pass


class Derivation:
    """A homogeneous derivation of degree ``degree`` on ``ctx``."""

    __slots__ = ("ctx", "degree", "images", "_cache")

    def __init__(self, ctx: Context, degree: int, images: Optional[Mapping] = None,
                 check: bool = True):
        self.ctx = ctx
        self.degree = int(degree)
        imgs: Dict[int, Element] = {}
        for key, img in (images or {}).items():
            i = ctx.index(key)
            if not isinstance(img, Element):
                img = ctx.const(img)
            else:
                _check_same(ctx, img.ctx)
            if img.is_zero():
                continue
            if check:
                want = ctx.generators[i].degree + self.degree
                d = img.degree()
                if d != want:
                    raise DegreeError(
                        f"image of {ctx.generators[i].name} has degree {d}, expected {want}")
            imgs[i] = img
        self.images = imgs
        self._cache: Dict[Monomial, Element] = {}

    # -- evaluation -------------------------------------------------------
    def image(self, g) -> Element:
        return self.images.get(self.ctx.index(g)) or self.ctx.zero()

    def __call__(self, e: Element) -> Element:
        return apply(self, e)

    def _on_monomial(self, mono: Monomial) -> Element:
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        ctx = self.ctx
        out = ctx.zero()
        odd_d = self.degree % 2
        prefix_deg = 0
        for t, (i, k) in enumerate(mono):
            img = self.images.get(i)
            if img is not None:
                pre = ctx.monomial(mono[:t])
                post = ctx.monomial(mono[t + 1:])
                if k > 1:
                    # even generator: D(g^k) = k g^(k-1) D(g), and g^(k-1) commutes
                    term = (pre * ctx.monomial(((i, k - 1),)) * img * post).scale(k)
                else:
                    term = pre * img * post
                if odd_d and prefix_deg % 2:
                    term = -term
                out = out + term
            prefix_deg += ctx.generators[i].degree * k
        self._cache[mono] = out
        return out

    # -- linear structure -------------------------------------------------
    def _coerce(self, other: "Derivation"):
        if not isinstance(other, Derivation):
            raise TypeError("expected a Derivation")
        _check_same(self.ctx, other.ctx)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeError(f"cannot add derivations of degree {self.degree} and {other.degree}")

    def __add__(self, other: "Derivation") -> "Derivation":
        self._coerce(other)
        deg = other.degree if self.is_zero() else self.degree
        imgs = dict(self.images)
        for i, v in other.images.items():
            imgs[i] = imgs[i] + v if i in imgs else v
        return Derivation(self.ctx, deg, imgs, check=False)

    def __neg__(self):
        return Derivation(self.ctx, self.degree, {i: -v for i, v in self.images.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: ScalarLike) -> "Derivation":
        c = as_scalar(c)
        return Derivation(self.ctx, self.degree, {i: v.scale(c) for i, v in self.images.items()},
                          check=False)

    def __rmul__(self, other):
        """``f * D`` is the derivation ``g -> f D(g)``; ``c * D`` scales."""
        if isinstance(other, Element):
            _check_same(self.ctx, other.ctx)
            d = other.degree()
            if d is None:
                if other.is_zero():
                    return zero_derivation(self.ctx, self.degree)
                raise DegreeError("coefficient must be homogeneous")
            return Derivation(self.ctx, self.degree + d,
                              {i: other * v for i, v in self.images.items()}, check=False)
        return self.scale(other)

    def __mul__(self, c):
        if isinstance(c, Element):
            raise TypeError("multiply derivations by functions on the left")
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.images == other.images

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.images

    def __repr__(self):
        return f"Derivation(degree={self.degree}, {self})"

    def __str__(self):
        if not self.images:
            return "0"
        return "; ".join(f"{self.ctx.generators[i].name} -> {v}" for i, v in sorted(self.images.items()))


def zero_derivation(ctx: Context, degree: int = 0) -> Derivation:
    return Derivation(ctx, degree, {})


def partial(ctx: Context, g) -> Derivation:
    """The coordinate derivative with respect to generator ``g``."""
    i = ctx.index(g)
    return Derivation(ctx, -ctx.generators[i].degree, {i: ctx.one()})


def euler(ctx: Context, weights: Optional[Mapping] = None) -> Derivation:
    """Degree-0 derivation g -> w_g g; weights default to generator degrees."""
    imgs = {}
    for g in ctx.generators:
        w = g.degree if weights is None else weights.get(g.name, 0)
        if w:
            imgs[g.index] = ctx.gen(g.index).scale(w)
    return Derivation(ctx, 0, imgs)


def from_images(ctx: Context, degree: int, images: Mapping[str, Union[str, Element, int]]) -> Derivation:
    """Build a derivation from image strings, e.g. ``{"θ1": "dθ1"}``."""
    parsed = {k: ctx.parse(v) if isinstance(v, str) else v for k, v in images.items()}
    return Derivation(ctx, degree, parsed)


def apply(D: Derivation, e: Element) -> Element:
    _check_same(D.ctx, e.ctx)
    out = D.ctx.zero()
    for mono, c in e.terms.items():
        if mono:
            out = out + D._on_monomial(mono).scale(c)
    if e.truncated:
        out.truncated = True
    return out


def commutator(D1: Derivation, D2: Derivation) -> Derivation:
    """Supercommutator D1 D2 - (-1)^{|D1||D2|} D2 D1."""
    _check_same(D1.ctx, D2.ctx)
    ctx = D1.ctx
    sign = -1 if (D1.degree * D2.degree) % 2 else 1
    imgs = {}
    for g in ctx.generators:
        a = D1.images.get(g.index)
        b = D2.images.get(g.index)
        v = ctx.zero()
        if b is not None:
            v = v + apply(D1, b)
        if a is not None:
            v = v - apply(D2, a).scale(sign)
        if v:
            imgs[g.index] = v
    return Derivation(ctx, D1.degree + D2.degree, imgs, check=False)


def square_witness(D: Derivation) -> Optional[Tuple[str, Element]]:
    """First generator on which D∘D is nonzero, or None."""
    for g in D.ctx.generators:
        img = D.images.get(g.index)
        if img is None:
            continue
        v = apply(D, img)
        if v:
            return g.name, v
    return None


def is_homological(D: Derivation) -> bool:
    if D.degree % 2 == 0:
        raise DegreeError("homological vector fields have odd degree")
    return square_witness(D) is None


def conjugation_series(N: Derivation, D: Derivation, bound: Optional[int] = None) -> List[Derivation]:
    """The nonzero iterated brackets [D, ad_N D, ad_N^2 D, ...] up to vanishing."""
    if N.degree != 0 and not N.is_zero():
        raise DegreeError("the exponentiated derivation must have degree 0")
    if bound is None:
        bound = len(N.ctx) + 2
    terms = [D]
    cur = D
    while True:
        cur = commutator(N, cur)
        if cur.is_zero():
            return terms
        if len(terms) > bound:
            raise NonNilpotentError(f"ad_N is not nilpotent within {bound} steps")
        terms.append(cur)


def exp_conjugate(N: Derivation, D: Derivation, bound: Optional[int] = None) -> Derivation:
    """Ad_{exp N} D = sum_k ad_N^k(D) / k! for a degree-0 nilpotent N."""
    out = zero_derivation(D.ctx, D.degree)
    fact = 1
    for k, t in enumerate(conjugation_series(N, D, bound)):
        if k:
            fact *= k
        out = out + t.scale(Fraction(1, fact))
    return out


def exp_apply(N: Derivation, e: Element, bound: Optional[int] = None) -> Element:
    """exp(N) e = sum_k N^k(e) / k!."""
    _check_same(N.ctx, e.ctx)
    if N.degree != 0 and not N.is_zero():
        raise DegreeError("the exponentiated derivation must have degree 0")
    if bound is None:
        bound = len(N.ctx) + 2
    out = e
    cur = e
    fact = 1
    for k in range(1, bound + 2):
        cur = apply(N, cur)
        if cur.is_zero():
            return out
        fact *= k
        out = out + cur.scale(Fraction(1, fact))
    raise NonNilpotentError(f"N is not nilpotent on the element within {bound} steps")


def embed_derivation(D: Derivation, target: Context) -> Derivation:
    """Extend D to a larger context by name, acting as zero on new generators."""
    imgs = {}
    for i, v in D.images.items():
        imgs[target.index(D.ctx.generators[i].name)] = D.ctx.embed(v, target)
    return Derivation(target, D.degree, imgs)


def restrict_images(D: Derivation, names) -> Derivation:
    """Keep only the images on the named generators (others become zero)."""
    keep = {D.ctx.index(n) for n in names}
    return Derivation(D.ctx, D.degree, {i: v for i, v in D.images.items() if i in keep}, check=False)


__all__ = [
    "Derivation", "DegreeError", "NonNilpotentError", "ContextMismatch", "apply", "commutator",
    "conjugation_series", "embed_derivation", "euler", "exp_apply", "exp_conjugate", "from_images",
    "is_homological", "partial", "restrict_images", "square_witness", "zero_derivation",
]
