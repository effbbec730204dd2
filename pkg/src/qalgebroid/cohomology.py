"""Finite slices of graded complexes and their exact cohomology.

A slice is the span of all monomials of a given total degree, or of a given
bidegree ``(p, q)``.  Even generators whose grading does not bound their
exponents must be covered by the context's truncation; a slice is called
*complete* when the truncation removed nothing from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import linalg
from .core import AlgebraError, Context, Element, Monomial
from .derivations import Derivation, apply, is_homological

Selector = Union[int, Tuple[int, int]]


class TruncationRequired(AlgebraError):
    pass


class NotHomological(AlgebraError):
    pass


class ClosureError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# enumeration


def _constraints(ctx: Context, selector: Selector):
    if isinstance(selector, tuple):
        p, q = selector
        return [([g.p_weight for g in ctx.generators], p), ([g.q_weight for g in ctx.generators], q)]
    return [([g.degree for g in ctx.generators], int(selector))]


def _caps(ctx: Context) -> List[Optional[int]]:
    caps: List[Optional[int]] = []
    for g in ctx.generators:
        if g.odd:
            caps.append(1)
            continue
        bounds = [b for group, b in ctx.truncation if g.index in group]
        caps.append(min(bounds) if bounds else None)
    return caps


def _enumerate(ctx: Context, selector: Selector, caps: List[Optional[int]],
               apply_groups: bool = True) -> List[Monomial]:
    cons = _constraints(ctx, selector)
    n = len(ctx.generators)
    # which constraints bound each uncapped generator from one side
    for i, cap in enumerate(caps):
        if cap is not None:
            continue
        ok = False
        for w, _ in cons:
            if w[i] == 0:
                continue
            s = 1 if w[i] > 0 else -1
            if all(caps[j] is not None or w[j] * s >= 0 for j in range(n)):
                ok = True
                break
        if not ok:
            raise TruncationRequired(
                f"generator {ctx.generators[i].name} has unbounded exponent in this slice; "
                "add it to the truncation")
    # suffix ranges per constraint
    suf = []
    for w, _ in cons:
        lo = [0.0] * (n + 1)
        hi = [0.0] * (n + 1)
        for i in range(n - 1, -1, -1):
            if caps[i] is None:
                lo[i] = lo[i + 1] + (-inf if w[i] < 0 else 0)
                hi[i] = hi[i + 1] + (inf if w[i] > 0 else 0)
            else:
                lo[i] = lo[i + 1] + min(0, w[i] * caps[i])
                hi[i] = hi[i + 1] + max(0, w[i] * caps[i])
        suf.append((lo, hi))
    out: List[Monomial] = []
    exps = [0] * n
    groups = [(sorted(g), b) for g, b in ctx.truncation] if apply_groups else []

    def feasible(i, res):
        return all(suf[c][0][i] <= res[c] <= suf[c][1][i] for c in range(len(cons)))

    def rec(i, res):
        if i == n:
            if all(r == 0 for r in res):
                out.append(tuple((j, k) for j, k in enumerate(exps) if k))
            return
        if not feasible(i, res):
            return
        k = 0
        while caps[i] is None or k <= caps[i]:
            exps[i] = k
            if groups and k and _over(groups, exps):
                break
            r = [res[c] - k * cons[c][0][i] for c in range(len(cons))]
            if feasible(i + 1, r):
                exps[i] = k
                rec(i + 1, r)
            elif caps[i] is None and any(
                    (cons[c][0][i] > 0 and r[c] < suf[c][0][i + 1]) or
                    (cons[c][0][i] < 0 and r[c] > suf[c][1][i + 1]) for c in range(len(cons))):
                break
            k += 1
        exps[i] = 0

    rec(0, [t for _, t in cons])
    out.sort(key=_grlex)
    return out


def _over(groups, exps) -> bool:
    return any(sum(exps[i] for i in g) > b for g, b in groups)


def _grlex(mono: Monomial):
    return (sum(k for _, k in mono), tuple((i, -k) for i, k in mono))


def enumerate_basis(ctx: Context, selector: Selector, truncation=None) -> List[Monomial]:
    """All monomials of the given degree or bidegree, in graded-lex order."""
    if truncation is not None:
        ctx = ctx.with_truncation(truncation)
    return _enumerate(ctx, selector, _caps(ctx))


def slice_is_complete(ctx: Context, selector: Selector, basis: Sequence[Monomial]) -> bool:
    """True when dropping the truncation would not enlarge the slice."""
    if not ctx.truncation:
        return True
    free = [1 if g.odd else None for g in ctx.generators]
    try:
        full = _enumerate(ctx, selector, free, apply_groups=False)
    except TruncationRequired:
        return False
    return len(full) == len(basis)


@dataclass
class ComplexSlice:
    ctx: Context
    selector: Selector
    basis: List[Monomial]
    complete: bool
    index: Dict[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {m: i for i, m in enumerate(self.basis)}

    def __len__(self):
        return len(self.basis)

    def element(self, vector: Sequence[Fraction]) -> Element:
        return Element(self.ctx, {m: Fraction(c) for m, c in zip(self.basis, vector) if c})

    def coordinates(self, e: Element) -> List[Fraction]:
        v = [Fraction(0)] * len(self.basis)
        for m, c in e.terms.items():
            j = self.index.get(m)
            if j is None:
                raise AlgebraError(f"monomial {self.ctx.mono_str(m)} is not in this slice")
            v[j] = c
        return v


def make_slice(ctx: Context, selector: Selector, truncation=None) -> ComplexSlice:
    if truncation is not None:
        ctx = ctx.with_truncation(truncation)
    basis = enumerate_basis(ctx, selector)
    return ComplexSlice(ctx, selector, basis, slice_is_complete(ctx, selector, basis))


def shift(selector: Selector, degree: int, bidegree: Optional[Tuple[int, int]] = None) -> Selector:
    if isinstance(selector, tuple):
        if bidegree is None:
            raise AlgebraError("a bidegree shift is required for bigraded slices")
        return (selector[0] + bidegree[0], selector[1] + bidegree[1])
    return selector + degree


@dataclass
class SliceMatrix:
    rows: List[List[Fraction]]
    truncated: bool


def matrix_of(D: Derivation, source: ComplexSlice, target: ComplexSlice) -> SliceMatrix:
    """Column j holds the coordinates of D(basis_j) in the target basis."""
    rows = linalg.zeros(len(target), len(source))
    truncated = False
    for j, mono in enumerate(source.basis):
        img = apply(D, source.ctx.monomial(mono))
        truncated = truncated or img.truncated
        for m, c in img.terms.items():
            i = target.index.get(m)
            if i is None:
                raise AlgebraError(
                    f"D({source.ctx.mono_str(mono)}) leaves the target slice via {source.ctx.mono_str(m)}")
            rows[i][j] = c
    return SliceMatrix(rows, truncated)


# ---------------------------------------------------------------------------
# Betti numbers


@dataclass
class BettiTable:
    values: Dict[Selector, int]
    valid: Dict[Selector, bool]
    dims: Dict[Selector, int] = field(default_factory=dict)

    def __getitem__(self, k):
        return self.values[k]

    def as_list(self) -> List[int]:
        return [self.values[k] for k in sorted(self.values)]

    @property
    def all_valid(self) -> bool:
        return all(self.valid.values())

    def lines(self) -> List[str]:
        out = []
        for k in sorted(self.values):
            tag = "" if self.valid[k] else " (provisional: truncation)"
            label = f"{k[0]},{k[1]}" if isinstance(k, tuple) else str(k)
            out.append(f"H^{label} {self.values[k]}{tag}")
        return out


def _sel_range(degrees):
    return list(degrees)


def betti(D: Derivation, degrees: Iterable[Selector], truncation=None,
          bidegree: Optional[Tuple[int, int]] = None, check: bool = True) -> BettiTable:
    """Exact Betti numbers of a homological derivation on the listed slices."""
    if check and not is_homological(D):
        raise NotHomological("the derivation does not square to zero")
    ctx = D.ctx if truncation is None else D.ctx.with_truncation(truncation)
    if ctx != D.ctx:
        from .derivations import embed_derivation
        D = embed_derivation(D, ctx)
    cache: Dict[Selector, ComplexSlice] = {}

    def sl(k):
        if k not in cache:
            cache[k] = make_slice(ctx, k)
        return cache[k]

    values, valid, dims = {}, {}, {}
    for k in degrees:
        prev = shift(k, -D.degree, None if bidegree is None else (-bidegree[0], -bidegree[1]))
        nxt = shift(k, D.degree, bidegree)
        S, P, N = sl(k), sl(prev), sl(nxt)
        out = matrix_of(D, S, N)
        inc = matrix_of(D, P, S)
        b = len(S) - linalg.rank(out.rows) - linalg.rank(inc.rows)
        values[k] = b
        dims[k] = len(S)
        valid[k] = S.complete and P.complete and N.complete and not out.truncated and not inc.truncated
    return BettiTable(values, valid, dims)


def joint_kernel(operators: Sequence[Derivation], sl: ComplexSlice) -> List[List[Fraction]]:
    """Basis (coordinate vectors) of the common kernel of the operators on a slice."""
    ncols = len(sl)
    if ncols == 0:
        return []
    rows: List[List[Fraction]] = []
    for op in operators:
        images: Dict[Monomial, List[Fraction]] = {}
        for j, mono in enumerate(sl.basis):
            img = apply(op, sl.ctx.monomial(mono))
            for m, c in img.terms.items():
                images.setdefault(m, [Fraction(0)] * ncols)[j] = c
        rows.extend(images[m] for m in sorted(images))
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    return linalg.nullspace(rows, ncols)


def _restricted_matrix(D: Derivation, src: ComplexSlice, src_basis, tgt: ComplexSlice, tgt_basis):
    """Matrix of D from span(src_basis) to span(tgt_basis); raises if not closed."""
    M = matrix_of(D, src, tgt).rows
    images = linalg.transpose(linalg.matmul(M, linalg.transpose(src_basis))) if src_basis else []
    if not tgt_basis:
        for v in images:
            if any(v):
                raise ClosureError("the differential leaves the subcomplex", tgt.element(v))
        return [[] for _ in src_basis]
    # solve tgt_basis^T c = image for each image
    At = linalg.transpose(tgt_basis)
    cols = []
    for v in images:
        c = linalg.solve(At, v, len(tgt_basis))
        if c is None:
            raise ClosureError("the differential leaves the subcomplex", tgt.element(v))
        cols.append(c)
    return linalg.transpose(cols) if cols else []


def subcomplex_betti(operators: Sequence[Derivation], D: Derivation, degrees: Iterable[Selector],
                     truncation=None, check: bool = True) -> BettiTable:
    """Betti numbers of D restricted to the joint kernel of ``operators``."""
    if check and not is_homological(D):
        raise NotHomological("the derivation does not square to zero")
    ctx = D.ctx if truncation is None else D.ctx.with_truncation(truncation)
    if ctx != D.ctx:
        from .derivations import embed_derivation
        D = embed_derivation(D, ctx)
        operators = [embed_derivation(op, ctx) for op in operators]
    slices: Dict[Selector, Tuple[ComplexSlice, list]] = {}

    def sub(k):
        if k not in slices:
            S = make_slice(ctx, k)
            slices[k] = (S, joint_kernel(operators, S))
        return slices[k]

    values, valid, dims = {}, {}, {}
    for k in degrees:
        S, B = sub(k)
        P, BP = sub(k - D.degree)
        N, BN = sub(k + D.degree)
        out = _restricted_matrix(D, S, B, N, BN)
        inc = _restricted_matrix(D, P, BP, S, B)
        values[k] = len(B) - linalg.rank(out) - linalg.rank(inc)
        dims[k] = len(B)
        valid[k] = S.complete and P.complete and N.complete
    return BettiTable(values, valid, dims)


def basis_elements(sl: ComplexSlice, vectors) -> List[Element]:
    return [sl.element(v) for v in vectors]
