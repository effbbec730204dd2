"""Free graded-commutative superalgebras over the rationals.

A :class:`Context` is an ordered table of generators, each carrying an integer
degree and a bidegree ``(p, q)`` with ``p + q = degree``.  Its algebra is the
free graded-commutative algebra on those generators: odd generators
anticommute and square to zero, even generators commute.  Elements are sparse
maps from canonical monomials to :class:`fractions.Fraction` coefficients.

Monomials are tuples of ``(generator index, exponent)`` pairs sorted by index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

Monomial = Tuple[Tuple[int, int], ...]
ScalarLike = Union[int, Fraction, str]

ONE: Monomial = ()


class AlgebraError(Exception):
    """Base class for errors raised by the algebra engine."""


class ContextMismatch(AlgebraError):
    pass


def as_scalar(value: ScalarLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact scalar: {value!r}")


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    p_weight: int
    q_weight: int
    index: int

    def __post_init__(self):
        if self.p_weight + self.q_weight != self.degree:
            raise AlgebraError(
                f"bidegree ({self.p_weight},{self.q_weight}) of {self.name} does not sum to {self.degree}")
        if self.p_weight < 0:
            raise AlgebraError(f"negative p-weight for {self.name}")

    @property
    def parity(self) -> int:
        return self.degree % 2

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


GeneratorSpec = Union[Generator, Tuple[str, int], Tuple[str, int, Tuple[int, int]]]


class Context:
    """An ordered generator table plus an optional truncation.

    ``generators`` items are ``(name, degree)`` or ``(name, degree, (p, q))``;
    without a bidegree ``(0, degree)`` is used.  ``truncation`` maps a name or
    a tuple of names to the maximal total exponent allowed in that group.
    """

    __slots__ = ("generators", "truncation", "_by_name", "_parity", "_hash")

    def __init__(self, generators: Iterable[GeneratorSpec] = (),
                 truncation: Optional[Mapping[Union[str, Tuple[str, ...]], int]] = None):
        gens = []
        for i, spec in enumerate(generators):
            if isinstance(spec, Generator):
                name, degree, bideg = spec.name, spec.degree, (spec.p_weight, spec.q_weight)
            elif len(spec) == 2:
                name, degree = spec
                bideg = (0, degree)
            else:
                name, degree, bideg = spec
            gens.append(Generator(str(name), int(degree), int(bideg[0]), int(bideg[1]), i))
        self.generators: Tuple[Generator, ...] = tuple(gens)
        self._by_name = {g.name: g.index for g in gens}
        if len(self._by_name) != len(gens):
            raise AlgebraError("generator names must be unique")
        self._parity = tuple(g.parity for g in gens)
        groups = []
        for key, bound in (truncation or {}).items():
            names = (key,) if isinstance(key, str) else tuple(key)
            idx = frozenset(self.index(n) for n in names)
            if int(bound) < 0:
                raise AlgebraError("truncation bounds must be nonnegative")
            groups.append((idx, int(bound)))
        groups.sort(key=lambda t: (sorted(t[0]), t[1]))
        self.truncation: Tuple[Tuple[frozenset, int], ...] = tuple(groups)
        self._hash = hash((tuple((g.name, g.degree, g.p_weight) for g in gens),
                           tuple((tuple(sorted(s)), b) for s, b in self.truncation)))

    # -- identity -------------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Context):
            return NotImplemented
        return self.generators == other.generators and self.truncation == other.truncation

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"Context({gens})"

    # -- lookup ---------------------------------------------------------
    def index(self, name: Union[str, int, Generator]) -> int:
        if isinstance(name, Generator):
            if name.index >= len(self.generators) or self.generators[name.index] != name:
                raise ContextMismatch(f"generator {name.name} is not from this context")
            return name.index
        if isinstance(name, int):
            return name
        try:
            return self._by_name[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def __getitem__(self, name) -> Generator:
        return self.generators[self.index(name)]

    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def parity(self, i: int) -> int:
        return self._parity[i]

    # -- element constructors --------------------------------------------
    def gen(self, name) -> "Element":
        return Element(self, {((self.index(name), 1),): Fraction(1)})

    def gens(self, *names) -> Tuple["Element", ...]:
        if not names:
            return tuple(self.gen(i) for i in range(len(self)))
        return tuple(self.gen(n) for n in names)

    def const(self, c: ScalarLike) -> "Element":
        c = as_scalar(c)
        return Element(self, {ONE: c} if c else {})

    def one(self) -> "Element":
        return self.const(1)

    def zero(self) -> "Element":
        return Element(self, {})

    def monomial(self, mono: Monomial, coeff: ScalarLike = 1) -> "Element":
        return Element(self, {tuple(mono): as_scalar(coeff)})

    def parse(self, text: str) -> "Element":
        """Parse a polynomial such as ``"2*x^2 - 1/3*θe*θf"``."""
        return _Parser(self, text).parse()

    # -- derived contexts -------------------------------------------------
    def with_truncation(self, truncation) -> "Context":
        return Context(self.generators, truncation)

    def truncation_map(self) -> Dict[Tuple[str, ...], int]:
        return {tuple(self.generators[i].name for i in sorted(s)): b for s, b in self.truncation}

    def embed(self, e: "Element", target: "Context") -> "Element":
        """Map an element of this context into ``target`` by generator name."""
        if e.ctx != self:
            raise ContextMismatch("element is not from this context")
        remap = [target.index(g.name) for g in self.generators]
        out = target.zero()
        for mono, c in e.terms.items():
            term = target.const(c)
            for i, k in mono:
                gi = target.gen(remap[i])
                for _ in range(k):
                    term = term * gi
            out = out + term
        return out

    # -- truncation -------------------------------------------------------
    def exceeds(self, mono: Monomial) -> bool:
        if not self.truncation:
            return False
        for group, bound in self.truncation:
            if sum(k for i, k in mono if i in group) > bound:
                return True
        return False

    def mono_degree(self, mono: Monomial) -> int:
        gens = self.generators
        return sum(gens[i].degree * k for i, k in mono)

    def mono_bidegree(self, mono: Monomial) -> Tuple[int, int]:
        gens = self.generators
        return (sum(gens[i].p_weight * k for i, k in mono),
                sum(gens[i].q_weight * k for i, k in mono))

    def mono_str(self, mono: Monomial) -> str:
        if not mono:
            return "1"
        parts = []
        for i, k in mono:
            name = self.generators[i].name
            parts.append(name if k == 1 else f"{name}^{k}")
        return "*".join(parts)


def _check_same(a: Context, b: Context):
    if a is not b and a != b:
        raise ContextMismatch("operands belong to different contexts")


def normalize_monomial(ctx: Context, factors: Sequence[Tuple[Union[str, int, Generator], int]]
                       ) -> Tuple[int, Optional[Monomial]]:
    """Sort an ordered product of generator powers into canonical form.

    Returns ``(sign, monomial)`` with ``sign`` in ``{1, -1}``, or ``(0, None)``
    when an odd generator occurs twice.
    """
    items = []
    for g, k in factors:
        if isinstance(g, Generator) and (g.index >= len(ctx) or ctx.generators[g.index] != g):
            raise ContextMismatch(f"generator {g.name} does not belong to this context")
        i = ctx.index(g)
        k = int(k)
        if k < 0:
            raise AlgebraError("negative exponent")
        if k == 0:
            continue
        if ctx.parity(i) and k > 1:
            return 0, None
        items.append([i, k, ctx.parity(i) * k % 2])
    sign = 1
    # insertion sort, counting transpositions of odd factors
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1][0] > items[b][0]:
            if items[b - 1][2] and items[b][2]:
                sign = -sign
            items[b - 1], items[b] = items[b], items[b - 1]
            b -= 1
    merged = []
    for i, k, _ in items:
        if merged and merged[-1][0] == i:
            if ctx.parity(i):
                return 0, None
            merged[-1][1] += k
        else:
            merged.append([i, k])
    return sign, tuple((i, k) for i, k in merged)


def mono_mul(ctx: Context, m1: Monomial, m2: Monomial) -> Tuple[int, Optional[Monomial]]:
    """Product of two canonical monomials as ``(sign, monomial)``."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    par = ctx._parity
    flips = 0
    odd_after = 0  # odd factors of m2 seen so far with smaller index
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 or j < n2:
        if j >= n2 or (i < n1 and m1[i][0] < m2[j][0]):
            g, k = m1[i]
            if par[g]:
                flips += odd_after
            out.append((g, k))
            i += 1
        elif i >= n1 or m2[j][0] < m1[i][0]:
            g, k = m2[j]
            if par[g]:
                odd_after += 1
            out.append((g, k))
            j += 1
        else:
            g = m1[i][0]
            if par[g]:
                return 0, None
            out.append((g, m1[i][1] + m2[j][1]))
            i += 1
            j += 1
    # every odd factor of m1 must pass the odd factors of m2 with smaller index
    return (-1 if flips % 2 else 1), tuple(out)


class Element:
    """A sparse rational combination of canonical monomials."""

    __slots__ = ("ctx", "terms", "truncated")

    def __init__(self, ctx: Context, terms: Optional[Mapping[Monomial, Fraction]] = None,
                 truncated: bool = False):
        self.ctx = ctx
        self.terms: Dict[Monomial, Fraction] = {m: c for m, c in (terms or {}).items() if c}
        self.truncated = truncated

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            _check_same(self.ctx, other.ctx)
            return other
        return self.ctx.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Element(self.ctx, terms, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ctx, {m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: ScalarLike) -> "Element":
        c = as_scalar(c)
        if not c:
            return Element(self.ctx, {}, self.truncated)
        return Element(self.ctx, {m: v * c for m, v in self.terms.items()}, self.truncated)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1 / as_scalar(c))

    def __pow__(self, k: int):
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ctx == other.ctx and self.terms == other.terms
        try:
            return self.terms == self.ctx.const(other).terms
        except TypeError:
            return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -------------------------------------------------------
    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: _mono_key(t[0])))

    def __len__(self):
        return len(self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def degree(self) -> Optional[int]:
        degs = {self.ctx.mono_degree(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def bidegree(self) -> Optional[Tuple[int, int]]:
        bd = {self.ctx.mono_bidegree(m) for m in self.terms}
        return bd.pop() if len(bd) == 1 else None

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def support(self) -> frozenset:
        """Indices of generators occurring in some term."""
        return frozenset(i for m in self.terms for i, _ in m)

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for mono, c in self:
            body = self.ctx.mono_str(mono)
            mag = abs(c)
            if not mono:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            out.append(("- " if c < 0 else "+ ") + text)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _mono_key(mono: Monomial):
    return (sum(k for _, k in mono), mono)


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product; terms beyond the truncation are dropped."""
    _check_same(a.ctx, b.ctx)
    ctx = a.ctx
    terms: Dict[Monomial, Fraction] = {}
    truncated = a.truncated or b.truncated
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s, m = mono_mul(ctx, m1, m2)
            if not s:
                continue
            if ctx.truncation and ctx.exceeds(m):
                truncated = True
                continue
            v = terms.get(m, 0) + s * c1 * c2
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
    return Element(ctx, terms, truncated)


def bidegree_components(e: Element) -> Dict[Tuple[int, int], Element]:
    out: Dict[Tuple[int, int], Dict[Monomial, Fraction]] = {}
    for m, c in e.terms.items():
        out.setdefault(e.ctx.mono_bidegree(m), {})[m] = c
    return {k: Element(e.ctx, v) for k, v in sorted(out.items())}


def degree_components(e: Element) -> Dict[int, Element]:
    out: Dict[int, Dict[Monomial, Fraction]] = {}
    for m, c in e.terms.items():
        out.setdefault(e.ctx.mono_degree(m), {})[m] = c
    return {k: Element(e.ctx, v) for k, v in sorted(out.items())}


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([^\W\d]\w*)|(\S))", re.UNICODE)


class _Parser:
    """Recursive-descent parser for polynomial text."""

    def __init__(self, ctx: Context, text: str):
        self.ctx = ctx
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise AlgebraError(f"cannot parse {self.text!r} at column {pos + 1}")
            num, name, sym = m.groups()
            col = m.start(m.lastindex) + 1
            self.tokens.append((("num", num) if num else ("name", name) if name else ("sym", sym), col))
            pos = m.end()
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else (None, None)

    def _take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok[0]

    def _fail(self, msg):
        col = self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text) + 1
        raise AlgebraError(f"{msg} in {self.text!r} at column {col}")

    def parse(self) -> Element:
        if not self.tokens:
            self._fail("empty expression")
        e = self._expr()
        if self.pos != len(self.tokens):
            self._fail("unexpected token")
        return e

    def _expr(self):
        kind, val = self._peek()
        sign = 1
        if kind == "sym" and val in "+-":
            self._take()
            sign = -1 if val == "-" else 1
        out = self._term().scale(sign)
        while True:
            kind, val = self._peek()
            if kind == "sym" and val in "+-":
                self._take()
                t = self._term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def _term(self):
        out = self._factor()
        while self._peek() == ("sym", "*"):
            self._take()
            out = out * self._factor()
        return out

    def _factor(self):
        kind, val = self._peek()
        if kind == "num":
            self._take()
            base = self.ctx.const(Fraction(val))
        elif kind == "name":
            self._take()
            if val not in self.ctx._by_name:
                self.pos -= 1
                self._fail(f"unknown generator {val!r}")
            base = self.ctx.gen(val)
        elif (kind, val) == ("sym", "("):
            self._take()
            base = self._expr()
            if self._peek() != ("sym", ")"):
                self._fail("expected ')'")
            self._take()
        elif kind == "sym" and val == "-":
            self._take()
            return -self._factor()
        else:
            self._fail("expected a number, generator or '('")
        if self._peek() == ("sym", "^"):
            self._take()
            kind, val = self._peek()
            if kind != "num" or "/" in val:
                self._fail("expected an integer exponent")
            self._take()
            base = base ** int(val)
        return base
