"""Standard small examples, plus random valid algebroids for property tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .algebroid import AlgebroidSpec
from .core import Context, Element


def sl2(fibre_prefix: str = "θ") -> AlgebroidSpec:
    """[h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    return AlgebroidSpec.lie_algebra(
        ["e", "f", "h"], {("h", "e", "e"): 2, ("h", "f", "f"): -2, ("e", "f", "h"): 1}, fibre_prefix=fibre_prefix)


def so3(fibre_prefix: str = "θ") -> AlgebroidSpec:
    return AlgebroidSpec.lie_algebra(
        ["l1", "l2", "l3"], {("l1", "l2", "l3"): 1, ("l2", "l3", "l1"): 1, ("l3", "l1", "l2"): 1},
        fibre_prefix=fibre_prefix)


def aff1(fibre_prefix: str = "θ", labels=("e1", "e2")) -> AlgebroidSpec:
    """The two-dimensional nonabelian Lie algebra [e1, e2] = e2."""
    a, b = labels
    return AlgebroidSpec.lie_algebra([a, b], {(a, b, b): 1}, fibre_prefix=fibre_prefix)


def heisenberg(fibre_prefix: str = "θ") -> AlgebroidSpec:
    return AlgebroidSpec.lie_algebra(["p", "q", "z"], {("p", "q", "z"): 1}, fibre_prefix=fibre_prefix)


def abelian(n: int, fibre_prefix: str = "θ", stem: str = "v") -> AlgebroidSpec:
    return AlgebroidSpec.lie_algebra([f"{stem}{i}" for i in range(1, n + 1)], {}, fibre_prefix=fibre_prefix)


def plane(bound: int = 3) -> Context:
    return Context([("x", 0), ("y", 0)], {("x", "y"): bound})


def so2_on_plane(bound: int = 3) -> AlgebroidSpec:
    """Rotations of the plane: r acts by -y d/dx + x d/dy."""
    return AlgebroidSpec.action(AlgebroidSpec.lie_algebra(["r"], {}), plane(bound),
                                {"r": {"x": "-y", "y": "x"}})


def aff1_on_line(bound: int = 3) -> AlgebroidSpec:
    """e1 -> -x d/dx, e2 -> d/dx; a transitive action on the line."""
    base = Context([("x", 0)], {"x": bound})
    return AlgebroidSpec.action(aff1(), base, {"e1": {"x": "-x"}, "e2": {"x": "1"}})


def super_example() -> AlgebroidSpec:
    """A graded Lie algebra with odd e (degree 1), [e, e] = h with h of degree 2."""
    return AlgebroidSpec.lie_algebra(["e", "h"], {("e", "e", "h"): 1}, degrees={"e": 1, "h": 2})


def gl2_quadratic():
    """gl(2) = sl(2) + centre with the trace form; four generators E, F, H, Z."""
    from .symplectic import QuadraticLieSpec

    return QuadraticLieSpec(("E", "F", "H", "Z"), {("E", "F"): 1, ("H", "H"): 2, ("Z", "Z"): 2},
                            {("H", "E", "E"): 2, ("H", "F", "F"): -2, ("E", "F", "H"): 1})


def matched_pair_example():
    """aff1 acting on the line algebra by e1 . y = y; nothing acts back."""
    from .models import MatchedPairSpec

    g = aff1("α")
    b = AlgebroidSpec.lie_algebra(["y"], {}, fibre_prefix="β")
    return MatchedPairSpec(g, b, {("e1", "y", "y"): 1}, {}, "B")


def bialgebra_2d(a: int = 1, b: int = 0):
    """aff1 with dual bracket [f1, f2] = a f1 + b f2."""
    from .models import BialgebraSpec

    gd = AlgebroidSpec.lie_algebra(["f1", "f2"], {("f1", "f2", "f1"): a, ("f1", "f2", "f2"): b},
                                   fibre_prefix="ξ")
    return BialgebraSpec(aff1("α"), gd)


def bialgebra_3d(compatible: bool):
    """g = span(e1, e2, e3) with [e1, e_i] = e_i, and two choices of dual bracket."""
    from .models import BialgebraSpec

    g = AlgebroidSpec.lie_algebra(["e1", "e2", "e3"], {("e1", "e2", "e2"): 1, ("e1", "e3", "e3"): 1},
                                  fibre_prefix="α")
    if compatible:
        br = {("f2", "f3", "f1"): 1}
    else:
        br = {("f1", "f2", "f1"): 1}
    gd = AlgebroidSpec.lie_algebra(["f1", "f2", "f3"], br, fibre_prefix="ξ")
    return BialgebraSpec(g, gd)


# ---------------------------------------------------------------------------
# random valid specs


def change_frame(spec: AlgebroidSpec, M: Sequence[Sequence[Fraction]], labels: Optional[Sequence[str]] = None,
                 fibre_prefix: Optional[str] = None) -> AlgebroidSpec:
    """New frame X'_a = sum_b M[a][b] X_b for an invertible constant matrix on a degree-0 frame."""
    if any(p for _, p in spec.frame):
        raise ValueError("constant frame changes are only offered for degree-0 frames")
    old = spec.labels
    new = tuple(labels or old)
    Minv = linalg.inverse([[Fraction(v) for v in row] for row in M])
    base = spec.base
    anchor: Dict[Tuple[str, str], Element] = {}
    for a, row in zip(new, M):
        for x in base.names():
            v = base.zero()
            for b, m in zip(old, row):
                if m:
                    v = v + spec.rho(b, x).scale(m)
            if v:
                anchor[(a, x)] = v
    brackets: Dict[Tuple[str, str, str], Element] = {}
    n = len(old)
    for i in range(n):
        for j in range(i + 1, n):
            # [X'_i, X'_j] = sum M_ik M_jl ([X_k, X_l]) + anchor terms of M, which vanish for constants
            comb = [base.zero() for _ in range(n)]
            for k in range(n):
                for l in range(n):
                    m = Fraction(M[i][k]) * Fraction(M[j][l])
                    if not m:
                        continue
                    for c in range(n):
                        s = spec.structure(old[k], old[l], old[c])
                        if s:
                            comb[c] = comb[c] + s.scale(m)
            for c2 in range(n):
                v = base.zero()
                for c in range(n):
                    if Minv[c][c2] and comb[c]:
                        v = v + comb[c].scale(Minv[c][c2])
                if v:
                    brackets[(new[i], new[j], new[c2])] = v
    return AlgebroidSpec(base, tuple((a, 0) for a in new), anchor, brackets,
                         spec.fibre_prefix if fibre_prefix is None else fibre_prefix)


def random_invertible(n: int, rng: random.Random, span: int = 2) -> List[List[Fraction]]:
    while True:
        M = [[Fraction(rng.randint(-span, span)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M) == n:
            return M


def random_spec(seed: int) -> AlgebroidSpec:
    """A valid algebroid: a random rational frame change of a standard example."""
    rng = random.Random(seed)
    pool = [sl2, so3, heisenberg, aff1, aff1_on_line, so2_on_plane]
    spec = pool[rng.randrange(len(pool))]()
    n = len(spec.labels)
    return change_frame(spec, random_invertible(n, rng), [f"u{i}" for i in range(1, n + 1)])
