"""Problem files: a TOML tree of named structure constants.

See ``docs/format.md`` for the grammar.  :func:`parse` validates the whole
file and reports every problem it finds; :func:`dumps` writes a canonical
form, so ``parse(dumps(parse(text)))`` equals ``parse(text)``.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

import tomli_w

from .algebroid import AlgebroidSpec, Section, SpecError
from .core import AlgebraError, Context, Element

FORMAT_VERSION = 1
KINDS = ("algebroid", "weil", "brst", "matched_pair", "bialgebra", "ginzburg", "poisson", "courant_action")
TRUNCATION_ENV = "QALG_TRUNCATION"


class InputError(Exception):
    """All validation problems found in one input file."""

    def __init__(self, errors: List[str]):
        super().__init__("\n".join(errors))
        self.errors = list(errors)


# ---------------------------------------------------------------------------
# normalisation helpers


def _scalar_text(value) -> str:
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return str(Fraction(value.strip()))
    raise ValueError(f"expected an integer or a rational string, got {value!r}")


def _indices(key: str, n: int) -> Tuple[str, ...]:
    parts = tuple(p.strip() for p in key.split(","))
    if len(parts) != n or not all(parts):
        raise ValueError(f"key {key!r} must list {n} comma-separated indices")
    return parts


class _Errors:
    def __init__(self):
        self.items: List[str] = []

    def add(self, where: str, msg: str):
        self.items.append(f"[{where}] {msg}")


def _table(tree, key, errs: _Errors, where: str, required=False) -> Dict[str, Any]:
    val = tree.get(key)
    if val is None:
        if required:
            errs.add(where, f"missing table [{key}]")
        return {}
    if not isinstance(val, dict):
        errs.add(where, f"[{key}] must be a table")
        return {}
    return val


def _degrees(tbl: Dict[str, Any], errs: _Errors, where: str) -> Dict[str, int]:
    out = {}
    for name, deg in tbl.items():
        if isinstance(deg, bool) or not isinstance(deg, int):
            errs.add(where, f"degree of {name!r} must be an integer")
            continue
        out[str(name)] = deg
    return out


def _poly_text(ctx: Context, value, errs: _Errors, where: str) -> Optional[str]:
    try:
        if isinstance(value, (int, str)) and not isinstance(value, bool):
            return str(ctx.parse(str(value)))
        raise ValueError(f"expected an integer or a polynomial string, got {value!r}")
    except (ValueError, ZeroDivisionError, AlgebraError) as exc:
        errs.add(where, str(exc))
        return None


def _norm_lie(tree, errs: _Errors, where: str) -> Dict[str, Any]:
    return _norm_algebroid(tree, errs, where, base={}, allow_anchor=False)


def _norm_algebroid(tree, errs: _Errors, where: str, base: Dict[str, int],
                    allow_anchor: bool = True) -> Dict[str, Any]:
    frame = _degrees(_table(tree, "frame", errs, where, required=True), errs, f"{where}.frame")
    if not frame and not base:
        errs.add(where, "no generators declared (empty context)")
    out: Dict[str, Any] = {"frame": frame}
    if "fibre_prefix" in tree:
        if not isinstance(tree["fibre_prefix"], str):
            errs.add(where, "fibre_prefix must be a string")
        else:
            out["fibre_prefix"] = tree["fibre_prefix"]
    ctx = Context(list(base.items())) if base else Context()
    anchor = {}
    raw_anchor = _table(tree, "anchor", errs, where)
    if raw_anchor and not allow_anchor:
        errs.add(where, "a Lie algebra block cannot have an anchor")
    for key, val in raw_anchor.items():
        try:
            a, x = _indices(key, 2)
        except ValueError as exc:
            errs.add(f"{where}.anchor", str(exc))
            continue
        if a not in frame:
            errs.add(f"{where}.anchor", f"undeclared frame index {a!r} in {key!r}")
        if x not in base:
            errs.add(f"{where}.anchor", f"undeclared base coordinate {x!r} in {key!r}")
        if a in frame and x in base:
            txt = _poly_text(ctx, val, errs, f"{where}.anchor {key}")
            if txt is not None:
                anchor[f"{a},{x}"] = txt
    out["anchor"] = anchor
    brackets = {}
    for key, val in _table(tree, "brackets", errs, where).items():
        try:
            idx = _indices(key, 3)
        except ValueError as exc:
            errs.add(f"{where}.brackets", str(exc))
            continue
        missing = [i for i in idx if i not in frame]
        if missing:
            errs.add(f"{where}.brackets", f"undeclared frame index {missing[0]!r} in {key!r}")
            continue
        txt = _poly_text(ctx, val, errs, f"{where}.brackets {key}")
        if txt is not None:
            brackets[",".join(idx)] = txt
    out["brackets"] = brackets
    # antisymmetry among the entries actually given
    for key, txt in brackets.items():
        a, b, c = key.split(",")
        partner = f"{b},{a},{c}"
        if partner in brackets and a < b:
            sign = 1 if (frame[a] * frame[b]) % 2 else -1
            if ctx.parse(brackets[partner]) != ctx.parse(txt).scale(sign):
                errs.add(f"{where}.brackets",
                         f"antisymmetry violated for the pair ({a},{b}) -> {c}: {txt} and {brackets[partner]}")
    return out


def _norm_pairs(tree, key, errs, where, n, check=None) -> Dict[str, str]:
    out = {}
    for k, v in _table(tree, key, errs, where).items():
        try:
            idx = _indices(k, n)
            if check:
                check(idx)
            out[",".join(idx)] = _scalar_text(v)
        except (ValueError, ZeroDivisionError) as exc:
            errs.add(f"{key}", str(exc))
    return out


# ---------------------------------------------------------------------------
# problem files


@dataclass
class ProblemFile:
    version: int
    kind: str
    data: Dict[str, Any] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return (self.version, self.kind, self.data) == (other.version, other.kind, other.data)

    # -- builders ---------------------------------------------------------
    def base_context(self, truncation_bound: Optional[int] = None) -> Context:
        base = self.data.get("base", {})
        trunc = dict(self.data.get("truncation", {}))
        bound = truncation_bound if truncation_bound is not None else trunc.get("bound")
        if bound is None:
            env = os.environ.get(TRUNCATION_ENV)
            if env:
                bound = int(env)
        names = trunc.get("generators")
        if names is None:
            names = [n for n, d in base.items() if d <= 0 and d % 2 == 0]
        truncation = {tuple(names): bound} if bound is not None and names else None
        return Context(list(base.items()), truncation)

    def _algebroid(self, block: Dict[str, Any], base: Context, default_prefix: str = "θ") -> AlgebroidSpec:
        frame = tuple(block["frame"].items())
        anchor = {tuple(k.split(",")): base.parse(v) for k, v in block.get("anchor", {}).items()}
        brackets = {tuple(k.split(",")): base.parse(v) for k, v in block.get("brackets", {}).items()}
        return AlgebroidSpec(base, frame, anchor, brackets, block.get("fibre_prefix", default_prefix))

    def algebroid(self, truncation_bound=None) -> AlgebroidSpec:
        return self._algebroid(self.data["algebroid"], self.base_context(truncation_bound))

    def lie(self, key: str = "lie", prefix: str = "θ") -> AlgebroidSpec:
        return self._algebroid(self.data[key], Context(), prefix)

    def connection(self, spec: AlgebroidSpec):
        from .models import SplittingData

        block = self.data.get("connection")
        if block is None:
            return None
        return SplittingData({tuple(k.split(",")): spec.base.parse(v) for k, v in block.items()})

    def matched_pair(self, horizontal: str = "B", truncation_bound=None):
        from .models import MatchedPairSpec

        base = self.base_context(truncation_bound)
        A = self._algebroid(self.data["A"], base, "α")
        B = self._algebroid(self.data["B"], base, "β")
        conv = lambda blk: {tuple(k.split(",")): base.parse(v) for k, v in self.data.get(blk, {}).items()}
        return MatchedPairSpec(A, B, conv("rep_a_on_b"), conv("rep_b_on_a"), horizontal)

    def bialgebra(self):
        from .models import BialgebraSpec

        return BialgebraSpec(self.lie("g", "α"), self.lie("g_dual", "ξ"))

    def ginzburg(self, truncation_bound=None):
        spec = self.algebroid(truncation_bound)
        lie = self.lie("lie", "θ")
        chart = spec.chart()
        secs: Dict[str, Dict[str, str]] = {}
        for k, v in self.data.get("a_tilde", {}).items():
            g, a = k.split(",")
            secs.setdefault(g, {})[a] = v
        a_tilde = {g: chart.section({a: v for a, v in d.items()}) for g, d in secs.items()}
        return spec, lie, a_tilde

    def poisson(self, truncation_bound=None):
        from .symplectic import bivector, cotangent_context

        base = self.base_context(truncation_bound)
        C = cotangent_context(base, 0, self.data.get("momentum_prefix", "p"))
        comps = {tuple(k.split(",")): C.ctx.parse(v) for k, v in self.data.get("bivector", {}).items()}
        return C, bivector(C, comps)

    def courant(self):
        from .symplectic import QuadraticLieSpec, courant_model

        q = self.data["quadratic"]
        inner = {tuple(k.split(",")): Fraction(v) for k, v in q.get("inner_product", {}).items()}
        br = {tuple(k.split(",")): Fraction(v) for k, v in q.get("brackets", {}).items()}
        model = courant_model(QuadraticLieSpec(tuple(q["labels"]), inner, br))
        lie = self.lie("lie", "θ")
        imgs: Dict[str, Element] = {}
        for k, v in self.data.get("a_tilde", {}).items():
            g, a = k.split(",")
            imgs[g] = imgs.get(g, model.ctx.zero()) + model.ctx.gen(a).scale(Fraction(v))
        return model, lie, imgs


def _validate_build(pf: ProblemFile, errs: _Errors):
    """Run the constructors so semantic errors are reported with their block."""
    try:
        k = pf.kind
        if k in ("algebroid", "brst"):
            spec = pf.algebroid(truncation_bound=0)
            if k == "algebroid" and "connection" in pf.data:
                pf.connection(spec)
        elif k == "weil":
            pf.lie()
        elif k == "matched_pair":
            pf.matched_pair(truncation_bound=0)
        elif k == "bialgebra":
            pf.bialgebra()
        elif k == "ginzburg":
            pf.ginzburg(truncation_bound=0)
        elif k == "poisson":
            pf.poisson(truncation_bound=0)
        elif k == "courant_action":
            pf.courant()
    except (AlgebraError, ValueError, KeyError, ZeroDivisionError) as exc:
        errs.add(pf.kind, str(exc))


def parse(source) -> ProblemFile:
    """Parse and validate a problem file given as text or bytes."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError([f"[file] not valid UTF-8: {exc}"])
    try:
        tree = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise InputError([f"[syntax] {exc}"])
    errs = _Errors()
    version = tree.get("format_version")
    if version != FORMAT_VERSION:
        errs.add("file", f"format_version must be {FORMAT_VERSION}")
    kind = tree.get("kind")
    if kind not in KINDS:
        errs.add("file", f"kind must be one of {', '.join(KINDS)}")
        raise InputError(errs.items)
    data: Dict[str, Any] = {}
    base = _degrees(_table(tree, "base", errs, "base"), errs, "base")
    if base:
        data["base"] = base
    if kind in ("algebroid", "brst", "ginzburg"):
        data["algebroid"] = _norm_algebroid(tree, errs, "algebroid", base)
    if kind in ("weil", "ginzburg", "courant_action"):
        data["lie"] = _norm_lie(_table(tree, "lie", errs, "lie", required=True), errs, "lie")
    if kind == "matched_pair":
        for part in ("A", "B"):
            data[part] = _norm_algebroid(_table(tree, part, errs, part, required=True), errs, part, base)
        for blk in ("rep_a_on_b", "rep_b_on_a"):
            ent = {}
            for key, val in _table(tree, blk, errs, blk).items():
                try:
                    idx = _indices(key, 3)
                except ValueError as exc:
                    errs.add(blk, str(exc))
                    continue
                txt = _poly_text(Context(list(base.items())), val, errs, f"{blk} {key}")
                if txt is not None:
                    ent[",".join(idx)] = txt
            data[blk] = ent
    if kind == "bialgebra":
        for part in ("g", "g_dual"):
            data[part] = _norm_lie(_table(tree, part, errs, part, required=True), errs, part)
    if kind == "poisson":
        if not base:
            errs.add("base", "no generators declared (empty context)")
        ent = {}
        prefix = str(tree.get("momentum_prefix", "p"))
        cot = Context(list(base.items()) + [(prefix + n, 1 - d) for n, d in base.items()])
        for key, val in _table(tree, "bivector", errs, "bivector", required=True).items():
            try:
                i, j = _indices(key, 2)
            except ValueError as exc:
                errs.add("bivector", str(exc))
                continue
            if i not in base or j not in base:
                errs.add("bivector", f"undeclared base coordinate in {key!r}")
                continue
            txt = _poly_text(cot, val, errs, f"bivector {key}")
            if txt is not None:
                ent[f"{i},{j}"] = txt
        data["bivector"] = ent
    if kind == "courant_action":
        q = _table(tree, "quadratic", errs, "quadratic", required=True)
        labels = q.get("labels", [])
        if not isinstance(labels, list) or not labels or not all(isinstance(x, str) for x in labels):
            errs.add("quadratic", "labels must be a nonempty list of strings")
            labels = []
        chk2 = lambda idx: None if all(i in labels for i in idx) else (_ for _ in ()).throw(
            ValueError(f"undeclared label in {','.join(idx)!r}"))
        data["quadratic"] = {
            "labels": list(labels),
            "inner_product": _norm_pairs(q, "inner_product", errs, "quadratic", 2, chk2),
            "brackets": _norm_pairs(q, "brackets", errs, "quadratic", 3, chk2),
        }
    if kind in ("ginzburg", "courant_action"):
        ent = {}
        lie_labels = set(data.get("lie", {}).get("frame", {}))
        targets = set(data["algebroid"]["frame"]) if kind == "ginzburg" else set(
            data.get("quadratic", {}).get("labels", []))
        for key, val in _table(tree, "a_tilde", errs, "a_tilde").items():
            try:
                g, a = _indices(key, 2)
            except ValueError as exc:
                errs.add("a_tilde", str(exc))
                continue
            if g not in lie_labels:
                errs.add("a_tilde", f"undeclared Lie algebra index {g!r}")
                continue
            if a not in targets:
                errs.add("a_tilde", f"undeclared target index {a!r}")
                continue
            if kind == "ginzburg":
                txt = _poly_text(Context(list(base.items())), val, errs, f"a_tilde {key}")
            else:
                try:
                    txt = _scalar_text(val)
                except (ValueError, ZeroDivisionError) as exc:
                    errs.add("a_tilde", str(exc))
                    txt = None
            if txt is not None:
                ent[f"{g},{a}"] = txt
        data["a_tilde"] = ent
    if "connection" in tree:
        ent = {}
        for key, val in _table(tree, "connection", errs, "connection").items():
            try:
                idx = _indices(key, 3)
            except ValueError as exc:
                errs.add("connection", str(exc))
                continue
            txt = _poly_text(Context(list(base.items())), val, errs, f"connection {key}")
            if txt is not None:
                ent[",".join(idx)] = txt
        data["connection"] = ent
    if "truncation" in tree:
        t = _table(tree, "truncation", errs, "truncation")
        tr: Dict[str, Any] = {}
        b = t.get("bound")
        if b is not None:
            if isinstance(b, bool) or not isinstance(b, int) or b < 0:
                errs.add("truncation", "bound must be a nonnegative integer")
            else:
                tr["bound"] = b
        gens = t.get("generators")
        if gens is not None:
            if not isinstance(gens, list) or any(g not in base for g in gens):
                errs.add("truncation", "generators must list declared base coordinates")
            else:
                tr["generators"] = list(gens)
        data["truncation"] = tr
    if "compute" in tree:
        c = _table(tree, "compute", errs, "compute")
        comp: Dict[str, Any] = {}
        degs = c.get("degrees")
        if degs is not None:
            if (not isinstance(degs, list) or len(degs) != 2 or
                    not all(isinstance(d, int) and not isinstance(d, bool) for d in degs) or degs[0] > degs[1]):
                errs.add("compute", "degrees must be [low, high] with low <= high")
            else:
                comp["degrees"] = list(degs)
        if "canonical_splitting" in c:
            if not isinstance(c["canonical_splitting"], bool):
                errs.add("compute", "canonical_splitting must be true or false")
            else:
                comp["canonical_splitting"] = c["canonical_splitting"]
        data["compute"] = comp
    if "momentum_prefix" in tree:
        data["momentum_prefix"] = str(tree["momentum_prefix"])
    pf = ProblemFile(version if isinstance(version, int) else FORMAT_VERSION, kind, data)
    if not errs.items:
        _validate_build(pf, errs)
    if errs.items:
        raise InputError(errs.items)
    return pf


def load(path) -> ProblemFile:
    with open(path, "rb") as fh:
        return parse(fh.read())


def _to_tree(pf: ProblemFile) -> Dict[str, Any]:
    tree: Dict[str, Any] = {"format_version": pf.version, "kind": pf.kind}
    d = pf.data
    if "momentum_prefix" in d:
        tree["momentum_prefix"] = d["momentum_prefix"]
    if "base" in d:
        tree["base"] = dict(d["base"])
    if "algebroid" in d:
        tree.update({k: v for k, v in d["algebroid"].items() if v or k == "frame"})
    for key in ("lie", "A", "B", "g", "g_dual", "quadratic"):
        if key in d:
            tree[key] = {k: v for k, v in d[key].items() if v or k in ("frame", "labels")}
    for key in ("rep_a_on_b", "rep_b_on_a", "bivector", "a_tilde", "truncation", "compute"):
        if d.get(key):
            tree[key] = d[key]
    if "connection" in d:
        tree["connection"] = d["connection"]
    return tree


def dumps(pf: ProblemFile) -> str:
    return tomli_w.dumps(_to_tree(pf))


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    title: str
    sections: List[Tuple[str, Any]] = field(default_factory=list)
    failed: bool = False

    def text(self, line: str):
        self.sections.append(("text", line))

    def betti(self, name: str, table):
        self.sections.append(("betti", (name, table)))

    def identity(self, name: str, passed: bool, witnesses: int = 0, failure: Optional[str] = None):
        self.sections.append(("identity", (name, passed, witnesses, failure)))
        if not passed:
            self.failed = True

    def matrix(self, name: str, rows):
        self.sections.append(("matrix", (name, rows)))


def _tree(report: Report) -> Dict[str, Any]:
    out: Dict[str, Any] = {"title": report.title, "status": "FAIL" if report.failed else "PASS", "items": []}
    for kind, payload in report.sections:
        if kind == "text":
            out["items"].append({"type": "text", "value": payload})
        elif kind == "betti":
            name, table = payload
            out["items"].append({"type": "betti", "name": name, "table": [
                {"degree": list(k) if isinstance(k, tuple) else k, "betti": table.values[k],
                 "dimension": table.dims.get(k), "valid": table.valid[k]} for k in sorted(table.values)]})
        elif kind == "identity":
            name, ok, w, fail = payload
            item = {"type": "identity", "name": name, "passed": ok, "witnesses": w}
            if fail:
                item["witness"] = fail
            out["items"].append(item)
        elif kind == "matrix":
            name, rows = payload
            out["items"].append({"type": "matrix", "name": name,
                                 "rows": [[str(Fraction(x)) for x in row] for row in rows]})
    return out


def emit_report(report: Report, fmt: str = "text") -> bytes:
    """Deterministic text or JSON rendering of a report."""
    if fmt == "json":
        return (json.dumps(_tree(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    lines = [f"# {report.title}"]
    for kind, payload in report.sections:
        if kind == "text":
            lines.append(payload)
        elif kind == "betti":
            name, table = payload
            lines.append(f"{name}:")
            labels = {k: (f"{k[0]},{k[1]}" if isinstance(k, tuple) else str(k)) for k in table.values}
            width = max((len(v) for v in labels.values()), default=1)
            for k in sorted(table.values):
                tag = "" if table.valid[k] else " (provisional: truncation)"
                lines.append(f"H^{labels[k]:<{width}} {table.values[k]}{tag}")
        elif kind == "identity":
            name, ok, w, fail = payload
            if ok:
                lines.append(f"PASS {name} (witnesses: {w})")
            else:
                lines.append(f"FAIL {name}: {fail}")
        elif kind == "matrix":
            name, rows = payload
            lines.append(f"{name}:")
            for row in rows:
                lines.append("  [" + " ".join(str(Fraction(x)) for x in row) + "]")
    lines.append("status: " + ("FAIL" if report.failed else "PASS"))
    return ("\n".join(lines) + "\n").encode("utf-8")
