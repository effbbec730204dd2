"""Command-line entry point: ``qalg <subcommand> FILE [options]``.

Exit status is 0 when every check passes, 1 when an identity fails (the
report names a witness) and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import ingest
from .algebroid import (AlgebroidSpec, SpecError, anchor_and_bracket_from_differential, build_differential,
                        check_cartan_relations, jacobiator_witness)
from .cohomology import NotHomological, TruncationRequired, betti, make_slice, matrix_of, subcomplex_betti
from .core import AlgebraError
from .derivations import (Derivation, commutator, conjugation_series, exp_conjugate, is_homological,
                          square_witness)
from .ingest import InputError, Report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COMMANDS = ("verify", "cohomology", "basic", "weil", "brst", "mqk", "double", "ginzburg", "poisson", "courant")
CONNECTION_REQUIRED = ("the basic subcomplex depends on a splitting of the tangent lift: supply a [connection] "
                       "block, or pass --canonical-splitting for an action algebroid")


class UsageError(Exception):
    """Input that parses but cannot be used by the chosen subcommand."""


@dataclass
class CommandConfig:
    command: str
    path: str
    degrees: Optional[Tuple[int, int]] = None
    truncation: Optional[int] = None
    fmt: str = "text"
    output: Optional[str] = None
    canonical_splitting: bool = False
    horizontal: Optional[str] = None
    dump_matrices: bool = False


def _degree_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"degree range must look like LO..HI, got {text!r}")
    if a > b:
        raise argparse.ArgumentTypeError("empty degree range")
    return a, b


def _degrees(cfg: CommandConfig, pf: ingest.ProblemFile, default: Tuple[int, int]) -> List[int]:
    lo, hi = cfg.degrees or tuple(pf.data.get("compute", {}).get("degrees", default))
    return list(range(lo, hi + 1))


def _truncation(cfg: CommandConfig) -> Optional[int]:
    """The command-line bound; the file's bound and then the environment are consulted later."""
    env = os.environ.get(ingest.TRUNCATION_ENV)
    if env:
        try:
            int(env)
        except ValueError:
            raise UsageError(f"{ingest.TRUNCATION_ENV} must be an integer, got {env!r}")
    return cfg.truncation


def _identity(report: Report, name: str, witness, count: int = 1):
    """Record a PASS when ``witness`` is None, otherwise a FAIL naming it."""
    if witness is None:
        report.identity(name, True, count)
    else:
        report.identity(name, False, 0, str(witness))


def _eq_witness(A: Derivation, B: Derivation):
    diff = A - B
    if diff.is_zero():
        return None
    i = min(diff.images)
    return f"differs on {A.ctx.generators[i].name} by {diff.images[i]}"


def _square_text(D: Derivation):
    w = square_witness(D)
    return None if w is None else f"D^2({w[0]}) = {w[1]}"


def _algebroid_spec(pf, cfg) -> AlgebroidSpec:
    if pf.kind in ("algebroid", "brst", "ginzburg"):
        return pf.algebroid(_truncation(cfg))
    if pf.kind == "weil":
        return pf.lie()
    raise UsageError(f"{cfg.command} needs an algebroid, weil or brst file, not {pf.kind!r}")


def _betti_into(report, name, table):
    report.betti(name, table)
    if not table.all_valid:
        report.text("note: provisional entries touch the truncation bound")


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(pf, cfg, report):
    spec = _algebroid_spec(pf, cfg)
    for c in check_cartan_relations(spec).checks:
        report.identity(c.name, c.passed, c.witnesses, c.failure)


def cmd_cohomology(pf, cfg, report):
    if pf.kind == "poisson":
        from .symplectic import poisson_differential, poisson_structure_check

        C, pi = pf.poisson(_truncation(cfg))
        if not poisson_structure_check(C.poisson, pi):
            report.identity("[pi, pi] = 0", False, 0, f"[pi, pi] = {_pp(C, pi)}")
            return
        D, name = poisson_differential(C.poisson, pi), "d_pi"
    else:
        spec = _algebroid_spec(pf, cfg)
        D, name = build_differential(spec), "d_A"
        jw = jacobiator_witness(spec)
        if jw is not None:
            report.identity("Jacobi and anchor identities", False, 0, str(jw))
    sq = _square_text(D)
    _identity(report, f"{name}^2 = 0", sq, len(D.ctx.generators))
    if sq is not None:
        return
    degs = _degrees(cfg, pf, (0, 3))
    _betti_into(report, f"cohomology of {name}", betti(D, degs, check=False))
    if cfg.dump_matrices:
        for k in degs:
            S, N = make_slice(D.ctx, k), make_slice(D.ctx, k + 1)
            report.matrix(f"{name}: degree {k} -> {k + 1}", matrix_of(D, S, N).rows)


def _pp(C, pi):
    from .symplectic import poisson_bracket

    return poisson_bracket(C.poisson, pi, pi)


def cmd_basic(pf, cfg, report):
    from .models import SplittingData, basic_operators, weil

    degs = _degrees(cfg, pf, (0, 4))
    if pf.kind == "weil":
        W = weil(pf.lie())
        report.text("connection: canonical (W(g) contractions d/dtheta)")
        _betti_into(report, "basic cohomology of d_W",
                    subcomplex_betti(W.contractions() + W.lie_derivatives(), W.d_w, degs, check=False))
        return
    if pf.kind not in ("algebroid", "brst"):
        raise UsageError(f"basic needs an algebroid, weil or brst file, not {pf.kind!r}")
    spec = pf.algebroid(_truncation(cfg))
    canonical = cfg.canonical_splitting or pf.data.get("compute", {}).get("canonical_splitting", False)
    if "connection" in pf.data:
        splitting = pf.connection(spec)
        entries = ", ".join(f"Gamma[{k}] = {v}" for k, v in sorted(pf.data["connection"].items()))
        report.text("connection: " + (entries or "flat (all Gamma = 0)"))
    elif canonical:
        if any(not v.is_constant() for v in spec.brackets.values()):
            raise UsageError("the canonical splitting is only defined for action algebroids "
                             "(constant structure functions)")
        splitting = SplittingData.flat()
        report.text("connection: canonical (flat splitting of an action algebroid)")
    else:
        raise UsageError(CONNECTION_REQUIRED)
    ops = basic_operators(spec, splitting)
    sq = _square_text(ops.total)
    _identity(report, "(d + L_{d_A})^2 = 0", sq, len(ops.total.ctx.generators))
    if sq is None:
        _betti_into(report, "basic cohomology", subcomplex_betti(ops.family(), ops.total, degs, check=False))


def cmd_weil(pf, cfg, report):
    from .models import weil

    if pf.kind not in ("weil", "ginzburg", "courant_action"):
        raise UsageError(f"weil needs a file with a [lie] block, not {pf.kind!r}")
    W = weil(pf.lie())
    n = len(W.ctx.generators)
    _identity(report, "d_W^2 = 0", _square_text(W.d_w), n)
    _identity(report, "[d_K*, d_K] = Euler", _eq_witness(commutator(W.d_k_star, W.d_k), W.euler), n)
    lift = _tangent_or_none(pf.lie())
    if lift is not None:
        _identity(report, "tangent lift L_{d_A} = d_CE", _eq_witness(lift.L, W.d_ce), n)
    _betti_into(report, "cohomology of d_W", betti(W.d_w, _degrees(cfg, pf, (0, 6)), check=False))


def _tangent_or_none(spec):
    from .models import tangent_lift_differential, weil

    T = tangent_lift_differential(spec)
    return T if T.ctx == weil(spec).ctx else None


def cmd_brst(pf, cfg, report):
    from .models import brst

    if pf.kind != "brst":
        raise UsageError(f"brst needs a brst file, not {pf.kind!r}")
    spec = pf.algebroid(_truncation(cfg))
    B = brst(spec)
    n = len(B.ctx.generators)
    _identity(report, "D_B^2 = 0", _square_text(B.D), n)
    _identity(report, "D_B = d + L_{d_A}", _eq_witness(B.D, B.lift.total), n)
    degs = _degrees(cfg, pf, (0, 4))
    try:
        _betti_into(report, "cohomology of D_B", betti(B.D, degs, check=False))
    except TruncationRequired as exc:
        raise UsageError(f"{exc}; add a [truncation] block, --truncation or {ingest.TRUNCATION_ENV}")


def cmd_mqk(pf, cfg, report):
    from .models import tangent_lift_differential

    spec = _algebroid_spec(pf, cfg)
    T = tangent_lift_differential(spec)
    series = conjugation_series(T.iota_da, T.d)
    n = len(T.ctx.generators)
    _identity(report, "exp(iota_{d_A}) d exp(-iota_{d_A}) = d + L_{d_A}",
              _eq_witness(exp_conjugate(T.iota_da, T.d), T.total), n)
    report.text(f"series length: {len(series)}")
    _identity(report, "d + L_{d_A} is homological", _square_text(T.total), n)


def cmd_double(pf, cfg, report):
    from .models import drinfeld_double, matched_pair_double

    if cfg.horizontal not in ("A", "B"):
        raise UsageError("double requires --horizontal A or --horizontal B")
    if pf.kind == "matched_pair":
        mp = pf.matched_pair(cfg.horizontal, _truncation(cfg))
    elif pf.kind == "bialgebra":
        bl = pf.bialgebra()
        for part, name in ((bl.g, "g"), (bl.g_dual, "g*")):
            w = jacobiator_witness(part)
            if w is not None:
                raise UsageError(f"{name} is not a Lie algebra: {w}")
        mp = dataclasses.replace(bl.matched_pair(), horizontal=cfg.horizontal)
    else:
        raise UsageError(f"double needs a matched_pair or bialgebra file, not {pf.kind!r}")
    report.text(f"horizontal factor: {cfg.horizontal}")
    D = matched_pair_double(mp, check=False)
    n = len(D.ctx.generators)
    for name, part in (("d_Abar", D.d_a_bar), ("d_Bbar", D.d_b_bar)):
        sq = _square_text(part)
        _identity(report, f"{name}^2 = 0", sq, n)
        if sq is not None:
            return
    comm = D.compatibility()
    if comm.is_zero():
        report.identity("[d_Abar, d_Bbar] = 0", True, n)
    else:
        i = min(comm.images)
        report.identity("[d_Abar, d_Bbar] = 0", False, 0,
                        f"nonzero on {D.ctx.generators[i].name}: {comm.images[i]}")
        return
    _identity(report, "total differential is homological", _square_text(D.total), n)
    _identity(report, "total = direct-sum differential", _eq_witness(D.total, D.direct_sum_differential()), n)
    _betti_into(report, "basic cohomology", D.basic_betti(_degrees(cfg, pf, (0, 2))))


def cmd_ginzburg(pf, cfg, report):
    from .cohomology import basis_elements, joint_kernel
    from .models import ginzburg_model, restricted_equal

    if pf.kind != "ginzburg":
        raise UsageError(f"ginzburg needs a ginzburg file, not {pf.kind!r}")
    spec, lie, a_tilde = pf.ginzburg(_truncation(cfg))
    G = ginzburg_model(spec, lie, a_tilde)
    n = len(G.ctx.generators)
    _identity(report, "total differential is homological", _square_text(G.total), n)
    _identity(report, "exp(-Q) (d_A + d_K) exp(Q) = total", _eq_witness(G.conjugated(), G.total), n)
    _identity(report, "total = BRST form", _eq_witness(G.brst_form(), G.total), n)
    degs = _degrees(cfg, pf, (0, 4))
    fam = G.basic_family()
    checked, bad = 0, None
    for k in degs:
        S = make_slice(G.ctx, k)
        els = basis_elements(S, joint_kernel(fam, S))
        from .derivations import apply

        for e in els:
            checked += 1
            if apply(G.total, e) != apply(G.cartan_differential(), e):
                bad = bad or f"differs on {e}"
    if bad is None:
        report.identity("total = d_A - dtheta^i iota_{a(v_i)} on basic elements", True, checked)
    else:
        report.identity("total = d_A - dtheta^i iota_{a(v_i)} on basic elements", False, 0, bad)
    _betti_into(report, "basic cohomology", subcomplex_betti(fam, G.total, degs, check=False))


def cmd_poisson(pf, cfg, report):
    from .symplectic import derived_bracket, poisson_differential, poisson_structure_check

    if pf.kind != "poisson":
        raise UsageError(f"poisson needs a poisson file, not {pf.kind!r}")
    C, pi = pf.poisson(_truncation(cfg))
    report.text(f"pi = {pi}")
    if not poisson_structure_check(C.poisson, pi):
        report.identity("[pi, pi] = 0", False, 0, f"[pi, pi] = {_pp(C, pi)}")
        return
    report.identity("[pi, pi] = 0", True, 1)
    count, bad = 0, None
    comps = {tuple(k.split(",")): C.ctx.parse(v) for k, v in pf.data.get("bivector", {}).items()}
    for i in C.base:
        for j in C.base:
            want = comps.get((i, j)) or (-comps[(j, i)] if (j, i) in comps else C.ctx.zero())
            got = derived_bracket(C.poisson, pi, C.ctx.gen(i), C.ctx.gen(j))
            count += 1
            if got != want and bad is None:
                bad = f"{{{i},{j}}} = {got}, expected {want}"
    _identity(report, "derived bracket {{x^i, pi}, x^j} = pi^ij", bad, count)
    D = poisson_differential(C.poisson, pi)
    rec = anchor_and_bracket_from_differential(C.chart(), D)
    report.text(f"recovered algebroid on T*M: {len(rec.anchor_table)} anchor entries, "
                f"{len(rec.structure_table)} structure functions")
    _betti_into(report, "cohomology of d_pi", betti(D, _degrees(cfg, pf, (0, 2)), check=False))


def cmd_courant(pf, cfg, report):
    from .symplectic import CourantError, courant_lifted_action

    if pf.kind != "courant_action":
        raise UsageError(f"courant needs a courant_action file, not {pf.kind!r}")
    try:
        model, lie, imgs = pf.courant()
    except CourantError as exc:
        raise UsageError(str(exc))
    n = len(model.ctx.generators)
    report.text(f"Theta = {model.theta}")
    _identity(report, "{Theta, Theta} = 0", _square_text(model.delta), n)
    try:
        rep = courant_lifted_action(model, lie, imgs)
    except CourantError as exc:
        report.identity("lifted action", False, 0, f"{exc} (value: {exc.value})")
        return
    report.identity("image is isotropic", True, len(lie.labels) ** 2)
    report.identity("lifted action is a homomorphism", True, rep.homomorphism_pairs)
    report.identity("delta + d_K is morphic", True, n)


HANDLERS = {
    "verify": cmd_verify, "cohomology": cmd_cohomology, "basic": cmd_basic, "weil": cmd_weil,
    "brst": cmd_brst, "mqk": cmd_mqk, "double": cmd_double, "ginzburg": cmd_ginzburg,
    "poisson": cmd_poisson, "courant": cmd_courant,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qalg", description="Exact checks for Lie and Q-algebroid structures.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("input")
        s.add_argument("--degrees", type=_degree_range, help="inclusive range LO..HI")
        s.add_argument("--truncation", type=int, help=f"truncation bound (default: file, then ${ingest.TRUNCATION_ENV})")
        s.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
        s.add_argument("--output", help="write the report here instead of stdout")
        if name == "basic":
            s.add_argument("--canonical-splitting", action="store_true")
        if name == "double":
            s.add_argument("--horizontal", choices=("A", "B"), required=True)
        if name == "cohomology":
            s.add_argument("--dump-matrices", action="store_true")
    return p


def run(cfg: CommandConfig) -> Tuple[int, bytes]:
    """Execute one command; returns the exit status and the rendered report."""
    report = Report(f"{cfg.command} {os.path.basename(cfg.path)}")
    try:
        pf = ingest.load(cfg.path)
        HANDLERS[cfg.command](pf, cfg, report)
    except InputError as exc:
        return EXIT_INPUT, ("input error:\n" + "\n".join("  " + e for e in exc.errors) + "\n").encode("utf-8")
    except OSError as exc:
        return EXIT_INPUT, f"input error: {exc}\n".encode("utf-8")
    except (UsageError, TruncationRequired, SpecError) as exc:
        return EXIT_INPUT, f"input error: {exc}\n".encode("utf-8")
    except (NotHomological, AlgebraError) as exc:
        report.identity("computation", False, 0, str(exc))
    return (EXIT_FAIL if report.failed else EXIT_OK), ingest.emit_report(report, cfg.fmt)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = CommandConfig(args.command, args.input, args.degrees, args.truncation, args.fmt, args.output,
                        getattr(args, "canonical_splitting", False), getattr(args, "horizontal", None),
                        getattr(args, "dump_matrices", False))
    status, out = run(cfg)
    if status == EXIT_INPUT:
        sys.stderr.write(out.decode("utf-8"))
    elif cfg.output:
        with open(cfg.output, "wb") as fh:
            fh.write(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
