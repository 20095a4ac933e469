"""``powidx`` command line: index, check and reproduce.

Exit codes: 0 success, 2 unreadable input, 3 size cap exceeded, 4 failed
precondition or unusable numerics mode. ``reproduce`` exits 1 when a fixture
fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import binary as B
from . import jk as J
from .continuous import ContinuousGame, bzi_continuous, ssi_continuous, structural_checks
from .density import bzi_density, ssi_density
from .errors import InputError, ParseError, PowidxError
from .io import load_density, load_game
from .profile import NumericsSpec, normalize

METHOD_ALIASES = {"exact": "exact", "quadrature": "quadrature", "mc": "monte_carlo", "auto": "auto"}
INDICES = ("ssi", "bzi", "bzi_normalized", "nucleolus")


def render(v):
    """JSON-ready value: rationals as "p/q" strings, arrays as lists."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {str(k): render(x) for k, x in v.items()}
    if isinstance(v, (set, frozenset)):
        return [render(x) for x in sorted(v)]
    if isinstance(v, (list, tuple, np.ndarray)):
        return [render(x) for x in v]
    if isinstance(v, B.Coalition):
        return list(v.members)
    if v is None:
        return None
    return str(v)


def dump_json(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _text_value(v):
    if isinstance(v, list):
        return "(" + ", ".join(_text_value(x) for x in v) + ")"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _spec(args) -> NumericsSpec:
    return NumericsSpec(
        mode=METHOD_ALIASES[args.method],
        quadrature_order=args.order,
        mc_samples=args.samples,
        seed=args.seed,
        workers=args.workers,
    )


def _profile_report(prof, game_class):
    rep = {
        "class": game_class,
        "index": prof.index,
        "method": prof.method,
        "values": render(prof.values),
    }
    if prof.method == "monte_carlo":
        rep["seed"] = prof.seed
    if prof.method != "exact":
        rep["errors"] = render(prof.errors) if prof.errors is not None else None
        rep["error_bound"] = render(prof.error_bound)
    return rep


def _index(game, args, spec):
    density = load_density(args.density) if args.density else None
    if density is not None and not isinstance(game, ContinuousGame):
        raise InputError("--density applies to continuous games only")
    if isinstance(game, B.BinaryGame):
        cls = "binary"
        if args.index == "ssi":
            prof = B.ssi_binary(game)
        elif args.index == "nucleolus":
            prof = B.nucleolus_binary(game)
        else:
            prof = B.bzi_binary(game)
    elif isinstance(game, J.JKGame):
        cls = "jk"
        if args.index == "nucleolus":
            raise InputError("the nucleolus is not defined here for (j,k) games")
        prof = J.ssi_jk(game, spec) if args.index == "ssi" else J.bzi_jk(game)
    else:
        cls = "continuous"
        if args.index == "nucleolus":
            if density is not None:
                raise InputError("--density is not supported with the nucleolus")
            return _nucleolus_report(game, spec), None
        if args.index == "ssi":
            prof = ssi_density(game, density, spec) if density else ssi_continuous(game, spec)
        else:
            prof = bzi_density(game, density, spec) if density else bzi_continuous(game, spec)
    if args.index == "bzi_normalized":
        prof = normalize(prof)
    return _profile_report(prof, cls), None


def _nucleolus_report(game, spec):
    from .nucleolus import nucleolus_search

    res = nucleolus_search(game, spec)
    curves = [
        {"w": render(c.w), "c": render(c.grid), "volume": render(c.volumes), "stderr": render(c.stderr)}
        for c in res.curves
    ]
    return {
        "class": "continuous",
        "index": "nucleolus",
        "phase": res.phase,
        "w_star": render(res.w_star),
        "max_excess": float(res.max_excess),
        "box_bounds": render(res.box_bounds),
        "rounds": res.rounds,
        "seed": spec.seed,
        "curves": curves,
    }


def _check(game, spec):
    if isinstance(game, B.BinaryGame):
        props = B.properties(game)
        n = game.n
        pairs = {f"{i}-{j}": B.desirability(game, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        return {
            "class": "binary",
            "proper": props["proper"],
            "strong": props["strong"],
            "constant_sum": props["constant_sum"],
            "complete": B.is_complete(game),
            "null_voters": render(B.null_voters(game)),
            "desirability": pairs,
            "witnesses": render(props["witnesses"]),
        }
    if isinstance(game, J.JKGame):
        return {"class": "jk", "jk_simple": J.is_jk_simple(game)}
    chk = structural_checks(game, spec)
    return {
        "class": "continuous",
        "method": chk["method"],
        "proper": chk["proper"],
        "strong": chk["strong"],
        "constant_sum": chk["constant_sum"],
        "complete": chk["complete"],
        "null_voters": render(chk["null_voters"]),
        "witnesses": render(chk["witnesses"]),
    }


def _emit_text(report, out):
    for key in sorted(report):
        val = report[key]
        if key == "curves":
            out.write(f"curves: {len(val)} evaluated (use --output json or csv for samples)\n")
            continue
        if isinstance(val, bool):
            val = "yes" if val else "no"
        elif isinstance(val, dict):
            val = ", ".join(f"{k}={_text_value(v) if v is not None else '-'}" for k, v in sorted(val.items()))
        else:
            val = _text_value(val) if val is not None else "-"
        out.write(f"{key}: {val}\n")


def _emit_csv(report, out):
    wr = csv.writer(out, lineterminator="\n")
    if "curves" in report:
        n = len(report["w_star"])
        wr.writerow([f"w{i + 1}" for i in range(n)] + ["c", "volume", "stderr"])
        for cv in report["curves"]:
            for c, v, s in zip(cv["c"], cv["volume"], cv["stderr"]):
                wr.writerow([repr(x) for x in cv["w"]] + [repr(c), repr(v), repr(s)])
        return
    if "values" in report:
        wr.writerow(["voter", "value", "error"])
        errs = report.get("errors") or [0] * len(report["values"])
        for i, (v, e) in enumerate(zip(report["values"], errs), start=1):
            wr.writerow([i, v, e])
        return
    wr.writerow(["property", "verdict"])
    for k in sorted(report):
        if not isinstance(report[k], (dict, list)):
            wr.writerow([k, report[k]])


def _emit(report, fmt, out):
    if fmt == "json":
        out.write(dump_json(report))
    elif fmt == "csv":
        _emit_csv(report, out)
    else:
        _emit_text(report, out)


def _reproduce(args, out):
    from . import reproduce as R

    results = R.run(only=args.only, seed=args.seed, samples=args.samples)
    if args.output == "json":
        out.write(dump_json([r.__dict__ for r in results]))
    elif args.output == "csv":
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(["status", "group", "name", "expected", "computed", "tolerance", "note"])
        for r in results:
            wr.writerow([r.status, r.group, r.name, r.expected, r.computed, r.tolerance, r.note])
    else:
        for r in results:
            out.write(f"{r.status:5s} [{r.group}] {r.name}: expected {r.expected}, computed {r.computed}, tol {r.tolerance}\n")
            if r.note and r.status != "PASS":
                out.write(f"      note: {r.note}\n")
        counts = {s: sum(r.status == s for r in results) for s in ("PASS", "FAIL", "NOTED")}
        out.write(f"{counts['PASS']} passed, {counts['FAIL']} failed, {counts['NOTED']} noted\n")
    return 0 if R.all_passed(results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", choices=sorted(METHOD_ALIASES), default="auto")
    common.add_argument("--order", type=int, default=16, help="Gauss-Legendre points per axis")
    common.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--output", choices=("text", "json", "csv"), default="text")

    p = argparse.ArgumentParser(prog="powidx", description="Voting power indices for binary, (j,k) and continuous games.")
    sub = p.add_subparsers(dest="command", required=True)
    ix = sub.add_parser("index", parents=[common], help="compute a power index")
    ix.add_argument("--game", required=True)
    ix.add_argument("--index", choices=INDICES, default="ssi")
    ix.add_argument("--density", help="vote density file (continuous games)")
    ck = sub.add_parser("check", parents=[common], help="structural properties with witnesses")
    ck.add_argument("--game", required=True)
    rp = sub.add_parser("reproduce", parents=[common], help="run the published worked examples")
    rp.add_argument("--only", help="group name or substring of fixture names")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            return _reproduce(args, out)
        spec = _spec(args)
        game = load_game(args.game)
        if args.command == "index":
            report, _ = _index(game, args, spec)
        else:
            report = _check(game, spec)
        _emit(report, args.output, out)
        return 0
    except PowidxError as exc:
        msg = f"error: {exc}"
        if getattr(exc, "cap", None) is not None:
            msg += f" (cap: {exc.cap})"
        print(msg, file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run(argv) -> tuple:
    """Run the CLI in-process and return ``(exit_code, stdout_text)``."""
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
