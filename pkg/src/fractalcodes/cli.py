"""Command-line interface.

Every subcommand also accepts ``--config FILE``: a JSON object whose keys are
the subcommand's long flag names (dashes or underscores). Values from the file
act as defaults and explicit flags override them; unknown keys are rejected.

Exit codes: 0 success, 2 invalid input or failed precondition, 3 search
budget exceeded (a partial JSON report is still written, flagged ``partial``).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from .algebra import LaurentPoly, Open, Periodic, parse_poly
from .algrel import report as algrel_report
from .codes import (
    build_model, catalog, distance_bruteforce, instantiate, logical_count, spec_from_text,
    spec_to_text,
)
from .errors import BudgetExceeded, FractalCodesError
from .fractalizer import LcaRuleSet, fractalize_code
from .lca import hausdorff_estimate, render_pbm, reversible, run
from .search import DEFAULT_BUDGET
from .subsystem import (
    build_bacon_shor, build_bbs, build_fbbs, build_fbs, eta_estimate, family, logical_qudits,
    tradeoff_report,
)
from .threestep import build_M, cx_synthesize, verify_three_step

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


class CliError(Exception):
    pass


# helpers

def _poly(text: str, p: int, default_var: str = "y") -> LaurentPoly:
    """One-variable polynomial in ``x`` or ``y`` (whichever letter appears)."""
    name = "x" if "x" in text and "y" not in text else default_var
    if "x" in text and "y" in text:
        raise CliError(f"polynomial {text!r} mixes x and y")
    return parse_poly(text, p, [name])


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_spec(args):
    if args.input and args.name:
        raise CliError("give either --in or --name, not both")
    if args.input:
        with open(args.input, encoding="ascii") as fh:
            spec = spec_from_text(fh.read())
        if args.p is not None and args.p != spec.p:
            raise CliError(f"--p {args.p} differs from the code file's p={spec.p}")
        return spec
    if args.name:
        return build_model(args.name, args.p if args.p is not None else 2)
    raise CliError("a code is required: --in FILE or --name MODEL")


def _rules(args, p: int, D: Optional[int] = None) -> LcaRuleSet:
    if args.rules:
        with open(args.rules, encoding="ascii") as fh:
            rs = LcaRuleSet.from_text(fh.read())
        if rs.p != p:
            raise CliError("rule file field differs from the code's field")
        return rs
    polys = [getattr(args, f"f{i}") for i in range(1, 5)]
    given = [f for f in polys if f is not None]
    if D is not None and len(given) == 1 and D > 1:
        given = given * D  # one rule shared by every axis
    if not given or (D is not None and len(given) != D):
        raise CliError(f"need one rule per spatial axis (--f1..--f{D or 4}) or --rules FILE")
    return LcaRuleSet.first_order([_poly(f, p) for f in given])


def _boundary(sizes: Sequence[int], open_axes: Sequence[int]):
    open_axes = set(open_axes or [])
    if any(a < 0 or a >= len(sizes) for a in open_axes):
        raise CliError(f"--open axis out of range for {len(sizes)} axes")
    return tuple(Open() if i in open_axes else Periodic(L) for i, L in enumerate(sizes))


def _timed(args, start: float, out: dict) -> dict:
    if not args.no_timing:
        out["elapsed_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    return out


# commands

def cmd_catalog(args) -> int:
    _emit(_json(catalog()), args.out)
    return EXIT_OK


def cmd_model(args) -> int:
    _emit(spec_to_text(build_model(args.name, args.p)), args.out)
    return EXIT_OK


def cmd_fractalize(args) -> int:
    spec = _load_spec(args)
    rules = _rules(args, spec.p, spec.D)
    _emit(spec_to_text(fractalize_code(spec, rules, args.label)), args.out)
    return EXIT_OK


def cmd_params(args) -> int:
    start = time.perf_counter()
    spec = _load_spec(args)
    if not args.L or len(args.L) != spec.D:
        raise CliError(f"--L needs {spec.D} sizes")
    inst = instantiate(spec, args.L, _boundary(args.L, args.open))
    out = {"model": spec.name, "p": spec.p, "sizes": list(args.L), "n": inst.n,
           "k": logical_count(inst), "d": None, "wmax": args.wmax}
    code = EXIT_OK
    if args.wmax:
        try:
            res = distance_bruteforce(inst, args.wmax, args.threads, args.budget)
            out.update(d=res.d, d_x=res.d_x, d_z=res.d_z)
        except BudgetExceeded as exc:
            out.update(partial=True, ruled_out_below=exc.partial["ruled_out_below"], message=str(exc))
            code = EXIT_BUDGET
    _emit(_json(_timed(args, start, out)), args.out)
    return code


def cmd_lca(args) -> int:
    f = _poly(args.rule, args.p, "x")
    if args.action == "run":
        c0 = _poly(args.init, args.p, "x") if args.init else LaurentPoly.one(args.p, 1)
        traj = run(f, c0, args.steps)
        data = render_pbm(traj, args.width)
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.write(data.decode("ascii"))
        return EXIT_OK
    if args.action == "reversible":
        if not args.L:
            raise CliError("--L is required for reversibility")
        inv = reversible(f, args.L)
        out = {"rule": f.pretty(["x"]), "sizes": list(args.L), "reversible": inv is not None,
               "inverse": inv.pretty(["x"]) if inv is not None else None}
        _emit(_json(out), args.out)
        return EXIT_OK
    out = {"rule": f.pretty(["x"]), "T": args.steps,
           "hausdorff_dimension": hausdorff_estimate(f, args.steps)}
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_algrel(args) -> int:
    texts = [t for t in args.polys.split(",") if t.strip()]
    if not 2 <= len(texts) <= 4:
        raise CliError("--polys takes two to four comma-separated polynomials")
    fs = [_poly(t.strip(), args.p) for t in texts]
    out = algrel_report(fs, args.bound)
    out["polys"] = [f.pretty(["y"]) for f in fs]
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_threestep_verify(args) -> int:
    start = time.perf_counter()
    spec = _load_spec(args)
    rules = _rules(args, spec.p, spec.D)
    sizes = list(args.L or [])
    if len(sizes) != spec.D + rules.m:
        raise CliError(f"--L needs {spec.D + rules.m} sizes (code axes then y)")
    bc = _boundary(sizes, args.open)
    out = verify_three_step(spec, rules, sizes, bc)
    if args.circuit:
        LM = build_M(rules, sizes, bc, N=spec.N)
        with open(args.circuit, "w", encoding="ascii") as fh:
            fh.write(cx_synthesize(LM.M, rules.p, allow_zero_diagonal=True).to_text())
    _emit(_json(_timed(args, start, out)), args.out)
    return EXIT_OK


def _read_K(path: str) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        rows = [[int(v) for v in ln.split()] for ln in fh if ln.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise CliError("K file must hold a rectangular 0/1 matrix, one row per line")
    return np.array(rows, dtype=np.int64)


def cmd_subsystem(args) -> int:
    start = time.perf_counter()
    L = list(args.L or [])
    p = args.p
    model = args.model
    f1 = _poly(args.f1, p) if args.f1 else None
    f2 = _poly(args.f2, p) if args.f2 else None
    if model in ("fbs", "fbbs") and (f1 is None or f2 is None):
        raise CliError(f"--f1 and --f2 are required for {model}")
    if model == "bs":
        if len(L) != 2:
            raise CliError("bs needs --L L1 L2")
        g = build_bacon_shor(L[0], L[1], p)
        D = 2
    elif model == "fbs":
        if len(L) != 3:
            raise CliError("fbs needs --L L1 L2 L3")
        g = build_fbs(L[0], L[1], L[2], f1, f2, p, pad=args.pad)
        D = 3
    elif model == "bbs":
        if not args.K:
            raise CliError("bbs needs --K FILE")
        g = build_bbs(_read_K(args.K), p)
        D = 2
    else:
        if not args.K or len(L) != 1:
            raise CliError("fbbs needs --K FILE and --L L3")
        g = build_fbbs(_read_K(args.K), f1, f2, L[0], p)
        D = 3
    code = EXIT_OK
    try:
        out = tradeoff_report(g, D, args.wmax, args.threads, args.budget).as_dict()
    except BudgetExceeded as exc:
        k = exc.partial.get("k", logical_qudits(g))
        lower = exc.partial["ruled_out_below"]
        out = {"n": g.n, "k": k, "d": lower, "d_is_lower_bound": True, "wmax": args.wmax, "D": D,
               "tradeoff_ratio": k * lower ** (1.0 / (D - 1)) / g.n, "partial": True,
               "message": str(exc)}
        code = EXIT_BUDGET
    out["model"] = model
    out["p"] = p
    out["meta"] = g.meta
    out["eta"] = None
    if args.eta_sizes:
        if model not in ("bs", "fbs"):
            raise CliError("--eta-sizes is available for bs and fbs")
        fam = family(model, p, f1, f2, L[2] if model == "fbs" else None, args.pad)
        eta = eta_estimate(fam, args.eta_sizes, args.wmax, args.threads, args.budget)
        out["eta"] = eta.as_dict()
    _emit(_json(_timed(args, start, out)), args.out)
    return code


# parser

def _common(sp: argparse.ArgumentParser, p_default: Optional[int] = 2) -> None:
    sp.add_argument("--config", help="JSON file of flag values")
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument("--p", type=int, default=p_default, help="field characteristic")


def _code_source(sp):
    sp.add_argument("--in", dest="input", help="code spec file")
    sp.add_argument("--name", help="zoo model name")


def _rule_flags(sp):
    for i in range(1, 5):
        sp.add_argument(f"--f{i}", help=f"rule polynomial in y for axis {i}")
    sp.add_argument("--rules", help="rule-set file (needed for higher-order rules)")


def _search_flags(sp, wmax_default=None):
    sp.add_argument("--wmax", type=int, default=wmax_default, help="largest weight searched")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="candidate budget")
    sp.add_argument("--threads", type=int, default=1, help="worker threads for enumeration")
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed_ms for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractalcodes", description="Fractal CSS and subsystem codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("catalog", help="list zoo models")
    _common(sp)
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("model", help="write a zoo model spec")
    _common(sp)
    sp.add_argument("--name", required=False)
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("fractalize", help="fractalize a code spec")
    _common(sp, None)
    _code_source(sp)
    _rule_flags(sp)
    sp.add_argument("--label", help="name of the fractalized code")
    sp.set_defaults(func=cmd_fractalize)

    sp = sub.add_parser("params", help="n, k and d of a code on a finite lattice")
    _common(sp, None)
    _code_source(sp)
    sp.add_argument("--L", type=int, nargs="+", help="lattice sizes")
    sp.add_argument("--open", type=int, nargs="*", default=[], help="axes with open boundaries")
    _search_flags(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("lca", help="linear cellular automata")
    _common(sp)
    sp.add_argument("action", nargs="?", default="run", choices=["run", "reversible", "dimension"])
    sp.add_argument("--rule", required=False, help="rule polynomial in x")
    sp.add_argument("--steps", type=int, default=7, help="number of updates (or T for the dimension)")
    sp.add_argument("--init", help="initial state polynomial (default 1)")
    sp.add_argument("--width", type=int, help="image width")
    sp.add_argument("--L", type=int, nargs="+", help="torus sizes for reversibility")
    sp.set_defaults(func=cmd_lca)

    sp = sub.add_parser("algrel", help="bounded search for algebraic relations")
    _common(sp)
    sp.add_argument("--polys", required=False, help="comma-separated polynomials")
    sp.add_argument("--bound", type=int, default=6, help="largest exponent tried")
    sp.set_defaults(func=cmd_algrel)

    sp = sub.add_parser("threestep-verify", help="compare the three-step pipeline with fractalization")
    _common(sp, None)
    _code_source(sp)
    _rule_flags(sp)
    sp.add_argument("--L", type=int, nargs="+", help="sizes: code axes then y axes")
    sp.add_argument("--open", type=int, nargs="*", default=[], help="axes with open boundaries")
    sp.add_argument("--circuit", help="write the CX circuit for M to this file")
    sp.add_argument("--no-timing", action="store_true", help="omit elapsed_ms")
    sp.set_defaults(func=cmd_threestep_verify)

    sp = sub.add_parser("subsystem", help="Bacon-Shor family reports")
    _common(sp)
    sp.add_argument("--model", choices=["bs", "fbs", "bbs", "fbbs"], default="bs")
    sp.add_argument("--L", type=int, nargs="+", help="sizes")
    sp.add_argument("--f1", help="rule along x1")
    sp.add_argument("--f2", help="rule along x2")
    sp.add_argument("--K", help="file with the 0/1 site matrix")
    sp.add_argument("--pad", action="store_true", help="open y axis padded at both ends")
    sp.add_argument("--eta-sizes", type=int, nargs="+", help="square sizes for the eta fit")
    _search_flags(sp, wmax_default=6)
    sp.set_defaults(func=cmd_subsystem)
    return parser


_REQUIRED = {"model": ["name"], "lca": ["rule"], "algrel": ["polys"]}


def _apply_config(parser: argparse.ArgumentParser, argv: List[str], args) -> argparse.Namespace:
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise CliError("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    dests = {a.dest: a for a in sub._actions if a.dest not in ("help", "config", "func")}  # noqa: SLF001
    alias = {a.option_strings[0].lstrip("-").replace("-", "_"): a.dest
             for a in dests.values() if a.option_strings}
    alias.update({d: d for d in dests})
    defaults = {}
    unknown = []
    for key, value in cfg.items():
        dest = alias.get(key.replace("-", "_"))
        if dest is None:
            unknown.append(key)
        else:
            defaults[dest] = value
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args = _apply_config(parser, argv, args)
        for key in _REQUIRED.get(args.command, []):
            if getattr(args, key) is None:
                raise CliError(f"--{key} is required")
        if getattr(args, "threads", 1) < 1:
            raise CliError("--threads must be at least 1")
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stdout.write(_json({"partial": True, "message": str(exc), **(exc.partial or {})}))
        return EXIT_BUDGET
    except (CliError, FractalCodesError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
