"""Command-line scenario runner.

    zerocyc verify [--config F | --scenario NAME] [--suite S ...]
    zerocyc filtration ...
    zerocyc symbols eval "{P1,P2}_2"
    zerocyc cohomology [--delta 17] [--symbol "{P1,P2}_1"]

Exit codes: 0 ok, 1 a check failed, 2 bad config or input, 3 a size cap was
exceeded, 4 an internal invariant broke.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .abgroup import quotient
from .gcoh import ScenarioError, cohomology, kummer_data, sn_pair_data, somekawa_s, wedge_descend
from .scenarios import BUNDLED, SUITES, ConfigError, Scenario, build_model, load
from .suites import FINITE_QUOTIENT_TAG, Context, run_suites
from .symbols import layer_for, parse_symbol
from .tower import CapExceeded

SCHEMA = "zerocyc.report/1"
CAVEATS = {
    "cycles": "zero-cycles up to Frobenius, no rational equivalence",
    "symbols": "proxy target: multilinearity, the projection-formula relation and symmetry only; the reciprocity relation is not imposed",
    "cohomology": "Galois cohomology of the finite quotient Z/N",
}
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP, EXIT_INVARIANT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="TOML scenario file")
    src.add_argument("--scenario", choices=sorted(BUNDLED), help="bundled scenario (default: 'default')")
    p.add_argument("--seed", type=int, help="sampling seed (non-negative)")
    p.add_argument("--cap", type=int, help="largest point count to enumerate")
    p.add_argument("--rmax", type=int, help="largest arity (1..3)")
    p.add_argument("--n", type=int, help="torsion level for the Kummer computations")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timings", action="store_true", help="add wall times (makes reports non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zerocyc", description="Zero-cycle filtrations, symbols and Galois cohomology on finite models.")
    parser.add_argument("--version", action="version", version=f"zerocyc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run verification suites")
    _common(p)
    p.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable; default all)")

    p = sub.add_parser("filtration", help="cokernels of the filtration subgroups")
    _common(p)

    p = sub.add_parser("symbols", help="symbol utilities")
    ssub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = ssub.add_parser("eval", help="parse and resolve a symbol expression")
    _common(e)
    e.add_argument("expr", help='e.g. "2*{P1,P2}_2 - {P0,P3}_1"')
    e.add_argument("--base", type=int, default=1, help="base level of the symbols")

    p = sub.add_parser("cohomology", help="H^i tables, delta and s_n")
    _common(p)
    p.add_argument("--delta", type=int, action="append", default=[], help="point index to apply delta to (repeatable)")
    p.add_argument("--symbol", action="append", default=[], help="symbol expression to apply s_n to (repeatable)")
    return parser


def resolve_scenario(args) -> Scenario:
    if args.config:
        sc = load(args.config)
    else:
        sc = BUNDLED[args.scenario or "default"]
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed must be non-negative")
    if args.rmax is not None and not 1 <= args.rmax <= 3:
        raise ConfigError("--rmax must be between 1 and 3")
    if args.cap is not None and args.cap < 1:
        raise ConfigError("--cap must be positive")
    if args.n is not None and args.n < 1:
        raise ConfigError("--n must be positive")
    suites = tuple(dict.fromkeys(args.suite)) if getattr(args, "suite", None) else None
    return sc.replace(seed=args.seed, cap=args.cap, r_max=args.rmax, n=args.n, suites=suites)


def _model_echo(model) -> dict:
    return {
        "kind": model.kind,
        "dimension": 1 if model.kind == "elliptic" else "undefined (mock)",
        "order": model.size,
        "invariants": list(model.group.invariant_factors),
        "levels": {str(m): model.level_subgroup(m).order() for m in model.levels},
    }


def _envelope(command: str, sc: Scenario, model) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "scenario": sc.echo(),
        "model": _model_echo(model),
        "caveats": CAVEATS,
    }


# -- subcommands ---------------------------------------------------------------------


def cmd_verify(sc: Scenario, model, timings: dict | None) -> tuple[dict, int]:
    ctx = Context(model, sc.r_max, sc.n, sc.seed)
    checks = []
    for name in sc.suites:
        t = time.perf_counter()
        checks.extend(run_suites(ctx, [name]))
        if timings is not None:
            timings[name] = round(time.perf_counter() - t, 3)
    checks.sort(key=lambda rec: rec["id"])
    summary = {s: sum(rec["status"] == s for rec in checks) for s in ("pass", "fail", "skip")}
    report = {"checks": checks, "summary": summary}
    return report, EXIT_FAIL if summary["fail"] else EXIT_OK


def cmd_filtration(sc: Scenario, model, timings: dict | None) -> tuple[dict, int]:
    layer = layer_for(model, max(sc.r_max, 3))
    sp = layer.space

    def coker(lat) -> list[int]:
        return list(quotient(sp.ambient, layer.subgroup(lat)).group.invariant_factors)

    rows = []
    for r in range(1, sc.r_max + 2):
        t = time.perf_counter()
        row = {"r": r, "F": coker(layer.f_lattice(r)), "G": coker(layer.g_lattice(r))}
        if r >= 2:
            R = layer.r_lattice(r - 1)
            row["R"] = coker(R)
            row["B"] = coker(layer.b_lattice(r))
            row["R_equals_G"] = R == layer.g_lattice(r)
            row["R_equals_F"] = R == layer.f_lattice(r)
        if timings is not None:
            timings[f"r{r}"] = round(time.perf_counter() - t, 3)
        rows.append(row)
    return {"orbits": sp.rank, "cokernels": rows}, EXIT_OK


def cmd_symbols_eval(sc: Scenario, model, expr: str, base: int) -> tuple[dict, int]:
    s = parse_symbol(expr, base)
    if s.r > 3:
        raise ValueError("arity above 3 is not supported")
    layer = layer_for(model, max(sc.r_max, 3))
    s.validate(model)
    T, _ = layer.target(s.r)
    return {"symbol": str(s), "arity": s.r, "base": s.base, "target": list(T.invariant_factors), "target_moduli": list(T.moduli), "resolved": list(layer.resolve(s))}, EXIT_OK


def cmd_cohomology(sc: Scenario, model, deltas, symbols) -> tuple[dict, int]:
    kd = kummer_data(model, sc.n)
    base = kd.module
    tables = []
    for r in range(1, sc.r_max + 1):
        M = base.tensor_power(r)
        W, _ = base.wedge(r)
        for i in range(0, 3):
            tables.append({"module": f"A[{sc.n}]^(x{r})", "i": i, "invariants": list(cohomology(M, i).invariant_factors)})
            tables.append({"module": f"wedge^{r} A[{sc.n}]", "i": i, "invariants": list(cohomology(W, i).invariant_factors)})
    out = {"n": sc.n, "torsion": list(base.group.invariant_factors), "tag": FINITE_QUOTIENT_TAG, "tables": tables}
    if deltas:
        vals = []
        for a in deltas:
            if not 0 <= a < model.size:
                raise ValueError(f"no point P{a}")
            c = kd.delta(a, model.level_of(a))
            vals.append({"point": a, "level": c.m, "h1": list(cohomology(base, 1, c.m).invariant_factors), "class": list(c.normal_form)})
        out["delta"] = vals
    if symbols:
        vals = []
        for text in symbols:
            s = parse_symbol(text)
            x = somekawa_s(kd, s)
            w = wedge_descend(kd, x)
            vals.append({"symbol": str(s), "s_n": list(x.normal_form), "wedge": list(w.normal_form)})
        out["s_n"] = vals
    if sc.r_max >= 2:
        out["s_n_pairs"] = sn_pair_data(layer_for(model, max(sc.r_max, 3)), kd)
    return out, EXIT_OK


# -- output ---------------------------------------------------------------------------


def render_text(report: dict) -> str:
    lines = [f"zerocyc {report['version']}  {report['command']}  scenario={report['scenario']['name']}"]
    lines.append(f"model: {report['model']['kind']}, |A(U)| = {report['model']['order']}, invariants {report['model']['invariants']}")
    if "checks" in report:
        for rec in report["checks"]:
            lines.append(f"{rec['status'].upper():4}  {rec['id']:28}  {rec['claim']}")
        s = report["summary"]
        lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
    else:
        body = {k: v for k, v in report.items() if k not in ("schema", "version", "command", "scenario", "model", "caveats", "timings")}
        lines.append(json.dumps(body, sort_keys=True, indent=2))
    if "timings" in report:
        lines.append("timings: " + json.dumps(report["timings"], sort_keys=True))
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return render_text(report)
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = resolve_scenario(args)
        model = build_model(sc.model, sc.cap, sc.seed)
        timings = {} if args.timings else None
        cmd = args.command
        if cmd == "verify":
            body, code = cmd_verify(sc, model, timings)
        elif cmd == "filtration":
            body, code = cmd_filtration(sc, model, timings)
        elif cmd == "symbols":
            cmd = "symbols eval"
            body, code = cmd_symbols_eval(sc, model, args.expr, args.base)
        else:
            body, code = cmd_cohomology(sc, model, args.delta, args.symbol)
        report = _envelope(cmd, sc, model)
        report.update(body)
        if timings is not None:
            report["timings"] = timings
    except ConfigError as exc:
        print(f"zerocyc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"zerocyc: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ScenarioError as exc:
        print(f"zerocyc: scenario error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except AssertionError as exc:
        print(f"zerocyc: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"zerocyc: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_FAIL and "checks" in report:
        for rec in report["checks"]:
            if rec["status"] == "fail":
                print(f"zerocyc: FAIL {rec['id']}: {rec['claim']}", file=sys.stderr)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
