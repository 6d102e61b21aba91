"""Command-line front end: ``msdp solve | gen | bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional

from . import kernels
from .adapters.cmdp import RuleSpaceTooLarge
from .adapters.dfa import assemble_sequence, orient_for_assembly
from .baselines import SaConfig, SearchSpaceTooLarge, exhaustive_search, simulated_annealing
from .core import InvalidInstanceError, MsdpError
from .instances import (
    INSTANCE_KINDS,
    TABLE_FAMILIES,
    InstanceParseError,
    bundled_path,
    dumps_instance,
    find_single_survivor_witness,
    generate,
    load_instance,
)
from .solver import InfeasibleError, SurvivorPolicy, msdp_solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_BUDGET = 5

SOLVERS = ("msdp", "es", "sa")
CSV_COLUMNS = ("solver", "objective", "feasible", "certified", "csf_evals", "acms_ops", "total", "wall_ms")
BENCH_INSTANCES = ("adc_default.json", "dfa_ecoli.json")


class UsageError(MsdpError):
    pass


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, InfeasibleError):
        return EXIT_INFEASIBLE
    if isinstance(exc, (SearchSpaceTooLarge, RuleSpaceTooLarge)):
        return EXIT_BUDGET
    if isinstance(exc, InvalidInstanceError):
        return EXIT_PARSE
    return 1


def _parse_solvers(values) -> list:
    out = []
    for v in values or []:
        for name in v.split(","):
            name = name.strip()
            if not name:
                continue
            if name not in SOLVERS:
                raise UsageError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}")
            if name not in out:
                out.append(name)
    if not out:
        raise UsageError("select at least one solver with --solver")
    return out


def _policy(args) -> SurvivorPolicy:
    if args.ne_cap is None:
        return SurvivorPolicy.keep_all(args.merge_dominated)
    if args.ne_cap < 1:
        raise UsageError("--ne-cap must be >= 1")
    return SurvivorPolicy.cap(args.ne_cap, args.merge_dominated)


def run_solvers(instance, solvers, policy, sa_cfg, threads=1) -> dict:
    """Run each selected solver; failures are recorded per solver."""
    p = instance.problem
    rows = []
    first_error = None
    for name in solvers:
        try:
            if name == "msdp":
                rep = msdp_solve(p, policy, threads=threads)
            elif name == "es":
                rep = exhaustive_search(p)
            else:
                rep = simulated_annealing(p, sa_cfg)
            row = rep.to_dict()
        except MsdpError as exc:
            first_error = first_error or exc
            row = {"solver": name, "error": str(exc), "exit_code": _exit_code(exc)}
        rows.append(row)
    report = {"instance": p.name, "results": rows}
    if instance.adapter == "dfa":
        frags = instance.problem.meta["params"]["fragments"]
        for row in rows:
            if row.get("best"):
                order = orient_for_assembly([label - 1 for label in row["best"]["x"]], frags)
                row["assembly_order"] = [k + 1 for k in order]
                row["assembled"] = assemble_sequence(order, frags)
    return {"report": report, "error": first_error}


def _fmt_num(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def to_csv(reports: list, prefix_instance: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for row in rep["results"]:
            name = f"{rep['instance']}:{row['solver']}" if prefix_instance else row["solver"]
            if "error" in row:
                w.writerow([name, "", False, False, "", "", "", ""])
                continue
            c = row["counters"]
            w.writerow([
                name, repr(row["best"]["f"]), row["feasible"], row["certified"],
                c["csf"], c["acms"], c["total"], row.get("wall_ms", ""),
            ])
    return buf.getvalue()


def to_text(reports: list) -> str:
    lines = []
    lines.append("Total number of computations (CSF evaluations + ACMS operations)")
    header = f"{'instance':<24}{'solver':<8}{'csf':>12}{'acms':>12}{'total':>14}{'N_e':>8}{'wall ms':>11}"
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        for row in rep["results"]:
            if "error" in row:
                lines.append(f"{rep['instance']:<24}{row['solver']:<8}  error: {row['error']}")
                continue
            c = row["counters"]
            lines.append(
                f"{rep['instance']:<24}{row['solver']:<8}{c['csf']:>12}{c['acms']:>12}{c['total']:>14}"
                f"{_fmt_num(row.get('ne_bound')):>8}{_fmt_num(row.get('wall_ms')):>11}"
            )
    lines.append("")
    lines.append("Solutions")
    header = f"{'instance':<24}{'solver':<8}{'objective':>14}  {'status':<12}x"
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        for row in rep["results"]:
            if "error" in row:
                continue
            status = "optimal" if row["certified"] else "uncertified"
            x = ",".join(str(v) for v in row["best"]["x"])
            lines.append(f"{rep['instance']:<24}{row['solver']:<8}{row['best']['f']:>14.6f}  {status:<12}[{x}]")
            if "assembled" in row:
                order = ",".join(str(v) for v in row["assembly_order"])
                lines.append(f"{'':<32}assembled [{order}]: {row['assembled']}")
    return "\n".join(lines) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _render(reports, fmt, bench=False, timing=True) -> str:
    if not timing:
        for rep in reports:
            for row in rep["results"]:
                row.pop("wall_ms", None)
    if fmt == "json":
        doc = {"instances": reports} if bench else reports[0]
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if fmt == "csv":
        return to_csv(reports, prefix_instance=bench)
    return to_text(reports)


def _sa_config(args) -> SaConfig:
    return SaConfig(iterations=args.sa_iters, seed=args.sa_seed)


def cmd_solve(args) -> int:
    solvers = _parse_solvers(args.solver)
    policy = _policy(args)
    inst = load_instance(args.instance)
    out = run_solvers(inst, solvers, policy, _sa_config(args), args.threads)
    _emit(_render([out["report"]], args.format, timing=not args.no_timing), args.output)
    return _exit_code(out["error"]) if out["error"] else EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "witness":
        found = find_single_survivor_witness(args.seed, args.attempts, args.N or 4, args.M or 3)
        if found is None:
            sys.stderr.write(f"no witness found within {args.attempts} attempts\n")
            return 1
        doc, single, opt, attempts = found
        sys.stderr.write(f"witness after {attempts} attempts: single-survivor {single!r} < optimum {opt!r}\n")
    else:
        params = {k: v for k, v in {
            "N": args.N, "M": args.M, "family": args.family, "Pt": args.Pt,
            "length": args.length, "states": args.states, "actions": args.actions,
            "horizon": args.horizon,
        }.items() if v is not None}
        if args.no_bound:
            params["bound"] = False
        if args.unconstrained:
            params["constrained"] = False
        doc = generate(args.kind, args.seed, **params)
    _emit(dumps_instance(doc), args.output)
    return EXIT_OK


def bench_reports(sa_seed: int = 0, threads: int = 1, merge_dominated: bool = False) -> list:
    reports = []
    for name in BENCH_INSTANCES:
        inst = load_instance(bundled_path(name))
        out = run_solvers(
            inst, list(SOLVERS), SurvivorPolicy.keep_all(merge_dominated), SaConfig(seed=sa_seed), threads
        )
        reports.append(out["report"])
    return reports


def cmd_bench(args) -> int:
    reports = bench_reports(args.sa_seed, args.threads, args.merge_dominated)
    _emit(_render(reports, args.format, bench=True, timing=not args.no_timing), args.output)
    if args.format == "text":
        sys.stderr.write(f"kernel backend: {kernels.BACKEND}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msdp", description="Multi-survivor DP solver and benchmark")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "text"), default="text")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker threads per trellis stage")
        sp.add_argument("--sa-seed", type=int, default=0)
        sp.add_argument("--merge-dominated", action="store_true", help="merge survivors with equal constraint state")
        sp.add_argument("--no-timing", action="store_true", help="omit wall-clock columns")

    sp = sub.add_parser("solve", help="solve one instance file")
    sp.add_argument("instance")
    sp.add_argument("--solver", action="append", help="msdp, es, sa (repeatable or comma separated)")
    sp.add_argument("--ne-cap", type=int, help="keep at most this many survivors per node (1 = classic DP)")
    sp.add_argument("--sa-iters", type=int)
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("gen", help="emit a generated instance")
    sp.add_argument("kind", choices=INSTANCE_KINDS + ("witness",))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--N", type=int)
    sp.add_argument("--M", type=int)
    sp.add_argument("--family", choices=TABLE_FAMILIES)
    sp.add_argument("--Pt", type=float)
    sp.add_argument("--length", type=int)
    sp.add_argument("--states", type=int)
    sp.add_argument("--actions", type=int)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--no-bound", action="store_true", help="dfa-random: disable the upper-bound constraint")
    sp.add_argument("--unconstrained", action="store_true", help="cmdp-random: no cost budget")
    sp.add_argument("--attempts", type=int, default=10_000)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="reproduce the ADC and DFA comparison tables")
    common(sp)
    sp.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except InstanceParseError as exc:
        sys.stderr.write(f"msdp: parse error: {exc}\n")
        return EXIT_PARSE
    except MsdpError as exc:
        sys.stderr.write(f"msdp: {exc}\n")
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
