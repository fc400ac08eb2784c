"""Command line entry point.

``ko-radial <subcommand> --config <path> [--set section.key=value]...``

Subcommands: ``solve`` (full pipeline), ``classify`` (profile + verdict,
no iteration), ``check-envelope`` (nonlinearity audits only) and ``sweep``
(Cartesian product of parameter values, one summary row per cell).

Exit codes: 0 success, 1 validation/parse/IO failure, 2 iteration did not
converge, 3 overflow (numerical blow-up inside the domain), 4 hypotheses
not met.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .classifier import (
    ClassificationReport,
    SandwichReport,
    Verdict,
    classify,
    verify_sandwich,
)
from .config import RunConfig, emit_config, parse_config
from .errors import Overflow, ParseError, ValidationError
from .model import check_c1, check_c2_envelope
from .oracle import compare_solutions, direct_integrate
from .solver import (
    AprioriReport,
    IterationConfig,
    SolutionPair,
    audit_apriori_bounds,
    audit_monotone_iterates,
    picard_solve,
)
from .transforms import IntegralProfile, build_profile

__all__ = ["main"]

_CSV_COLUMNS = (
    "r",
    "u",
    "v",
    "du",
    "dv",
    "P1",
    "P2",
    "Plower",
    "Qlower",
    "Pbar1",
    "Pbar2",
    "zinv_bound",
    "ko_bound_u",
    "ko_bound_v",
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config {args.config!r}: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, args.set)
    except ParseError as exc:
        print(f"error: {args.config}:{exc.line}: {exc.reason}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: invalid {exc.field}: {exc.reason}", file=sys.stderr)
        return 1

    handler = {
        "solve": _cmd_solve,
        "classify": _cmd_classify,
        "check-envelope": _cmd_check_envelope,
        "sweep": _cmd_sweep,
    }[args.command]
    try:
        return handler(cfg)
    except OSError as exc:
        where = getattr(exc, "filename", None) or "output"
        print(f"error: cannot write {where}: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ko-radial",
        description="radial semilinear system solver and growth classifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "iterate, verify bounds, classify, write CSV and report"),
        ("classify", "build the growth profile and classify, no iteration"),
        ("check-envelope", "audit the nonlinearity growth hypotheses"),
        ("sweep", "run the [sweep] product, one summary row per cell"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the run config")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override a config key (repeatable)",
        )
    return parser


# --------------------------------------------------------------------------
# artifacts


def _write_csv(
    path: str,
    profile: IntegralProfile,
    sol: Optional[SolutionPair],
):
    nodes = profile.grid.nodes
    none = np.zeros_like(nodes, dtype=bool)
    every = ~none

    def from_sol(attr):
        if sol is None:
            return nodes, none
        return getattr(sol, attr).values, every

    columns = {
        "r": (nodes, every),
        "u": from_sol("u"),
        "v": from_sol("v"),
        "du": from_sol("du"),
        "dv": from_sol("dv"),
        "P1": (profile.p1_tab.values, every),
        "P2": (profile.p2_tab.values, every),
        "Plower": (profile.plower.values, every),
        "Qlower": (profile.qlower.values, every),
        "Pbar1": (profile.pbar1.values, profile.pbar1.mask),
        "Pbar2": (profile.pbar2.values, profile.pbar2.mask),
        "zinv_bound": (profile.zinv_bound.values, profile.zinv_bound.mask),
        "ko_bound_u": (profile.ko_bound_u.values, profile.ko_bound_u.mask),
        "ko_bound_v": (profile.ko_bound_v.values, profile.ko_bound_v.mask),
    }
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(_CSV_COLUMNS) + "\n")
        for i in range(nodes.size):
            cells = []
            for name in _CSV_COLUMNS:
                vals, mask = columns[name]
                cells.append("%.17g" % vals[i] if mask[i] else "")
            f.write(",".join(cells) + "\n")


def _limit_lines(profile: IntegralProfile) -> list:
    order = ("KO1", "KO2", "Plower", "Qlower", "Pbar1", "Pbar2",
             "Pbar1_eps", "Pbar2_eps")
    return [f"{key}(inf): {profile.limits[key]}" for key in order]


def _evidence_line(item) -> str:
    label, value, extras = item
    parts = [f"{label}: {value}"]
    shown = [f"{x:.6g}" if isinstance(x, float) else str(x) for x in extras]
    if shown:
        parts.append("(" + ", ".join(shown) + ")")
    return " ".join(parts)


def _check_lines(report) -> list:
    lines = []
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        extra = getattr(c, "unavailable_nodes", None)
        if extra is None:
            extra = getattr(c, "vacuous_nodes", 0)
        note = f", {extra} nodes unavailable" if extra else ""
        lines.append(
            f"{c.name}: {status} (max violation {c.max_violation:.3g} "
            f"at r = {c.at_radius:.6g}{note})"
        )
    return lines


def _write_report(
    path: str,
    cfg: RunConfig,
    profile: IntegralProfile,
    outcome: ClassificationReport,
    exit_code: int,
    *,
    sol: Optional[SolutionPair] = None,
    overflow_radius: Optional[float] = None,
    comparison=None,
    oracle_note: str = "",
    monotone_ok: Optional[bool] = None,
    apriori: Optional[AprioriReport] = None,
    sandwich: Optional[SandwichReport] = None,
    figure_paths=(),
):
    lines = []
    lines.append("ko-radial report")
    lines.append("================")
    lines.append("")
    lines.append(f"verdict: {outcome.verdict.value}")
    lines.append(f"theorem: {outcome.theorem_applied.value}")
    lines.append(f"exit status: {exit_code}")
    lines.append("")

    lines.append("[solve]")
    if overflow_radius is not None:
        lines.append(f"overflow: solution exceeded range at r = {overflow_radius:.8g}")
    elif sol is None:
        lines.append("not run (classify only)")
    else:
        state = "converged" if sol.converged else "NOT converged"
        lines.append(f"{state} after {sol.iterations} sweeps")
        if len(sol.sup_delta_history):
            lines.append(f"final sweep delta: {sol.sup_delta_history[-1]:.6g}")
        r_end = profile.grid.r_max
        lines.append(
            f"u({r_end:g}) = {sol.u.at_end():.12g}, "
            f"v({r_end:g}) = {sol.v.at_end():.12g}"
        )
    lines.append("")

    if comparison is not None or oracle_note:
        lines.append("[oracle]")
        if comparison is not None:
            lines.append(
                f"sup_abs = {comparison.sup_abs:.6g}, "
                f"sup_rel = {comparison.sup_rel:.6g} "
                f"at r = {comparison.argmax_radius:.6g}"
            )
        if oracle_note:
            lines.append(oracle_note)
        lines.append("")

    lines.append("[tail limits]")
    lines.extend(_limit_lines(profile))
    mono = profile.r_monotone
    lines.append(
        "monotone radius (joint): "
        + ("not found" if mono is None else f"{mono:.6g}")
    )
    lines.append("")

    lines.append("[evidence]")
    if outcome.evidence:
        lines.extend(f"- {_evidence_line(e)}" for e in outcome.evidence)
    else:
        lines.append("- none")
    lines.append("")

    lines.append("[warnings]")
    if outcome.warnings:
        lines.extend(f"- {w}" for w in outcome.warnings)
    else:
        lines.append("- none")
    lines.append("")

    if monotone_ok is not None or apriori is not None:
        lines.append("[audits]")
        if monotone_ok is not None:
            lines.append(f"monotone iterates: {'pass' if monotone_ok else 'FAIL'}")
        if apriori is not None:
            lines.extend(_check_lines(apriori))
        lines.append("")

    if sandwich is not None:
        lines.append("[bound sandwich]")
        lines.extend(_check_lines(sandwich))
        lines.extend(f"note: {n}" for n in sandwich.notes)
        lines.append("")

    if figure_paths:
        lines.append("[figures]")
        lines.extend(f"- {p}" for p in figure_paths)
        lines.append("")

    lines.append("[configuration]")
    lines.extend(emit_config(cfg).splitlines())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _render(cfg: RunConfig, profile: IntegralProfile, sol) -> tuple:
    if not cfg.figures:
        return ()
    from . import figures

    return tuple(figures.render_figures(cfg.report_path, profile, sol))


# --------------------------------------------------------------------------
# subcommands


def _exit_code(
    overflow_radius: Optional[float],
    sol: Optional[SolutionPair],
    outcome: ClassificationReport,
) -> int:
    if overflow_radius is not None:
        return 3
    if sol is not None and not sol.converged:
        return 2
    if outcome.verdict is Verdict.HypothesesNotMet:
        return 4
    return 0


def _cmd_solve(cfg: RunConfig) -> int:
    spec = cfg.problem_spec()
    grid = cfg.build_grid()

    sol = None
    overflow_radius = None
    try:
        sol = picard_solve(
            spec, grid, IterationConfig(tol=cfg.tol, max_iter=cfg.max_iter, audit=True)
        )
    except Overflow as exc:
        overflow_radius = exc.radius

    comparison = None
    oracle_note = ""
    if sol is not None:
        try:
            reference = direct_integrate(spec, grid)
            comparison = compare_solutions(sol, reference)
        except Overflow as exc:
            oracle_note = f"direct integrator overflowed at r = {exc.radius:.6g}"

    profile = build_profile(spec, grid, cfg.tail_policy())
    outcome = classify(spec, profile, sol, overflowed=overflow_radius is not None)

    monotone_ok = apriori = sandwich = None
    if sol is not None:
        monotone_ok = audit_monotone_iterates(sol.history)
        apriori = audit_apriori_bounds(sol, profile, spec)
        sandwich = verify_sandwich(sol, profile, spec)

    code = _exit_code(overflow_radius, sol, outcome)
    _write_csv(cfg.csv_path, profile, sol)
    figure_paths = _render(cfg, profile, sol)
    _write_report(
        cfg.report_path,
        cfg,
        profile,
        outcome,
        code,
        sol=sol,
        overflow_radius=overflow_radius,
        comparison=comparison,
        oracle_note=oracle_note,
        monotone_ok=monotone_ok,
        apriori=apriori,
        sandwich=sandwich,
        figure_paths=figure_paths,
    )
    print(
        f"verdict {outcome.verdict.value} via {outcome.theorem_applied.value}; "
        f"wrote {cfg.csv_path}, {cfg.report_path}"
    )
    return code


def _cmd_classify(cfg: RunConfig) -> int:
    spec = cfg.problem_spec()
    grid = cfg.build_grid()
    profile = build_profile(spec, grid, cfg.tail_policy())
    outcome = classify(spec, profile)
    code = 4 if outcome.verdict is Verdict.HypothesesNotMet else 0
    _write_csv(cfg.csv_path, profile, None)
    figure_paths = _render(cfg, profile, None)
    _write_report(
        cfg.report_path, cfg, profile, outcome, code, figure_paths=figure_paths
    )
    print(
        f"verdict {outcome.verdict.value} via {outcome.theorem_applied.value}; "
        f"wrote {cfg.csv_path}, {cfg.report_path}"
    )
    return code


def _cmd_check_envelope(cfg: RunConfig) -> int:
    pair = cfg.nonlinearity.build()
    env = check_c2_envelope(pair)
    c1 = check_c1(pair)
    print(f"family: {pair.family}")
    print(
        f"growth envelope: {'holds' if env.holds else 'FAILS'} "
        f"(worst ratio {env.worst_ratio:.12g})"
    )
    print(
        "monotonicity/positivity: "
        f"nondecreasing={'yes' if c1.nondecreasing else 'NO'}, "
        f"positive on diagonal={'yes' if c1.positive_on_diagonal else 'NO'}"
    )
    return 0 if env.holds and c1.holds else 4


def _sweep_cell(base_text: str, overrides: list, index: int) -> dict:
    row = {
        "cell": index,
        "verdict": "",
        "theorem": "",
        "status": "ok",
        "iterations": "",
        "u_end": "",
        "v_end": "",
    }
    try:
        cfg = parse_config(base_text, overrides)
        spec = cfg.problem_spec()
        grid = cfg.build_grid()
        sol = None
        overflow_radius = None
        try:
            sol = picard_solve(
                spec, grid, IterationConfig(tol=cfg.tol, max_iter=cfg.max_iter)
            )
        except Overflow as exc:
            overflow_radius = exc.radius
            row["status"] = f"overflow at r = {exc.radius:.6g}"
        profile = build_profile(spec, grid, cfg.tail_policy())
        outcome = classify(spec, profile, sol, overflowed=overflow_radius is not None)
        row["verdict"] = outcome.verdict.value
        row["theorem"] = outcome.theorem_applied.value
        if sol is not None:
            if not sol.converged:
                row["status"] = "not converged"
            row["iterations"] = str(sol.iterations)
            row["u_end"] = "%.17g" % sol.u.at_end()
            row["v_end"] = "%.17g" % sol.v.at_end()
    except (ParseError, ValidationError) as exc:
        row["status"] = f"invalid: {exc}"
    except Exception as exc:  # one bad cell must not sink the sweep
        row["status"] = f"error: {exc}"
    return row


def _cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.sweep:
        print("error: sweep requires a non-empty [sweep] section", file=sys.stderr)
        return 1
    base_text = emit_config(cfg)
    targets = [target for target, _ in cfg.sweep]
    combos = list(itertools.product(*(tokens for _, tokens in cfg.sweep)))
    jobs = [
        [f"{target}={token}" for target, token in zip(targets, combo)]
        for combo in combos
    ]

    with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as pool:
        rows = list(
            pool.map(lambda ij: _sweep_cell(base_text, ij[1], ij[0]), enumerate(jobs))
        )
    rows.sort(key=lambda row: row["cell"])

    header = ["cell", *targets, "verdict", "theorem", "status",
              "iterations", "u_end", "v_end"]
    with open(cfg.csv_path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row, combo in zip(rows, combos):
            cells = [str(row["cell"]), *combo, row["verdict"], row["theorem"],
                     _csv_quote(row["status"]), row["iterations"],
                     row["u_end"], row["v_end"]]
            f.write(",".join(cells) + "\n")

    lines = ["ko-radial sweep report", "======================", ""]
    lines.append(f"{len(rows)} cells over {', '.join(targets)}")
    for row, combo in zip(rows, combos):
        where = ", ".join(f"{t} = {v}" for t, v in zip(targets, combo))
        lines.append(
            f"cell {row['cell']}: {where} -> {row['verdict'] or '-'} "
            f"({row['theorem'] or '-'}; {row['status']})"
        )
    lines.append("")
    lines.append("[configuration]")
    lines.extend(base_text.splitlines())
    Path(cfg.report_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"{len(rows)} cells; wrote {cfg.csv_path}, {cfg.report_path}")
    return 0


def _csv_quote(text: str) -> str:
    if "," in text or '"' in text:
        return '"' + text.replace('"', '""') + '"'
    return text


if __name__ == "__main__":
    sys.exit(main())
