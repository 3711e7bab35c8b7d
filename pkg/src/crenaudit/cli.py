"""Command line front end.

Subcommands: ``state`` (inspect a state), ``measure`` (compute one
measure), ``audit`` (run monogamy inequalities), ``sweep`` (parameter
grids over W-class mixtures), ``hunt`` (random search for violations).

Exit codes: 0 on success (violations are findings, not failures), 2 on
input errors, 3 on internal numerical failures.  Runs are reproducible:
the default seed is 0 and identical invocations produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import monogamy
from .convexroof import OptConfig, optimize
from .measures import (
    MeasureValue,
    concurrence_pure,
    negativity_mixed,
    negativity_pure,
    wootters_concurrence_2q,
)
from .monogamy import (
    analytic_w_audit,
    ckw_audit,
    cren_audit,
    dual_audit,
    fmt,
    hunt,
    negativity_audit,
    report_row,
    reports_to_csv,
    reports_to_json,
)
from .qlinalg import (
    Bipartition,
    DensityOperator,
    DimensionProfile,
    DomainError,
    NumericalError,
    PureState,
    partial_trace,
    schmidt,
)
from .states import (
    PCSSpec,
    PartitionSpec,
    WClassSpec,
    ghz_state,
    kim_sanders_state,
    load_state_spec,
    load_w_spec,
    maximally_entangled,
    ou_state,
)

_FAMILIES = ("ou", "kim_sanders", "max_entangled", "ghz", "w")


@dataclass
class RunConfig:
    """Parsed invocation: output handling plus optimizer overrides."""

    fmt: str = "table"
    output: str | None = None
    seed: int = 0
    size: int | None = None
    starts: int | None = None
    sweeps: int | None = None
    tol: float | None = None

    def opt_config(self) -> OptConfig | None:
        if all(v is None for v in (self.size, self.starts, self.sweeps, self.tol)):
            return None
        base = OptConfig()
        return OptConfig(
            size=self.size,
            starts=self.starts if self.starts is not None else base.starts,
            max_sweeps=self.sweeps if self.sweeps is not None else base.max_sweeps,
            tol_rel=self.tol if self.tol is not None else base.tol_rel,
            seed=self.seed,
        )


def _parse_parties(text: str) -> tuple[int, ...]:
    out = []
    for chunk in text.replace(",", "").strip():
        if not chunk.isdigit():
            raise DomainError(f"bad party index {chunk!r} in {text!r}")
        out.append(int(chunk))
    if not out:
        raise DomainError(f"no party indices in {text!r}")
    return tuple(out)


def _parse_partition(text: str) -> PartitionSpec:
    blocks = [_parse_parties(b) for b in text.split("|") if b.strip()]
    return PartitionSpec(tuple(blocks))


def _parse_grid(text: str) -> list[float]:
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise DomainError(f"empty grid {text!r}")
    return vals


def _load_state(args) -> PureState | DensityOperator:
    if getattr(args, "spec", None):
        state = load_state_spec(args.spec)
    elif getattr(args, "family", None):
        family = args.family
        if family == "ou":
            state = ou_state()
        elif family == "kim_sanders":
            state = kim_sanders_state()
        elif family == "max_entangled":
            state = maximally_entangled(args.d)
        elif family == "ghz":
            state = ghz_state(args.n, args.d)
        elif family == "w":
            from .states import build_w_state

            state = build_w_state(WClassSpec.symmetric(args.n, args.d))
        else:
            raise DomainError(f"unknown family {family!r}")
    else:
        raise DomainError("provide --spec FILE or --family NAME")
    trace_out = getattr(args, "trace_out", None)
    if trace_out:
        rho = state.to_density() if isinstance(state, PureState) else state
        dropped = _parse_parties(trace_out)
        keep = [p for p in rho.profile.parties if p not in set(dropped)]
        state = partial_trace(rho, keep)
    return state


def _emit_rows(rows: list[dict[str, str]], columns: tuple[str, ...], run: RunConfig) -> str:
    if run.fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()
    if run.fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True)
    widths = {c: max(len(c), *(len(r[c]) for r in rows)) if rows else len(c) for c in columns}
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for row in rows:
        lines.append("  ".join(row[c].ljust(widths[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _write(text: str, run: RunConfig) -> None:
    if run.output:
        with open(run.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_state(args, run: RunConfig) -> int:
    state = _load_state(args)
    rows: list[dict[str, str]] = []

    def add(k: str, v: str) -> None:
        rows.append({"property": k, "value": v})

    profile = state.profile
    add("profile", "x".join(str(d) for d in profile.dims))
    if isinstance(state, PureState):
        add("kind", "pure")
        add("norm", fmt(float(np.linalg.norm(state.amplitudes))))
        add("purity", fmt(1.0))
        add("rank", "1")
    else:
        add("kind", "mixed")
        add("trace", fmt(float(np.trace(state.matrix).real)))
        add("purity", fmt(state.purity()))
        add("rank", str(state.rank()))
    if args.cut:
        cut = Bipartition(_parse_parties(args.cut), profile.n)
        if isinstance(state, PureState):
            data = schmidt(state, cut)
            add("cut", str(cut))
            add("schmidt_rank", str(data.rank))
            add(
                "schmidt_coefficients",
                " ".join(fmt(float(c)) for c in data.coefficients[: data.rank]),
            )
        else:
            add("cut", str(cut))
            add("negativity", fmt(negativity_mixed(state, cut)))
    _write(_emit_rows(rows, ("property", "value"), run), run)
    return 0


def _measure_one(state, kind: str, cut: Bipartition, cfg: OptConfig) -> tuple[MeasureValue, str]:
    if isinstance(state, PureState):
        # Roof measures on pure input reduce to the pure-state value.
        if kind == "concurrence":
            return MeasureValue(kind, concurrence_pure(state, cut), cut, "closed_form"), "exact"
        return MeasureValue(kind, negativity_pure(state, cut), cut, "closed_form"), "exact"
    if kind == "concurrence":
        if state.profile.dims != (2, 2):
            raise DomainError(
                "mixed-state concurrence has a closed form only for two qubits; "
                "use cren (equal for qubit pairs) or a pure state"
            )
        return MeasureValue(kind, wootters_concurrence_2q(state), cut, "closed_form"), "exact"
    if kind == "negativity":
        return MeasureValue(kind, negativity_mixed(state, cut), cut, "trace_norm"), "exact"
    direction = "min" if kind == "cren" else "max"
    res = optimize(state, cut, direction, cfg)
    return MeasureValue(kind, res.value, cut, "optimizer"), res.bound_kind


def _run_measure(args, run: RunConfig) -> int:
    state = _load_state(args)
    cut = Bipartition(_parse_parties(args.cut) if args.cut else (1,), state.profile.n)
    cfg = run.opt_config() or OptConfig(seed=run.seed)
    rows = []
    for kind in args.measure.split(","):
        kind = kind.strip()
        if kind not in ("concurrence", "negativity", "cren", "crenoa"):
            raise DomainError(f"unknown measure {kind!r}")
        mv, bound = _measure_one(state, kind, cut, cfg)
        rows.append(
            {
                "measure": mv.kind,
                "cut": str(mv.cut),
                "value": fmt(mv.value),
                "method": mv.method,
                "bound_kind": bound,
            }
        )
    _write(_emit_rows(rows, ("measure", "cut", "value", "method", "bound_kind"), run), run)
    return 0


def _run_audit(args, run: RunConfig) -> int:
    state = _load_state(args)
    if not isinstance(state, PureState):
        raise DomainError("audits need a pure state input")
    state_id = args.spec or args.family or "state"
    focus = args.focus
    cfg = run.opt_config()
    reports = []
    for measure in args.measures.split(","):
        measure = measure.strip()
        if measure == "cren":
            reports.append(cren_audit(state, focus, state_id=state_id, opt_cfg=cfg, seed=run.seed))
        elif measure == "ckw":
            reports.append(ckw_audit(state, focus, state_id=state_id, opt_cfg=cfg, seed=run.seed))
        elif measure in ("coa", "crenoa"):
            reports.append(
                dual_audit(state, focus, measure, state_id=state_id, opt_cfg=cfg, seed=run.seed)
            )
        elif measure == "negativity":
            reports.append(negativity_audit(state, focus, state_id=state_id))
        else:
            raise DomainError(f"unknown audit measure {measure!r}")
    if run.fmt == "json":
        _write(reports_to_json(reports) + "\n", run)
    elif run.fmt == "csv":
        _write(reports_to_csv(reports), run)
    else:
        rows = [report_row(r) for r in sorted(reports, key=lambda r: (r.state_id, r.measure))]
        _write(_emit_rows(rows, monogamy.AUDIT_COLUMNS, run), run)
    return 0


def _run_sweep(args, run: RunConfig) -> int:
    if args.spec:
        wspec = load_w_spec(args.spec)
    else:
        wspec = WClassSpec.symmetric(args.n, args.d)
    partition = _parse_partition(args.partition) if args.partition else None
    p_grid = _parse_grid(args.p_grid)
    lam_grid = _parse_grid(args.lambda_grid)
    rows = []
    m = partition.m if partition else wspec.n
    pair_cols = tuple(f"pair_cren_{i}" for i in range(2, m + 1))
    for p in p_grid:
        for lam in lam_grid:
            audit = analytic_w_audit(
                PCSSpec(wspec, p, lam),
                partition,
                samples=args.samples,
                seed=run.seed,
            )
            row = {
                "p": fmt(p),
                "lambda": fmt(lam),
                "global_cren": fmt(audit.values.global_cren),
            }
            for col, v in zip(pair_cols, audit.values.pair_cren):
                row[col] = fmt(v)
            row["residual"] = fmt(audit.report.residual)
            row["flatness_max_dev"] = fmt(audit.flatness_max_dev)
            row["verdict"] = audit.report.verdict
            rows.append(row)
    columns = ("p", "lambda", "global_cren") + pair_cols + (
        "residual",
        "flatness_max_dev",
        "verdict",
    )
    _write(_emit_rows(rows, columns, run), run)
    return 0


def _run_hunt(args, run: RunConfig) -> int:
    profile = DimensionProfile(tuple(int(d) for d in args.profile.split(",")))
    findings = hunt(profile, args.trials, run.seed, focus=args.focus)
    candidates = sum(1 for f in findings if f.verdict == monogamy.VERDICT_CANDIDATE)
    certified = sum(1 for f in findings if f.verdict == monogamy.VERDICT_CERTIFIED)
    if run.fmt == "json":
        _write(reports_to_json(findings) + "\n", run)
    elif run.fmt == "csv" or run.output:
        _write(reports_to_csv(findings), run)
    else:
        rows = [report_row(r) for r in findings]
        _write(_emit_rows(rows, monogamy.AUDIT_COLUMNS, run), run)
    sys.stderr.write(
        f"hunt: trials={args.trials} candidates={candidates} certified={certified}\n"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crenaudit",
        description="Entanglement measures and monogamy audits for qudit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_state: bool = True) -> None:
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--opt-size", type=int, dest="opt_size")
        p.add_argument("--opt-starts", type=int, dest="opt_starts")
        p.add_argument("--opt-sweeps", type=int, dest="opt_sweeps")
        p.add_argument("--opt-tol", type=float, dest="opt_tol")
        if with_state:
            p.add_argument("--spec", help="state-spec document (YAML)")
            p.add_argument("--family", choices=_FAMILIES)
            p.add_argument("--n", type=int, default=3, help="party count for ghz/w")
            p.add_argument("--d", type=int, default=2, help="local dimension")
            p.add_argument(
                "--trace-out",
                dest="trace_out",
                help="parties to trace out after building (e.g. 3 or 2,3)",
            )

    p_state = sub.add_parser("state", help="inspect a state")
    add_common(p_state)
    p_state.add_argument("--cut", help="side-A parties of a cut, e.g. 1 or 1,2")

    p_measure = sub.add_parser("measure", help="compute measures across a cut")
    add_common(p_measure)
    p_measure.add_argument("--measure", required=True, help="comma list: concurrence,negativity,cren,crenoa")
    p_measure.add_argument("--cut", help="side-A parties (default party 1)")

    p_audit = sub.add_parser("audit", help="run monogamy audits")
    add_common(p_audit)
    p_audit.add_argument("--focus", type=int, default=1)
    p_audit.add_argument(
        "--measures",
        default="cren,ckw,negativity",
        help="comma list: cren,ckw,coa,crenoa,negativity",
    )

    p_sweep = sub.add_parser("sweep", help="parameter sweep over W-class mixtures")
    add_common(p_sweep, with_state=False)
    p_sweep.add_argument("--spec", help="w_class or pcs spec document")
    p_sweep.add_argument("--n", type=int, default=3)
    p_sweep.add_argument("--d", type=int, default=2)
    p_sweep.add_argument("--p-grid", dest="p_grid", default="0.25,0.5,0.75")
    p_sweep.add_argument("--lambda-grid", dest="lambda_grid", default="0,0.5,1")
    p_sweep.add_argument("--partition", help="party blocks, e.g. 1|23")
    p_sweep.add_argument("--samples", type=int, default=64, help="flatness scan samples")

    p_hunt = sub.add_parser("hunt", help="random search for monogamy violations")
    add_common(p_hunt, with_state=False)
    p_hunt.add_argument("--profile", required=True, help="local dimensions, e.g. 3,2,2")
    p_hunt.add_argument("--trials", type=int, required=True)
    p_hunt.add_argument("--focus", type=int, default=1)

    return parser


_COMMANDS = {
    "state": _run_state,
    "measure": _run_measure,
    "audit": _run_audit,
    "sweep": _run_sweep,
    "hunt": _run_hunt,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run = RunConfig(
        fmt=args.format,
        output=args.output,
        seed=args.seed,
        size=args.opt_size,
        starts=args.opt_starts,
        sweeps=args.opt_sweeps,
        tol=args.opt_tol,
    )
    try:
        return _COMMANDS[args.command](args, run)
    except (ValueError, OSError) as exc:
        # DomainError and the spec-document errors subclass ValueError;
        # bare ValueErrors here are malformed numeric arguments.
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
