"""Command-line experiment runner.

Verbs::

    gen      write a suite of seeded instance files
    solve    run one algorithm over a suite and emit one record per run
    scaling  fit a log-log slope of gradient counts against the tolerance
    table    aggregate result records per dimension group

Exit status is 0 when every run succeeded, 1 when some run failed and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .budget import foam_budget, ppa_budget
from .core import EvalCounters, box_diameter
from .instances import (
    KINDS, HyperObjectiveError, gen_constrained, gen_scsc, gen_unconstrained, hyper_objective,
    load_instance, save_instance,
)
from .kkt import kkt_report

COLUMNS = (
    "instance_id", "algo", "eps", "tau", "lambda_cap", "outer_iters",
    "grad_f", "grad_c", "grad_d", "prox_p", "prox_q", "wall_ms",
    "phi_init", "phi_final", "stat_x", "stat_y", "feas_c", "comp_c", "feas_d", "comp_d",
    "cond_ok", "status",
)
ALGOS = ("foam", "ppa", "alm")
# which instance kinds each algorithm accepts
ALGO_KINDS = {"foam": ("scsc",), "ppa": ("unconstrained", "scsc"), "alm": ("constrained",)}
TARGET_SLOPE = {"foam": None, "ppa": -2.0, "alm": -3.5}
# below this mean gradient count the fit only sees fixed overhead
DEGENERATE_COUNT = 100
JOBS_ENV = "MINIMAX_AL_JOBS"

_ID_RE = re.compile(r"^(?P<group>.+)-s(?P<seed>\d+)$")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    algo: str
    eps: float
    eps_hat0: float | None = None
    tau: float = 0.5
    lambda_cap: float = 10.0
    monitors: bool = True


# running ---------------------------------------------------------------------


def _start_point(inst, algo):
    if algo == "ppa":
        return np.ones(inst.n), np.ones(inst.m)
    return np.zeros(inst.n), np.zeros(inst.m)


def _phi(inst, x):
    try:
        return hyper_objective(inst, x)
    except HyperObjectiveError:
        return None


def _solve(inst, cfg: RunConfig, counters: EvalCounters, rec: dict, extra: dict):
    x0, y0 = _start_point(inst, cfg.algo)
    if cfg.algo == "foam":
        from .foam import solve_sccsc

        sub = inst.to_saddle_subproblem()
        sx = sub.sigma_x
        cert, _ = solve_sccsc(sub, cfg.eps, -sx * x0, y0, counters)
        extra["certificate_residual"] = cert.residual
        extra["budget"] = asdict(foam_budget(
            sx, sub.sigma_y, sub.L_grad, cfg.eps, box_diameter(sub.p.domain), box_diameter(sub.q.domain),
        ))
        rec["outer_iters"] = cert.outer_iterations
        return cert.x, cert.y, kkt_report(inst.to_problem(), cert.x, cert.y)
    if cfg.algo == "ppa":
        from .ppa import NcscProblem, solve_ncsc

        prob = inst.to_problem()
        f = prob.f
        sub = NcscProblem(f.grad, f.L_grad, f.sigma, prob.p, prob.q, value=f.value)
        eps_hat0 = cfg.eps / 2 if cfg.eps_hat0 is None else cfg.eps_hat0
        (x, y), trace, _ = solve_ncsc(sub, cfg.eps, eps_hat0, x0, y0, counters)
        k = inst.constants
        extra["budget"] = asdict(ppa_budget(
            f.L_grad, f.sigma, cfg.eps, eps_hat0, k["D_x"], k["D_y"],
            H0_max=k["F_abs"], H_star_low=-k["F_abs"], H_low=-k["F_abs"],
        ))
        rec["outer_iters"] = trace.outer_iterations
        return x, y, kkt_report(prob, x, y)
    from .alm import NF_SLACK, find_nearly_feasible, solve_constrained

    cprob = inst.to_constrained_problem()
    x_nf = inst.x_nf
    # the stored point is only 0.1-nearly feasible; tighter eps needs a new one
    if np.linalg.norm(np.maximum(inst.c_value(x_nf), 0.0)) > math.sqrt(cfg.eps) + NF_SLACK:
        x_nf = find_nearly_feasible(cprob.problem.c, cprob.problem.p.domain, cfg.eps, x0=x_nf, counters=counters)
        extra["x_nf_recomputed"] = True
    sol = solve_constrained(
        cprob, cfg.eps, cfg.tau, cfg.lambda_cap, x0=x0, y0=y0, x_nf=x_nf,
        monitors=cfg.monitors, counters=counters,
    )
    b = sol.budget
    rec["outer_iters"] = sol.outer_iterations
    rec["cond_ok"] = "unknown" if b.cond_ok is None else str(b.cond_ok).lower()
    extra["budget"] = {k: v for k, v in asdict(b).items() if k != "flags"}
    extra["budget_flags"] = list(b.flags)
    extra["monitors_checked"] = len(sol.monitors)
    extra["monitors_failed"] = [m for m in sol.monitors if not m["ok"]]
    extra["lam_x_norm"] = float(np.linalg.norm(sol.lam_x_tilde))
    extra["lam_y_norm"] = float(np.linalg.norm(sol.lam_y))
    return sol.x, sol.y, sol.report


def run_one(path, cfg: RunConfig) -> dict:
    """Solve one instance file and return its record.

    The record holds every CSV column plus JSON-only details under ``extra``.
    Errors never propagate: they end up in ``status``.
    """
    rec = dict.fromkeys(COLUMNS, None)
    rec.update(algo=cfg.algo, eps=cfg.eps, status="ok")
    if cfg.algo == "alm":
        rec.update(tau=cfg.tau, lambda_cap=cfg.lambda_cap)
    extra = {"path": str(path), "eps_hat0": cfg.eps_hat0, "monitors": cfg.monitors}
    counters = EvalCounters()
    try:
        inst = load_instance(path)
    except Exception as exc:
        rec.update(instance_id=Path(path).stem, status=f"failed: {type(exc).__name__}: {exc}")
        rec.update(counters.snapshot())
        rec["extra"] = extra
        return rec
    rec["instance_id"] = inst.instance_id
    if inst.kind not in ALGO_KINDS[cfg.algo]:
        rec["status"] = f"failed: {cfg.algo} needs kind {' or '.join(ALGO_KINDS[cfg.algo])}, got {inst.kind}"
        rec.update(counters.snapshot())
        rec["extra"] = extra
        return rec
    x0, _ = _start_point(inst, cfg.algo)
    rec["phi_init"] = _phi(inst, x0)
    t0 = time.perf_counter()
    try:
        x, y, report = _solve(inst, cfg, counters, rec, extra)
    except Exception as exc:
        msg = " ".join(str(exc).split())
        rec["status"] = f"failed: {type(exc).__name__}: {msg}"
    else:
        rec.update(report.as_dict())
        rec["phi_final"] = _phi(inst, x)
        extra["surrogate"] = report.surrogate
    rec["wall_ms"] = round(1e3 * (time.perf_counter() - t0), 3)
    rec.update(counters.snapshot())
    rec["extra"] = extra
    return rec


def _run_task(task):
    return run_one(*task)


def run_suite(paths, configs, jobs: int = 1) -> list:
    """Records for every (instance, config) pair in canonical order."""
    tasks = [(str(p), cfg) for p in paths for cfg in configs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    return sorted(records, key=_record_key)


def _record_key(rec):
    m = _ID_RE.match(rec["instance_id"] or "")
    head = (m.group("group"), int(m.group("seed"))) if m else (rec["instance_id"] or "", -1)
    return head + (ALGOS.index(rec["algo"]), rec["eps"], rec["tau"] or 0.0, rec["lambda_cap"] or 0.0)


def failed(rec) -> bool:
    return rec["status"] != "ok"


# formatting --------------------------------------------------------------------


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _markdown(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(_cell(v) for v in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def format_records(records, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=1, default=_json_default) + "\n"
    rows = [[rec[c] for c in COLUMNS] for rec in records]
    if fmt == "md":
        return _markdown(COLUMNS, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    w.writerows([_cell(v) for v in row] for row in rows)
    return buf.getvalue()


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not serializable: {type(v).__name__}")


def read_records(path) -> list:
    """Parse a results CSV back into records with numeric fields restored."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != list(COLUMNS):
            raise UsageError(f"{path}: not a results CSV (unexpected header)")
        out = []
        for row in reader:
            rec = {}
            for key, val in row.items():
                if key in ("instance_id", "algo", "status", "cond_ok"):
                    rec[key] = val or None
                elif val == "":
                    rec[key] = None
                else:
                    rec[key] = float(val)
            out.append(rec)
    return out


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# suite discovery ---------------------------------------------------------------


def suite_paths(entries) -> list:
    paths = []
    for entry in entries:
        p = Path(entry)
        if p.is_dir():
            paths += sorted(p.glob("*.json"))
        elif p.exists():
            paths.append(p)
        else:
            raise UsageError(f"no such file or directory: {entry}")
    if not paths:
        raise UsageError("suite is empty")
    return paths


def _jobs(value) -> int:
    if value is None:
        value = os.environ.get(JOBS_ENV, "1")
    try:
        jobs = int(value)
    except ValueError:
        raise UsageError(f"invalid job count {value!r}") from None
    if jobs < 1:
        raise UsageError("job count must be positive")
    return jobs


def _configs(args) -> list:
    return [
        RunConfig(
            algo=args.algo, eps=eps, eps_hat0=args.eps_hat0, tau=args.tau,
            lambda_cap=args.lambda_cap, monitors=args.monitors == "on",
        )
        for eps in args.eps
    ]


# verbs -----------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.n < 1 or args.m < 1 or args.seeds < 1:
        raise UsageError("--n, --m and --seeds must be positive")
    if args.kind == "constrained" and (args.nt is None or args.mt is None or min(args.nt, args.mt) < 1):
        raise UsageError("--kind constrained needs positive --nt and --mt")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed_base, args.seed_base + args.seeds):
        if args.kind == "unconstrained":
            inst = gen_unconstrained(args.n, args.m, seed)
        elif args.kind == "scsc":
            inst = gen_scsc(args.n, args.m, seed)
        else:
            inst = gen_constrained(args.n, args.m, args.nt, args.mt, seed)
        path = save_instance(inst, out / f"{inst.instance_id}.json")
        print(path)
    return 0


def cmd_solve(args) -> int:
    records = run_suite(suite_paths(args.suite), _configs(args), _jobs(args.jobs))
    _emit(format_records(records, args.format), args.out)
    bad = [r for r in records if failed(r)]
    for r in bad:
        print(f"{r['instance_id']} ({r['algo']}, eps={r['eps']}): {r['status']}", file=sys.stderr)
    return 1 if bad else 0


def fit_slope(eps_values, counts):
    """Least-squares slope of ``log count`` against ``log eps``, or ``None`` if undefined."""
    eps_values = np.asarray(eps_values, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if len(counts) < 2 or np.any(~np.isfinite(counts)) or np.any(counts <= 0):
        return None
    if counts.max() < DEGENERATE_COUNT:
        return None
    slope, _ = np.polyfit(np.log(eps_values), np.log(counts), 1)
    return float(slope)


def scaling_report(records, algo: str) -> tuple[list, float | None]:
    """Per-eps rows ``(eps, runs, failed, mean_grad_f, mean_ops)`` and the fitted slope."""
    by_eps = {}
    for rec in records:
        by_eps.setdefault(rec["eps"], []).append(rec)
    rows = []
    for eps in sorted(by_eps, reverse=True):
        ok = [r for r in by_eps[eps] if not failed(r)]
        n_bad = len(by_eps[eps]) - len(ok)
        if ok:
            grads = float(np.mean([r["grad_f"] for r in ok]))
            ops = float(np.mean([r["grad_f"] + r["prox_p"] + r["prox_q"] for r in ok]))
        else:
            grads = ops = math.nan
        rows.append((eps, len(ok), n_bad, grads, ops))
    return rows, fit_slope([r[0] for r in rows], [r[3] for r in rows])


def cmd_scaling(args) -> int:
    if len(set(args.eps)) < 3:
        raise UsageError("scaling needs at least three distinct --eps values")
    paths = suite_paths(args.suite)
    if len(paths) < 5:
        raise UsageError("scaling needs at least five instances")
    records = run_suite(paths, _configs(args), _jobs(args.jobs))
    rows, slope = scaling_report(records, args.algo)
    header = ("eps", "runs", "failed", "mean_grad_f", "mean_ops")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header + ("slope",))
    w.writerows([_cell(v) for v in row + (slope,)] for row in rows)
    target = TARGET_SLOPE[args.algo]
    slope_txt = "undefined (degenerate counts)" if slope is None else f"{slope:.4f}"
    md = _markdown(header, rows) + f"\nslope: {slope_txt}"
    if target is not None:
        md += f" (target {target})"
    md += "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(buf.getvalue())
        out.with_suffix(".md").write_text(md)
    else:
        sys.stdout.write(buf.getvalue() + "\n")
    sys.stdout.write(md)
    return 1 if any(failed(r) for r in records) else 0


def table_rows(records) -> tuple[list, int]:
    """Mean initial/final hyper-objective and time per (algo, dimension group)."""
    groups = {}
    n_failed = 0
    for rec in records:
        if failed(rec) or rec["phi_init"] is None or rec["phi_final"] is None:
            n_failed += 1
            continue
        m = _ID_RE.match(rec["instance_id"])
        key = (rec["algo"], m.group("group") if m else rec["instance_id"])
        groups.setdefault(key, []).append(rec)
    rows = []
    for (algo, group), recs in sorted(groups.items()):
        rows.append((
            group, algo, len(recs),
            float(np.mean([r["phi_init"] for r in recs])),
            float(np.mean([r["phi_final"] for r in recs])),
            float(np.mean([r["wall_ms"] for r in recs])) / 1e3,
        ))
    return rows, n_failed


def cmd_table(args) -> int:
    records = []
    for path in args.results:
        if not Path(path).exists():
            raise UsageError(f"no such file: {path}")
        records += read_records(path)
    if not records:
        raise UsageError("no records in input")
    rows, n_failed = table_rows(records)
    header = ("group", "algo", "runs", "phi_init", "phi_final", "time_s")
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([_cell(v) for v in row] for row in rows)
        text = buf.getvalue()
    elif args.format == "json":
        text = json.dumps({"rows": [dict(zip(header, r)) for r in rows], "excluded": n_failed}, indent=1) + "\n"
    else:
        text = _markdown(header, [(g, a, n, f"{pi:.4f}", f"{pf:.4f}", f"{t:.2f}") for g, a, n, pi, pf, t in rows])
        if n_failed:
            text += f"\n{n_failed} failed run(s) excluded.\n"
    _emit(text, args.out)
    return 0


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minimax-al", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="generate a suite of instance files")
    g.add_argument("--kind", choices=KINDS, default="unconstrained")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--nt", type=int)
    g.add_argument("--mt", type=int)
    g.add_argument("--seeds", type=int, default=10, help="number of instances")
    g.add_argument("--seed-base", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    def solver_flags(p, eps_default):
        p.add_argument("--algo", choices=ALGOS, required=True)
        p.add_argument("--suite", nargs="+", required=True, help="instance directory or files")
        p.add_argument("--eps", type=float, nargs="+", default=eps_default)
        p.add_argument("--eps-hat0", type=float, help="ppa: first subproblem accuracy (default eps/2)")
        p.add_argument("--tau", type=float, default=0.5)
        p.add_argument("--lambda-cap", type=float, default=10.0)
        p.add_argument("--monitors", choices=("on", "off"), default="on")
        p.add_argument("--jobs", help=f"worker processes (default ${JOBS_ENV} or 1)")
        p.add_argument("--out")

    s = sub.add_parser("solve", help="solve every instance of a suite")
    solver_flags(s, [1e-2])
    s.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    s.set_defaults(func=cmd_solve)

    sc = sub.add_parser("scaling", help="gradient counts against eps and their log-log slope")
    solver_flags(sc, [1e-1, 3e-2, 1e-2])
    sc.set_defaults(func=cmd_scaling)

    t = sub.add_parser("table", help="aggregate results per dimension group")
    t.add_argument("results", nargs="+", help="results CSV files")
    t.add_argument("--format", choices=("csv", "md", "json"), default="md")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
