"""Batch experiment front-end.

Subcommands: ``gen-problem``, ``solve``, ``maxent``, ``varmin``,
``prox-audit``, ``lcurve``, ``qsweep``, ``compare``.  Outputs are plain
JSON/CSV data files for external plotting (column layouts documented in
the README); identical config and seed give byte-identical files, so
wall-clock timing goes to stderr only.

Exit codes: 0 success, 2 configuration error, 3 solver divergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks

from . import fredholm
from .frames import BiFrame, Frame, ForwardProblem, load_matrix
from .modelsel import (
    corner_index,
    max_curvature_alpha,
    menger_curvatures,
    q_sweep,
    sweep_alpha,
)
from .prox import audit_table
from .shrinkage import hard_soft_rule, rule_by_name
from .solver import DivergedError, LandweberConfig, landweber_shrink, maxent_solve
from .variational import VariationalProblem, analysis_objective, variational_minimizer

__all__ = ["main", "ExperimentConfig", "run_benchmark", "ConfigError"]

# maxent solutions never hit exact zero; entries below this fraction of
# the peak count as zero in sparsity comparisons
MAXENT_NNZ_RTOL = 1e-6


class ConfigError(ValueError):
    pass


def _write_json(path, obj) -> None:
    # repr round-trips doubles exactly, so identical runs produce
    # identical bytes
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_logspace(spec: str) -> np.ndarray:
    try:
        lo, hi, num = spec.split(":")
        lo, hi, num = float(lo), float(hi), int(num)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}, expected 'lo:hi:num'") from exc
    if lo <= 0 or hi <= lo or num < 2:
        raise ConfigError(f"bad grid spec {spec!r}: need 0 < lo < hi and num >= 2")
    return np.logspace(np.log10(lo), np.log10(hi), num)


def _parse_spikes(spec: str):
    spikes = []
    for part in spec.split(","):
        pos, _, amp = part.partition(":")
        try:
            spikes.append((int(pos), float(amp) if amp else 1.0))
        except ValueError as exc:
            raise ConfigError(f"bad spike entry {part!r}") from exc
    return spikes


def _load_vector(path) -> np.ndarray:
    mat = load_matrix(path)
    if 1 not in mat.shape:
        raise ConfigError(f"{path}: expected a vector (one row or column)")
    return mat.ravel()


def _nonzeros(g, exact: bool) -> int:
    g = np.asarray(g)
    if exact:
        return int(np.count_nonzero(g))
    peak = float(np.max(np.abs(g))) if g.size else 0.0
    return int(np.sum(np.abs(g) > MAXENT_NNZ_RTOL * peak))


def top_peaks(g, k: int = 4) -> list[int]:
    """Indices of the k tallest local maxima, ascending."""
    g = np.asarray(g, dtype=float)
    idx, _ = find_peaks(g)
    if idx.size == 0:
        idx = np.array([int(np.argmax(g))]) if g.size else np.array([], dtype=int)
    order = np.argsort(g[idx])[::-1][:k]
    return sorted(int(i) for i in idx[order])


def _solution_record(op, f, g, q, alpha, exact_zero: bool, extra=None) -> dict:
    r = f - op @ g
    if q == 0:
        pen = alpha * float(np.count_nonzero(g))
    else:
        pen = alpha * float(np.sum(np.abs(g) ** q))
    rec = {
        "solution": [float(x) for x in g],
        "residual_norm": float(np.linalg.norm(r)),
        "penalty": pen,
        "objective": float(r @ r) + pen,
        "nonzeros": _nonzeros(g, exact=exact_zero),
        "peaks": top_peaks(g),
    }
    rec.update(extra or {})
    return rec


@dataclass
class ExperimentConfig:
    """One method run on one problem file."""

    problem: str
    method: str
    params: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int | None = None

    _METHODS = ("landweber_shrink", "maxent", "closed_form")

    def validate(self) -> None:
        if self.method not in self._METHODS:
            raise ConfigError(
                f"method must be one of {self._METHODS}, got {self.method!r}"
            )
        if "solution" not in self.outputs:
            raise ConfigError("outputs must include a 'solution' path")
        known = {
            "landweber_shrink": {
                "q", "alpha", "rule", "nonneg", "max_iters", "rel_tol",
                "normalize_operator",
            },
            "maxent": {"beta", "max_iters", "tol"},
            "closed_form": {"q", "alpha", "rule", "variant"},
        }[self.method]
        stray = set(self.params) - known
        if stray:
            raise ConfigError(
                f"unknown parameter(s) for {self.method}: {sorted(stray)}"
            )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        try:
            return cls(
                problem=doc["problem"],
                method=doc["method"],
                params=dict(doc.get("params", {})),
                outputs=dict(doc.get("outputs", {})),
                seed=doc.get("seed"),
            )
        except KeyError as exc:
            raise ConfigError(f"{path}: missing config key {exc}") from exc


def run_benchmark(config: ExperimentConfig) -> int:
    """Run one configured method, write its artifacts, return exit code 0.

    Errors surface as exceptions; ``main`` maps them to exit codes.
    """
    config.validate()
    problem = fredholm.load_problem(config.problem)
    if config.seed is not None:
        problem = fredholm.FredholmProblem(
            x_grid=problem.x_grid,
            y_grid=problem.y_grid,
            kernel_matrix=problem.kernel_matrix,
            ground_truth=problem.ground_truth,
            noise_sigma=problem.noise_sigma,
            seed=config.seed,
            kernel_spec=problem.kernel_spec,
        )
    f = fredholm.observe(problem)
    op = problem.kernel_matrix
    params = dict(config.params)
    t0 = time.perf_counter()

    if config.method == "landweber_shrink":
        q = float(params.pop("q", 0.5))
        alpha = float(params.pop("alpha", 1e-4))
        rule_name = params.pop("rule", None)
        rule = rule_by_name(rule_name) if rule_name else None
        cfg = LandweberConfig(q=q, alpha=alpha, rule=rule, **params)
        trace = landweber_shrink(op, f, cfg)
        record = _solution_record(
            op, f, trace.iterate, q, alpha, exact_zero=True,
            extra={
                "method": config.method,
                "iterations": trace.iterations_used,
                "stop_reason": trace.stop_reason,
                "q": q,
                "alpha": alpha,
            },
        )
        if "trace" in config.outputs:
            trace.write_csv(config.outputs["trace"])
    elif config.method == "maxent":
        beta = float(params.pop("beta", 1e-3))
        g = maxent_solve(op, f, beta=beta, **params)
        entropy_pen = beta * float(np.sum(g * np.log(g)))
        record = _solution_record(
            op, f, g, q=1.0, alpha=0.0, exact_zero=False,
            extra={"method": config.method, "beta": beta},
        )
        record["penalty"] = entropy_pen
        record["objective"] = record["residual_norm"] ** 2 + entropy_pen
    else:  # closed_form
        q = float(params.pop("q", 0.5))
        alpha = float(params.pop("alpha", 1e-4))
        rule_name = params.pop("rule", None)
        rule = rule_by_name(rule_name) if rule_name else hard_soft_rule(min(q, 1.0))
        variant = params.pop("variant", "direct")
        vp = VariationalProblem(
            forward=ForwardProblem.from_operator(op, f),
            biframe=BiFrame.identity(op.shape[1]),
            weights=np.full(op.shape[1], alpha),
            q=q,
        )
        g = variational_minimizer(vp, rule, variant=variant)
        record = _solution_record(
            op, f, g, q, alpha, exact_zero=True,
            extra={"method": config.method, "q": q, "alpha": alpha,
                   "variant": variant},
        )

    _write_json(config.outputs["solution"], record)
    print(
        f"{config.method}: wall time {time.perf_counter() - t0:.3f}s, "
        f"residual {record['residual_norm']:.6g}, "
        f"nonzeros {record['nonzeros']}",
        file=sys.stderr,
    )
    return 0


def _select_beta(betas, res_sq, entropies) -> int:
    """Corner of the maxent trade-off curve.

    The entropy term may be negative, so instead of log-log the corner is
    found on (log residual^2, entropy), both normalized to [0, 1]."""
    x = np.log10(np.maximum.accumulate(np.asarray(res_sq, dtype=float)))
    y = np.asarray(entropies, dtype=float)
    x = (x - x.min()) / (np.ptp(x) or 1.0)
    y = (y - y.min()) / (np.ptp(y) or 1.0)
    try:
        return corner_index(x, y, scale="linear")
    except ValueError:
        return len(betas) // 2


def compare_run(
    problem: fredholm.FredholmProblem,
    q: float,
    alphas: np.ndarray,
    betas: np.ndarray,
    outdir: Path,
    sweep_max_iters: int = 40_000,
    final_max_iters: int = 60_000,
    rel_tol: float = 1e-8,
) -> dict:
    """Sparse-vs-smooth comparison on one problem.

    Runs the nonnegative shrinked Landweber solver with the weight picked
    by the log-log corner of its trade-off curve, and the maxent baseline
    with the weight picked by the corner of its own curve, then writes
    per-method solutions and a joint summary.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    f = fredholm.observe(problem)
    op = problem.kernel_matrix

    curve = sweep_alpha(
        op,
        f,
        alphas,
        q=q,
        solver="landweber",
        solver_options={
            "nonneg": True,
            "max_iters": sweep_max_iters,
            "rel_tol": rel_tol,
        },
    )
    alpha_star = max_curvature_alpha(curve, scale="loglog")
    cfg = LandweberConfig(
        q=q, alpha=alpha_star, nonneg=True, max_iters=final_max_iters,
        rel_tol=1e-9,
    )
    trace = landweber_shrink(op, f, cfg)
    landweber_rec = _solution_record(
        op, f, trace.iterate, q, alpha_star, exact_zero=True,
        extra={
            "method": "landweber_shrink",
            "q": q,
            "alpha": alpha_star,
            "iterations": trace.iterations_used,
            "stop_reason": trace.stop_reason,
        },
    )
    trace.write_csv(outdir / "landweber_trace.csv")

    maxent_sols = []
    res_sq, entropies = [], []
    g_warm = None
    for beta in betas[::-1]:  # large to small, warm-started chain
        g = maxent_solve(op, f, beta=float(beta), g0=g_warm)
        g_warm = g
        maxent_sols.append(g)
        r = f - op @ g
        res_sq.append(float(r @ r))
        entropies.append(float(np.sum(g * np.log(g))))
    maxent_sols = maxent_sols[::-1]
    res_sq, entropies = res_sq[::-1], entropies[::-1]
    j = _select_beta(betas, res_sq, entropies)
    maxent_rec = _solution_record(
        op, f, maxent_sols[j], q=1.0, alpha=0.0, exact_zero=False,
        extra={"method": "maxent", "beta": float(betas[j])},
    )
    maxent_rec["penalty"] = float(betas[j]) * entropies[j]
    maxent_rec["objective"] = res_sq[j] + maxent_rec["penalty"]

    _write_json(outdir / "landweber.json", landweber_rec)
    _write_json(outdir / "maxent.json", maxent_rec)
    summary = {
        "problem": problem.metadata(),
        "q": q,
        "rows": [
            {k: rec[k] for k in ("method", "residual_norm", "nonzeros", "peaks")}
            for rec in (landweber_rec, maxent_rec)
        ],
        "alpha": alpha_star,
        "beta": float(betas[j]),
    }
    _write_json(outdir / "summary.json", summary)
    with open(outdir / "summary.csv", "w") as fh:
        fh.write("method,weight,residual_norm,nonzeros,peaks\n")
        for rec, w in ((landweber_rec, alpha_star), (maxent_rec, float(betas[j]))):
            peaks = ";".join(str(i) for i in rec["peaks"])
            fh.write(
                f"{rec['method']},{w!r},{rec['residual_norm']!r},"
                f"{rec['nonzeros']},{peaks}\n"
            )
    return summary


# ---------------------------------------------------------------- commands


def _cmd_gen_problem(args) -> int:
    if args.spikes:
        spikes = _parse_spikes(args.spikes)
        x = np.linspace(0.0, 1.0, args.m)
        y = np.linspace(0.0, 1.0, args.p or args.m)
        params = (
            {"t": args.kernel_t, "w": args.kernel_w}
            if args.kind == "sigmoid_front"
            else {"s": args.kernel_s}
        )
        kernel = fredholm.make_synthetic_kernel(args.kind, params, x, y)
        truth = fredholm.make_sparse_truth(args.m, spikes)
        sigma = (
            args.sigma
            if args.sigma is not None
            else 1e-2 * float(np.max(np.abs(kernel @ truth)))
        )
        problem = fredholm.FredholmProblem(
            x_grid=x, y_grid=y, kernel_matrix=kernel, ground_truth=truth,
            noise_sigma=sigma, seed=args.seed,
            kernel_spec={"kind": args.kind, "params": params},
        )
    else:
        problem = fredholm.default_benchmark(
            m=args.m, p=args.p, noise_sigma=args.sigma, seed=args.seed,
            kernel_kind=args.kind,
        )
    fredholm.save_problem(args.out, problem)
    print(f"wrote {args.out} (snr {problem.snr():.3g})", file=sys.stderr)
    return 0


def _cmd_solve(args) -> int:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        if not args.input or not args.out:
            raise ConfigError("solve requires --input and --out (or --config)")
        outputs = {"solution": args.out}
        if args.trace:
            outputs["trace"] = args.trace
        config = ExperimentConfig(
            problem=args.input,
            method="landweber_shrink",
            params={
                "q": args.q,
                "alpha": args.alpha,
                "rule": args.rule,
                "nonneg": args.nonneg,
                "max_iters": args.max_iters,
                "rel_tol": args.tol,
            },
            outputs=outputs,
            seed=args.seed,
        )
    return run_benchmark(config)


def _cmd_maxent(args) -> int:
    config = ExperimentConfig(
        problem=args.input,
        method="maxent",
        params={"beta": args.beta, "max_iters": args.iters, "tol": args.tol},
        outputs={"solution": args.out},
        seed=args.seed,
    )
    return run_benchmark(config)


def _cmd_varmin(args) -> int:
    op = load_matrix(args.operator)
    h = _load_vector(args.data)
    if args.frame:
        primal = Frame(load_matrix(args.frame))
        dual = Frame(load_matrix(args.dual)) if args.dual else None
        biframe = (
            BiFrame(primal, dual) if dual is not None else BiFrame.canonical(primal)
        )
    else:
        biframe = BiFrame.identity(op.shape[1])
    rule = rule_by_name(args.rule)
    problem = VariationalProblem(
        forward=ForwardProblem.from_operator(op, h),
        biframe=biframe,
        weights=np.full(biframe.size, args.alpha),
        q=args.q,
    )
    g_hat = variational_minimizer(problem, rule, variant=args.variant)
    res_sq, pen, total = analysis_objective(problem, g_hat)

    rng = np.random.default_rng(args.seed)
    probes = [g_hat, np.zeros_like(g_hat)]
    scale = float(np.linalg.norm(g_hat)) or 1.0
    for _ in range(args.probes):
        probes.append(rng.standard_normal(g_hat.size) * scale)
        sparse = np.zeros(g_hat.size)
        k = max(1, g_hat.size // 10)
        sparse[rng.choice(g_hat.size, size=k, replace=False)] = (
            rng.standard_normal(k) * scale
        )
        probes.append(sparse)
    ratios = []
    for g in probes:
        den = analysis_objective(problem, g)[2]
        ratios.append(1.0 if den == total == 0.0 else total / den if den else np.inf)

    _write_json(
        args.out,
        {
            "variant": args.variant,
            "rule": args.rule,
            "q": args.q,
            "alpha": args.alpha,
            "residual_sq": res_sq,
            "penalty": pen,
            "objective": total,
            "solution": [float(x) for x in g_hat],
            "audit": {"n_probes": len(probes), "max_ratio": float(np.max(ratios))},
        },
    )
    return 0


def _cmd_prox_audit(args) -> int:
    v_spec, _, a_spec = args.grid.partition(",")
    if not a_spec:
        raise ConfigError("grid spec must be 'vlo:vhi:nv,alo:ahi:na'")
    vs = _parse_logspace(v_spec)
    als = _parse_logspace(a_spec)
    V, A = np.meshgrid(np.concatenate([-vs, vs]), als, indexing="ij")
    rule = rule_by_name(args.rule)
    v, alpha, s_obj, o_obj, ratio = audit_table(args.q, rule, V.ravel(), A.ravel())
    with open(args.out, "w") as fh:
        fh.write("v,alpha,shrink_obj,oracle_obj,ratio\n")
        for row in zip(v, alpha, s_obj, o_obj, ratio):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    print(
        f"prox-audit {args.rule} q={args.q:g}: max ratio {float(np.max(ratio)):.12g} "
        f"over {v.size} pairs",
        file=sys.stderr,
    )
    return 0


def _cmd_lcurve(args) -> int:
    problem = fredholm.load_problem(args.input)
    f = fredholm.observe(problem)
    alphas = _parse_logspace(args.alphas)
    options = {}
    if args.solver == "landweber":
        options = {
            "nonneg": args.nonneg, "max_iters": args.max_iters,
            "rel_tol": args.tol,
        }
    curve = sweep_alpha(
        problem.kernel_matrix, f, alphas, q=args.q,
        rule=rule_by_name(args.rule) if args.rule else None,
        solver=args.solver, solver_options=options,
    )
    chosen = max_curvature_alpha(curve, scale=args.scale)
    kappa = menger_curvatures(curve.residual_sq, curve.penalties, scale=args.scale)
    with open(args.out, "w") as fh:
        fh.write("alpha,residual_sq,penalty,curvature,chosen\n")
        for a, r, p, k in zip(curve.alphas, curve.residual_sq, curve.penalties, kappa):
            kval = "nan" if not np.isfinite(k) else repr(float(k))
            fh.write(
                f"{float(a)!r},{float(r)!r},{float(p)!r},{kval},"
                f"{int(a == chosen)}\n"
            )
    print(f"lcurve: corner alpha {chosen:g}", file=sys.stderr)
    return 0


def _cmd_qsweep(args) -> int:
    problem = fredholm.load_problem(args.input)
    f = fredholm.observe(problem)
    try:
        qs = [float(part) for part in args.qs.split(",") if part != ""]
    except ValueError as exc:
        raise ConfigError(f"bad q list {args.qs!r}") from exc
    rows = q_sweep(
        problem.kernel_matrix,
        f,
        qs,
        _parse_logspace(args.alphas),
        solver="landweber",
        solver_options={
            "nonneg": args.nonneg, "max_iters": args.max_iters,
            "rel_tol": args.tol,
        },
    )
    with open(args.out, "w") as fh:
        fh.write("q,alpha,residual_norm,nonzeros\n")
        for row in rows:
            fh.write(
                f"{row['q']!r},{row['alpha']!r},{row['residual_norm']!r},"
                f"{row['nonzeros']}\n"
            )
    return 0


def _cmd_compare(args) -> int:
    if args.config:
        with open(args.config) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        args.input = doc.get("problem", args.input)
        args.q = doc.get("q", args.q)
        args.alphas = doc.get("alphas", args.alphas)
        args.betas = doc.get("betas", args.betas)
        args.outdir = doc.get("outdir", args.outdir)
        args.seed = doc.get("seed", args.seed)
    if not args.input or not args.outdir:
        raise ConfigError("compare requires --input and --outdir (or --config)")
    problem = fredholm.load_problem(args.input)
    if args.seed is not None:
        problem = fredholm.FredholmProblem(
            x_grid=problem.x_grid, y_grid=problem.y_grid,
            kernel_matrix=problem.kernel_matrix,
            ground_truth=problem.ground_truth,
            noise_sigma=problem.noise_sigma, seed=args.seed,
            kernel_spec=problem.kernel_spec,
        )
    t0 = time.perf_counter()
    summary = compare_run(
        problem,
        q=args.q,
        alphas=_parse_logspace(args.alphas),
        betas=_parse_logspace(args.betas),
        outdir=Path(args.outdir),
    )
    print(
        f"compare: wall time {time.perf_counter() - t0:.1f}s", file=sys.stderr
    )
    for row in summary["rows"]:
        print(
            f"  {row['method']:>17}: residual {row['residual_norm']:.6g}, "
            f"nonzeros {row['nonzeros']}, peaks {row['peaks']}",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqshrink",
        description="lq-penalized minimization experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-problem", help="write a synthetic problem file")
    p.add_argument("--out", required=True)
    p.add_argument("--kind", default="sigmoid_front",
                   choices=["sigmoid_front", "gaussian_blur"])
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--spikes", default=None,
                   help="custom truth, e.g. '45:1.0,55:0.8'")
    p.add_argument("--kernel-t", type=float, default=1.0)
    p.add_argument("--kernel-w", type=float, default=0.02)
    p.add_argument("--kernel-s", type=float, default=0.03)
    p.set_defaults(func=_cmd_gen_problem)

    p = sub.add_parser("solve", help="shrinked Landweber on a problem file")
    p.add_argument("--input")
    p.add_argument("--config", help="JSON experiment config instead of flags")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1e-4)
    p.add_argument("--rule", default=None)
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--trace", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("maxent", help="maximum-entropy baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--beta", type=float, default=1e-3)
    p.add_argument("--iters", type=int, default=20_000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_maxent)

    p = sub.add_parser("varmin", help="one-shot variational minimizer on files")
    p.add_argument("--operator", required=True, help="matrix file (.csv/.bin)")
    p.add_argument("--data", required=True, help="vector file (.csv/.bin)")
    p.add_argument("--frame", default=None)
    p.add_argument("--dual", default=None)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--rule", default="soft")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--variant", default="direct",
                   choices=["direct", "pulled_back"])
    p.add_argument("--probes", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_varmin)

    p = sub.add_parser("prox-audit", help="closed form vs brute-force oracle")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--grid", default="1e-3:1e3:25,1e-2:1e2:20",
                   help="'vlo:vhi:nv,alo:ahi:na' log grids")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_prox_audit)

    p = sub.add_parser("lcurve", help="trade-off curve and corner choice")
    p.add_argument("--input", required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--rule", default=None)
    p.add_argument("--alphas", default="1e-7:1e-1:25")
    p.add_argument("--solver", default="landweber",
                   choices=["landweber", "closed_form"])
    p.add_argument("--scale", default="loglog", choices=["loglog", "linear"])
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--max-iters", type=int, default=3000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_lcurve)

    p = sub.add_parser("qsweep", help="corner summary per exponent")
    p.add_argument("--input", required=True)
    p.add_argument("--qs", required=True, help="comma list, e.g. '0,0.5,1'")
    p.add_argument("--alphas", default="1e-7:1e-1:25")
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--max-iters", type=int, default=3000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_qsweep)

    p = sub.add_parser("compare", help="sparse solver vs maxent baseline")
    p.add_argument("--input")
    p.add_argument("--config", help="JSON config with problem/q/alphas/betas/outdir")
    p.add_argument("--q", type=float, default=0.3)
    p.add_argument("--alphas", default="1e-6:1e-2:13")
    p.add_argument("--betas", default="1e-6:1e-1:13")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--outdir")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergedError as exc:
        print(f"error: solver diverged: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
