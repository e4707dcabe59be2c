"""Iterative solvers for ill-posed problems with sparsity constraints.

``landweber_shrink`` runs the fixed-point scheme

    g^0 = g0 (zero by default),
    g^{j+1} = S(g^j + T* f - T* T g^j),

where ``S`` applies a q-adapted shrinkage rule componentwise with a
uniform weight.  The operator is rescaled to spectral norm <= 0.99 by
default (the step plays the role of a 1/2 gradient step on the squared
residual, which requires norm below 1); the rescaling is equivalent to
scaling the data and the weight, so iterates, residuals, and objectives
are always reported against the original problem.

``maxent_solve`` is the comparison baseline: projected descent for the
entropy-penalized objective ``||f - T g||^2 + beta * sum g ln g`` on the
positive orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_vector, check_interval, check_nonneg, check_positive
from .prox import lq_penalty
from .shrinkage import ShrinkageRule, hard_soft_rule, wrap_q

__all__ = [
    "DivergedError",
    "LandweberConfig",
    "SolverTrace",
    "spectral_norm_estimate",
    "landweber_shrink",
    "maxent_solve",
    "objective_monotone_check",
]

OPERATOR_NORM_CAP = 0.99
MONOTONE_TOL = 1e-10


class DivergedError(RuntimeError):
    """The iteration produced non-finite values."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


def _as_operator(op):
    """Matvec/rmatvec closures for a dense matrix or anything LinearOperator-like."""
    if isinstance(op, np.ndarray):
        if op.ndim != 2:
            raise ValueError("operator array must be two-dimensional")
        return (lambda g: op @ g), (lambda r: op.T @ r), op.shape
    from scipy.sparse.linalg import aslinearoperator

    lo = aslinearoperator(op)
    return lo.matvec, lo.rmatvec, lo.shape


def spectral_norm_estimate(op, rel_tol: float = 1e-6, max_iters: int = 500) -> float:
    """Largest singular value via power iteration on ``T* T``.

    Deterministic (fixed internal seed); stops when the Rayleigh estimate
    changes by less than ``rel_tol`` relatively.
    """
    matvec, rmatvec, (m, n) = _as_operator(op)
    rng = np.random.default_rng(0)
    b = rng.standard_normal(n)
    b /= np.linalg.norm(b)
    est = 0.0
    for _ in range(max_iters):
        b_new = rmatvec(matvec(b))
        norm = float(np.linalg.norm(b_new))
        if norm == 0.0:
            return 0.0
        new_est = norm  # Rayleigh quotient of T*T for unit b
        b = b_new / norm
        if abs(new_est - est) <= rel_tol * new_est:
            est = new_est
            break
        est = new_est
    return math.sqrt(est)


@dataclass(frozen=True)
class LandweberConfig:
    """Settings of the shrinked Landweber iteration.

    ``rule`` defaults to the hard-soft rule for the given q.  ``alpha``
    is the uniform penalty weight; 0 is allowed and gives the plain
    Landweber iteration.  ``nonneg`` sets the shrink of any negative
    argument to exact zero instead of shrinking it.
    """

    q: float = 0.5
    alpha: float = 1.0
    rule: ShrinkageRule | None = None
    max_iters: int = 100_000
    rel_tol: float = 1e-8
    nonneg: bool = False
    normalize_operator: bool = True
    snapshot_every: int = 100

    def __post_init__(self):
        check_interval(self.q, 0.0, 1.0, "q")
        check_nonneg(self.alpha, "alpha")
        check_positive(self.rel_tol, "rel_tol")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def resolved_rule(self) -> ShrinkageRule:
        return self.rule if self.rule is not None else hard_soft_rule(self.q)


@dataclass
class SolverTrace:
    """Per-iteration history of a Landweber run.

    Record 0 is the starting iterate; ``objectives`` equals
    ``residual_norms**2 + penalties`` entrywise.  ``snapshots`` holds
    thinned iterate copies keyed by iteration index.
    """

    iterations: np.ndarray
    residual_norms: np.ndarray
    penalties: np.ndarray
    objectives: np.ndarray
    nonzero_counts: np.ndarray
    snapshots: dict[int, np.ndarray]
    iterate: np.ndarray
    iterations_used: int
    stop_reason: str

    @property
    def final_objective(self) -> float:
        return float(self.objectives[-1])

    @property
    def final_residual_norm(self) -> float:
        return float(self.residual_norms[-1])

    def write_csv(self, path) -> None:
        """Columns: iteration, residual_norm, penalty, objective, nonzeros
        (gnuplot-friendly, e.g. ``using 1:4`` plots the objective)."""
        with open(path, "w") as fh:
            fh.write("iteration,residual_norm,penalty,objective,nonzeros\n")
            for j, r, p, o, k in zip(
                self.iterations,
                self.residual_norms,
                self.penalties,
                self.objectives,
                self.nonzero_counts,
            ):
                fh.write(f"{int(j)},{float(r)!r},{float(p)!r},{float(o)!r},{int(k)}\n")


def landweber_shrink(op, data, config: LandweberConfig, g0=None) -> SolverTrace:
    """Run the shrinked Landweber iteration until the iterate stalls.

    Parameters
    ----------
    op : ndarray or scipy LinearOperator
        Forward operator mapping solution space to data space.
    data : array
        Observed data.
    config : LandweberConfig
    g0 : array, optional
        Starting iterate (zero vector by default; a warm start, e.g. the
        maxent solution, may be supplied here).

    Stops when ``||g_new - g|| <= rel_tol * max(||g||, 1)`` ("converged")
    or at ``max_iters``.  Raises :class:`DivergedError` on non-finite
    iterates.
    """
    matvec, rmatvec, (m, n) = _as_operator(op)
    f = as_vector(data, "data")
    if f.size != m:
        raise ValueError(f"data length {f.size} does not match operator rows {m}")

    scale_sq = 1.0
    if config.normalize_operator:
        sigma = spectral_norm_estimate(op)
        if sigma > 0:
            # rescale to exactly the cap: keeps the step condition for
            # norms above 1 and speeds up weak-norm problems; iterates,
            # residuals, and objectives stay in original coordinates
            scale_sq = (OPERATOR_NORM_CAP / sigma) ** 2
    alpha_step = scale_sq * config.alpha
    shrink = wrap_q(config.resolved_rule(), config.q)

    g = np.zeros(n) if g0 is None else as_vector(g0, "g0").copy()
    if g.size != n:
        raise ValueError(f"g0 length {g.size} does not match operator columns {n}")

    # For a dense operator the step g + T*f - T*T g runs off a precomputed
    # Gram matrix, and the residual norm comes from the same product:
    #   ||f - T g||^2 = ||f||^2 - 2 g.T*f + g.(T*T g).
    dense = isinstance(op, np.ndarray)
    if dense:
        gram = op.T @ op
        back = op.T @ f
        f_sq = float(f @ f)

    total = config.max_iters + 1
    iters = np.arange(total)
    res_norms = np.empty(total)
    pens = np.empty(total)
    nnzs = np.empty(total, dtype=int)
    snapshots: dict[int, np.ndarray] = {}
    alpha_vec = np.full(n, config.alpha)

    def residual_and_pullback(gg):
        if dense:
            w = gram @ gg
            res_sq = max(f_sq - 2.0 * float(gg @ back) + float(gg @ w), 0.0)
            return math.sqrt(res_sq), back - w
        r = f - matvec(gg)
        return float(np.linalg.norm(r)), rmatvec(r)

    def record(j, gg, res):
        res_norms[j] = res
        pens[j] = lq_penalty(gg, alpha_vec, config.q)
        nnzs[j] = np.count_nonzero(gg)
        if j % config.snapshot_every == 0:
            snapshots[j] = gg.copy()

    res, pull = residual_and_pullback(g)
    record(0, g, res)

    stop_reason = "max_iters"
    used = config.max_iters
    for j in range(1, config.max_iters + 1):
        z = g + scale_sq * pull
        g_new = np.asarray(shrink(z, alpha_step), dtype=float)
        if config.nonneg:
            g_new = np.where(z < 0, 0.0, g_new)
        if not np.all(np.isfinite(g_new)):
            raise DivergedError(
                f"non-finite iterate at iteration {j}", iteration=j
            )
        delta = float(np.linalg.norm(g_new - g))
        g_norm = float(np.linalg.norm(g))
        if not (math.isfinite(delta) and math.isfinite(g_norm)):
            raise DivergedError(
                f"iterate norm overflow at iteration {j}", iteration=j
            )
        stall = delta <= config.rel_tol * max(g_norm, 1.0)
        g = g_new
        res, pull = residual_and_pullback(g)
        if not math.isfinite(res):
            raise DivergedError(
                f"non-finite residual at iteration {j}", iteration=j
            )
        record(j, g, res)
        if stall:
            stop_reason = "converged"
            used = j
            break

    snapshots[used] = g.copy()
    n_rec = used + 1
    return SolverTrace(
        iterations=iters[:n_rec],
        residual_norms=res_norms[:n_rec],
        penalties=pens[:n_rec],
        objectives=res_norms[:n_rec] ** 2 + pens[:n_rec],
        nonzero_counts=nnzs[:n_rec],
        snapshots=snapshots,
        iterate=g,
        iterations_used=used,
        stop_reason=stop_reason,
    )


def objective_monotone_check(trace: SolverTrace) -> bool:
    """True iff the recorded objective never increases (up to 1e-10
    slack) after the first iteration.  Informational: nonconvex runs may
    legitimately fail this."""
    objs = trace.objectives
    if objs.size == 0:
        raise ValueError("trace has no records")
    if objs.size <= 2:
        return True
    tail = objs[1:]
    slack = MONOTONE_TOL * np.maximum(1.0, np.abs(tail[:-1]))
    return bool(np.all(tail[1:] <= tail[:-1] + slack))


def maxent_entropy(g) -> float:
    """``sum g ln g`` for positive g."""
    g = np.asarray(g, dtype=float)
    return float(np.sum(g * np.log(g)))


def maxent_solve(
    op,
    data,
    beta: float,
    max_iters: int = 20_000,
    tol: float = 1e-10,
    floor: float = 1e-12,
    g0=None,
) -> np.ndarray:
    """Entropy-regularized positive solution of ``f ~ T g``.

    Minimizes ``||f - T g||^2 + beta * sum g ln g`` over ``g >= floor``
    by projected gradient descent with Armijo backtracking; the entropy
    gradient is ``beta (ln g + 1)``.  Converges when the relative
    objective change drops below ``tol``.  Never returns exact zeros.
    """
    check_positive(beta, "beta")
    matvec, rmatvec, (m, n) = _as_operator(op)
    f = as_vector(data, "data")
    if f.size != m:
        raise ValueError(f"data length {f.size} does not match operator rows {m}")

    if g0 is None:
        ones = np.ones(n)
        t1 = matvec(ones)
        denom = float(t1 @ t1)
        c = float(f @ t1) / denom if denom > 0 else 1.0
        g = np.full(n, max(c, math.sqrt(floor)))
    else:
        g = np.clip(as_vector(g0, "g0"), floor, None)

    def objective(gg, rr):
        return float(rr @ rr) + beta * float(np.sum(gg * np.log(gg)))

    r = matvec(g) - f
    obj = objective(g, r)
    tau = 1.0
    for it in range(max_iters):
        grad = 2.0 * rmatvec(r) + beta * (np.log(g) + 1.0)
        accepted = False
        for _ in range(60):
            g_new = np.clip(g - tau * grad, floor, None)
            r_new = matvec(g_new) - f
            obj_new = objective(g_new, r_new)
            step = g - g_new
            if obj_new <= obj - 1e-4 / max(tau, 1e-300) * float(step @ step):
                accepted = True
                break
            tau *= 0.5
        if not np.all(np.isfinite(g_new)):
            raise DivergedError(
                f"maxent iteration produced non-finite values at step {it}",
                iteration=it,
            )
        if not accepted:
            break  # no acceptable step left: stationary to machine precision
        done = abs(obj - obj_new) <= tol * max(1.0, abs(obj))
        g, r, obj = g_new, r_new, obj_new
        tau *= 1.3
        if done:
            break
    return g
