"""The decoupled scalar minimization behind every closed-form minimizer.

For data ``v`` and nonnegative weights ``alpha_n`` the decoupled problem is

    minimize_w  ||v - w||^2 + sum_n alpha_n |w_n|^q,        0 <= q <= 2,

which splits into independent scalar problems.  ``shrink_minimize`` solves
it in closed form, up to a constant factor, by applying a q-adapted
shrinkage rule componentwise; ``oracle_scalar`` is a slow brute-force
global minimizer (dense grid plus golden-section refinement) used to
verify every closed-form claim.  The two routes are kept independent on
purpose: the oracle never calls shrinkage code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_vector, check_interval, check_nonneg
from .shrinkage import ShrinkageRule, hard_soft_constant, wrap_q

__all__ = [
    "DecoupledProblem",
    "ProxResult",
    "penalty_terms",
    "lq_penalty",
    "decoupled_objective",
    "shrink_minimize",
    "oracle_scalar",
    "oracle_minimize",
    "zero_threshold",
    "constant_factor_audit",
    "audit_table",
    "log_sample_grid",
]

ORACLE_GRID_POINTS = 10_000
ORACLE_REFINE_TOL = 1e-12


def penalty_terms(omega, weights, q):
    """Elementwise ``alpha * |omega|**q`` with the counting convention
    ``0**0 = 0`` at q = 0."""
    omega = np.asarray(omega, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if q == 0:
        return weights * (omega != 0.0)
    if q == 1:
        return weights * np.abs(omega)
    return weights * np.abs(omega) ** q


def lq_penalty(omega, weights, q) -> float:
    """Weighted lq penalty ``sum_n alpha_n |omega_n|**q``."""
    return float(np.sum(penalty_terms(omega, weights, q)))


def decoupled_objective(v, omega, weights, q) -> float:
    """``||v - omega||^2 + sum_n alpha_n |omega_n|**q``."""
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return float(np.sum((v - omega) ** 2)) + lq_penalty(omega, weights, q)


@dataclass(frozen=True)
class DecoupledProblem:
    """A finite instance ``(v, weights, q)`` of the decoupled problem."""

    v: np.ndarray
    weights: np.ndarray
    q: float

    def __post_init__(self):
        object.__setattr__(self, "v", as_vector(self.v, "v"))
        object.__setattr__(self, "weights", as_vector(self.weights, "weights"))
        if self.v.shape != self.weights.shape:
            raise ValueError(
                f"v and weights must have equal length, got "
                f"{self.v.size} and {self.weights.size}"
            )
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        check_interval(self.q, 0.0, 2.0, "q")

    def objective(self, omega) -> float:
        return decoupled_objective(self.v, omega, self.weights, self.q)


@dataclass(frozen=True)
class ProxResult:
    omega: np.ndarray
    objective: float
    ratio_to_oracle: float | None = None


def shrink_minimize(
    problem: DecoupledProblem, rule: ShrinkageRule, audit_oracle: bool = False
) -> ProxResult:
    """Closed-form constant-factor minimizer via the q-adapted rule.

    Applies ``rule(v_n, alpha_n |v_n|**(q-1))`` componentwise.  Requires
    ``q >= 1/rho`` for the rule's decay exponent (``1/inf = 0``).  With
    ``audit_oracle`` the (slow) global oracle is also run and the
    objective ratio recorded on the result.
    """
    q_min = 0.0 if math.isinf(rule.rho) else 1.0 / rule.rho
    if problem.q < q_min:
        raise ValueError(
            f"rule {rule.name!r} (rho={rule.rho:g}) requires q >= {q_min:g}, "
            f"got q={problem.q:g}"
        )
    omega = np.asarray(wrap_q(rule, problem.q)(problem.v, problem.weights), dtype=float)
    objective = problem.objective(omega)
    ratio = None
    if audit_oracle:
        w_star = oracle_minimize(problem.v, problem.weights, problem.q)
        best = problem.objective(w_star)
        ratio = 1.0 if objective == best == 0.0 else objective / best
    return ProxResult(omega=omega, objective=objective, ratio_to_oracle=ratio)


def _scalar_terms(t, a, alpha, q):
    """Objective ``(a - t)**2 + alpha * t**q`` elementwise, t >= 0."""
    if q == 0:
        pen = alpha * (t > 0)
    elif q == 1:
        pen = alpha * t
    elif q == 2:
        pen = alpha * t * t
    else:
        pen = alpha * t**q
    return (a - t) ** 2 + pen


def _scalar_slope(t, a, alpha, q):
    """Derivative ``-2(a - t) + alpha q t**(q-1)`` for t > 0 (penalty
    gradient is 0 for q = 0, where the penalty is constant on t > 0)."""
    if q == 0:
        pen = 0.0
    elif q == 1:
        pen = alpha
    else:
        with np.errstate(divide="ignore", over="ignore"):
            pen = alpha * q * t ** (q - 1.0)
    return -2.0 * (a - t) + pen


def oracle_minimize(v, alpha, q) -> np.ndarray:
    """Brute-force global minimizers of ``(v - w)**2 + alpha |w|**q``,
    vectorized over arrays ``v`` and ``alpha``.

    A minimizer always satisfies ``sign(w) in {0, sign(v)}`` and
    ``|w| <= |v|``: projecting any w outside [0, v] (taking v >= 0) onto
    the interval decreases the quadratic term and never increases
    ``|w|**q``.  The search is therefore a dense grid over [0, |v|]
    followed by golden-section refinement in the best grid cell, with an
    explicit comparison against w = 0 where the penalty is non-smooth.
    Ties between 0 and a nonzero minimizer resolve to the nonzero one.
    """
    check_interval(q, 0.0, 2.0, "q")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), v.shape).astype(float)
    if np.any(alpha < 0):
        raise ValueError("alpha must be nonnegative")

    sign = np.sign(v)
    a = np.abs(v).ravel()
    al = alpha.ravel()
    n = a.size
    best = np.zeros(n)

    live = a > 0
    idx = np.flatnonzero(live)
    if idx.size:
        a_l, al_l = a[idx], al[idx]
        frac = np.linspace(0.0, 1.0, ORACLE_GRID_POINTS)
        lo = np.empty(idx.size)
        hi = np.empty(idx.size)
        # dense grid, chunked to bound memory; t = 0 is compared at the end
        chunk = max(1, int(5e6) // ORACLE_GRID_POINTS)
        for s in range(0, idx.size, chunk):
            aa = a_l[s : s + chunk, None]
            al_c = al_l[s : s + chunk, None]
            tt = aa * frac[None, :]
            vals = tt - aa
            np.square(vals, out=vals)
            if q == 0:
                vals[:, 1:] += al_c  # grid points past 0 are all nonzero
            else:
                if q == 1:
                    pen = tt
                    pen *= al_c
                elif q == 2:
                    pen = tt * tt
                    pen *= al_c
                else:
                    pen = tt**q
                    pen *= al_c
                vals += pen
            j = 1 + np.argmin(vals[:, 1:], axis=1)
            lo[s : s + chunk] = aa[:, 0] * frac[np.maximum(j - 1, 0)]
            hi[s : s + chunk] = aa[:, 0] * frac[np.minimum(j + 1, ORACLE_GRID_POINTS - 1)]
        cell_lo, cell_hi = lo.copy(), hi.copy()

        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        width0 = float(np.max(hi - lo))
        n_iter = 1
        if width0 > ORACLE_REFINE_TOL:
            n_iter = int(math.ceil(math.log(ORACLE_REFINE_TOL / width0) / math.log(invphi)))
        for _ in range(max(n_iter, 1)):
            gap = invphi * (hi - lo)
            t1 = hi - gap
            t2 = lo + gap
            f1 = _scalar_terms(t1, a_l, al_l, q)
            f2 = _scalar_terms(t2, a_l, al_l, q)
            keep_low = f1 < f2
            hi = np.where(keep_low, t2, hi)
            lo = np.where(keep_low, lo, t1)
        t_ref = 0.5 * (lo + hi)
        f_ref = _scalar_terms(t_ref, a_l, al_l, q)

        # The objective is flat to machine precision within ~sqrt(eps) of an
        # interior minimizer, which caps value-only search there.  Where the
        # slope changes sign across the original grid cell, bisect it to
        # recover the minimizer to full precision.
        blo = np.maximum(cell_lo, a_l * 1e-300)
        bhi = cell_hi
        straddle = (_scalar_slope(blo, a_l, al_l, q) <= 0) & (
            _scalar_slope(bhi, a_l, al_l, q) >= 0
        )
        for _ in range(60):
            mid = 0.5 * (blo + bhi)
            neg = _scalar_slope(mid, a_l, al_l, q) < 0
            blo = np.where(neg, mid, blo)
            bhi = np.where(neg, bhi, mid)
        t_bis = 0.5 * (blo + bhi)
        f_bis = _scalar_terms(t_bis, a_l, al_l, q)
        # the slope root is exact to ~eps; prefer it whenever its value is
        # within evaluation noise of the golden result
        take = straddle & (f_bis <= f_ref + 16 * np.finfo(float).eps * np.abs(f_ref))
        t_ref = np.where(take, t_bis, t_ref)
        f_ref = np.where(take, f_bis, f_ref)

        # snap to the right endpoint when it is at least as good
        f_end = _scalar_terms(a_l, a_l, al_l, q)
        snap = f_end <= f_ref
        t_ref = np.where(snap, a_l, t_ref)
        f_ref = np.where(snap, f_end, f_ref)
        # w = 0 wins only strictly; at a tie the nonzero minimizer is kept
        f_zero = _scalar_terms(np.zeros_like(a_l), a_l, al_l, q)
        best[idx] = np.where(f_zero < f_ref, 0.0, t_ref)

    out = sign * best.reshape(v.shape)
    return out


def oracle_scalar(v: float, alpha: float, q: float) -> float:
    """Scalar form of :func:`oracle_minimize`."""
    check_nonneg(alpha, "alpha")
    return float(oracle_minimize(np.array([v]), np.array([alpha]), q)[0])


def zero_threshold(alpha, q):
    """Radius ``(c_q alpha)**(1/(2-q))`` below which the exact minimizer
    of the scalar problem is 0, for q in [0, 1)."""
    q = float(q)
    if not (0.0 <= q < 1.0):
        raise ValueError(f"q must lie in [0, 1), got {q:g}")
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("alpha must be nonnegative")
    out = (hard_soft_constant(q) * alpha) ** (1.0 / (2.0 - q))
    return out if out.ndim else float(out)


def audit_table(q: float, rule: ShrinkageRule, v, alpha):
    """Per-pair audit of the closed form against the brute-force oracle.

    Returns ``(v, alpha, shrink_obj, oracle_obj, ratio)`` as flat arrays,
    with the convention 0/0 = 1 for the ratio.
    """
    v = np.asarray(v, dtype=float).ravel()
    alpha = np.asarray(alpha, dtype=float).ravel()
    if v.shape != alpha.shape:
        raise ValueError("v and alpha samples must have equal length")
    if v.size == 0:
        raise ValueError("audit sample must be nonempty")
    q_min = 0.0 if math.isinf(rule.rho) else 1.0 / rule.rho
    if not (q_min <= q <= 2.0):
        raise ValueError(
            f"rule {rule.name!r} requires q in [{q_min:g}, 2], got {q:g}"
        )

    omega = np.asarray(wrap_q(rule, q)(v, alpha), dtype=float)
    shrink_obj = (v - omega) ** 2 + penalty_terms(omega, alpha, q)
    w_star = oracle_minimize(v, alpha, q)
    oracle_obj = (v - w_star) ** 2 + penalty_terms(w_star, alpha, q)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = shrink_obj / oracle_obj
    ratio = np.where((shrink_obj == 0) & (oracle_obj == 0), 1.0, ratio)
    return v, alpha, shrink_obj, oracle_obj, ratio


def constant_factor_audit(q: float, rule: ShrinkageRule, sample) -> float:
    """Maximum objective ratio closed-form/oracle over a sample.

    ``sample`` is a pair of arrays ``(v_values, alpha_values)`` paired
    elementwise.  The result is finite and, up to 1e-12, at least 1.
    """
    v, alpha = sample
    _, _, _, _, ratio = audit_table(q, rule, v, alpha)
    return float(np.max(ratio))


def log_sample_grid(
    v_range=(1e-3, 1e3),
    alpha_range=(1e-2, 1e2),
    n_v: int = 33,
    n_alpha: int = 17,
):
    """Deterministic signed log grid of (v, alpha) pairs used by audits."""
    vs = np.logspace(np.log10(v_range[0]), np.log10(v_range[1]), n_v)
    vs = np.concatenate([-vs, vs])
    als = np.logspace(np.log10(alpha_range[0]), np.log10(alpha_range[1]), n_alpha)
    V, A = np.meshgrid(vs, als, indexing="ij")
    return V.ravel(), A.ravel()
