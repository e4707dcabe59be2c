"""Regularization-weight selection along the residual/penalty trade-off.

For a uniform weight the map ``alpha -> (||h - L g_alpha||^2,
sum |coeff_n(g_alpha)|^q)`` traces a curve; the weight at its point of
maximal discrete curvature (the corner) balances data fit against
sparsity.  Curvature is the circumscribed-circle (Menger) curvature of
consecutive point triples, measured in log-log coordinates by default.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_vector
from .frames import BiFrame, ForwardProblem
from .prox import penalty_terms
from .shrinkage import ShrinkageRule, hard_soft_rule
from .solver import DivergedError, LandweberConfig, landweber_shrink
from .variational import VariationalProblem, variational_minimizer

__all__ = [
    "RegCurve",
    "sweep_alpha",
    "corner_index",
    "max_curvature_alpha",
    "menger_curvatures",
    "q_sweep",
]


@dataclass
class RegCurve:
    """Sampled trade-off curve over sorted positive weights.

    ``penalties`` carries the raw (weight-free) ``sum |coeff|^q`` term;
    ``objectives`` is ``residual_sq + alpha * penalty``.  Solutions are
    kept row-wise for later inspection.
    """

    alphas: np.ndarray
    residual_sq: np.ndarray
    penalties: np.ndarray
    objectives: np.ndarray
    q: float
    solutions: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.alphas = as_vector(self.alphas, "alphas")
        if np.any(self.alphas <= 0) or np.any(np.diff(self.alphas) <= 0):
            raise ValueError("alphas must be sorted, positive, and distinct")
        if not (self.alphas.size == self.residual_sq.size == self.penalties.size):
            raise ValueError("curve arrays must have equal length")
        # a larger weight cannot make the optimally-fit residual smaller;
        # noisy nonconvex solves may wobble, which is worth a warning only
        drops = np.diff(self.residual_sq) < -1e-10 * np.maximum(
            self.residual_sq[:-1], 1.0
        )
        if np.any(drops):
            warnings.warn(
                f"residual decreased at {int(np.sum(drops))} grid step(s); "
                "likely solver noise",
                RuntimeWarning,
                stacklevel=2,
            )

    def __len__(self) -> int:
        return self.alphas.size


def sweep_alpha(
    operator,
    data,
    alpha_grid,
    q: float,
    rule: ShrinkageRule | None = None,
    solver: str = "landweber",
    solver_options: dict | None = None,
    biframe: BiFrame | None = None,
) -> RegCurve:
    """One trade-off point per weight in ``alpha_grid``.

    ``solver="closed_form"`` evaluates the one-shot minimizer (requires
    data in the operator's range; the pseudo-inverse is factored once and
    shared across the grid, which is the point of the closed form).
    ``solver="landweber"`` runs the iterative scheme per weight.  Any
    solver error is re-raised annotated with the offending weight.
    """
    alphas = as_vector(alpha_grid, "alpha_grid")
    if np.any(alphas <= 0) or np.any(np.diff(alphas) <= 0):
        raise ValueError("alpha_grid must be sorted, positive, and distinct")
    rule = rule if rule is not None else hard_soft_rule(min(q, 1.0))
    options = dict(solver_options or {})

    operator = np.asarray(operator, dtype=float)
    data = as_vector(data, "data")
    n = operator.shape[1]
    frame = biframe if biframe is not None else BiFrame.identity(n)

    res_sq = np.empty(alphas.size)
    pens = np.empty(alphas.size)
    sols = np.empty((alphas.size, n))

    forward = None
    if solver == "closed_form":
        forward = ForwardProblem.from_operator(operator, data)
    elif solver != "landweber":
        raise ValueError(f"solver must be 'closed_form' or 'landweber', got {solver!r}")

    for i, alpha in enumerate(alphas):
        try:
            if solver == "closed_form":
                problem = VariationalProblem(
                    forward=forward,
                    biframe=frame,
                    weights=np.full(frame.size, alpha),
                    q=q,
                )
                g = variational_minimizer(problem, rule, **options)
            else:
                cfg = LandweberConfig(q=q, alpha=float(alpha), rule=rule, **options)
                g = landweber_shrink(operator, data, cfg).iterate
        except DivergedError as exc:
            raise DivergedError(f"alpha={alpha:g}: {exc}", exc.iteration) from exc
        except (ValueError, RuntimeError) as exc:
            raise type(exc)(f"alpha={alpha:g}: {exc}") from exc
        r = data - operator @ g
        res_sq[i] = float(r @ r)
        pens[i] = float(np.sum(penalty_terms(frame.coefficients(g), 1.0, q)))
        sols[i] = g

    return RegCurve(
        alphas=alphas,
        residual_sq=res_sq,
        penalties=pens,
        objectives=res_sq + alphas * pens,
        q=q,
        solutions=sols,
    )


def _transform(x, y, scale: str):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if scale == "loglog":
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(x > 0, np.log10(np.where(x > 0, x, 1.0)), np.nan)
            y = np.where(y > 0, np.log10(np.where(y > 0, y, 1.0)), np.nan)
    elif scale != "linear":
        raise ValueError(f"scale must be 'loglog' or 'linear', got {scale!r}")
    return x, y


def _menger(ax, ay, bx, by, cx, cy) -> float:
    area2 = abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    denom = (
        np.hypot(bx - ax, by - ay)
        * np.hypot(cx - bx, cy - by)
        * np.hypot(cx - ax, cy - ay)
    )
    return 0.0 if denom == 0 else 2.0 * area2 / denom


def menger_curvatures(x, y, scale: str = "loglog") -> np.ndarray:
    """Circumscribed-circle curvature at each interior point of a polyline.

    Returns an array aligned with the input (endpoints are NaN).  In
    ``loglog`` scale, points with a nonpositive coordinate get NaN.
    """
    x, y = _transform(x, y, scale)
    kappa = np.full(x.size, np.nan)
    for i in range(1, x.size - 1):
        triple = (x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1])
        if np.all(np.isfinite(triple)):
            kappa[i] = _menger(*triple)
    return kappa


# curvatures within this relative band of the maximum count as tied
_TIE_RTOL = 1e-9
# consecutive points closer than this fraction of the curve's bounding-box
# diagonal are merged: three nearly coincident points measure jitter, not
# curve shape
_DEDUP_FRAC = 1e-2


def corner_index(x, y, scale: str = "loglog") -> int:
    """Index of the corner point of the polyline ``(x, y)``.

    Nonfinite points (after the scale transform) are skipped, consecutive
    near-duplicates are merged, and the interior point of maximal Menger
    curvature wins; ties (within 1e-9 relative) resolve to the smallest
    index.  Raises ValueError when no interior point has positive
    curvature (collinear or degenerate data).
    """
    tx, ty = _transform(x, y, scale)
    keep = [i for i in range(tx.size) if np.isfinite(tx[i]) and np.isfinite(ty[i])]
    if len(keep) >= 2:
        span = np.hypot(
            np.ptp(tx[keep]), np.ptp(ty[keep])
        )
        tol = _DEDUP_FRAC * span
        pruned = [keep[0]]
        for i in keep[1:]:
            if np.hypot(tx[i] - tx[pruned[-1]], ty[i] - ty[pruned[-1]]) >= tol:
                pruned.append(i)
        keep = pruned
    if len(keep) < 3:
        raise ValueError("no curvature maximum: fewer than 3 distinct curve points")

    kappa = np.full(len(keep), np.nan)
    for j in range(1, len(keep) - 1):
        a, b, c = keep[j - 1], keep[j], keep[j + 1]
        kappa[j] = _menger(tx[a], ty[a], tx[b], ty[b], tx[c], ty[c])
    best = np.nanmax(kappa)
    if not np.isfinite(best) or best <= 0.0:
        raise ValueError("no curvature maximum: curve is collinear")
    tied = np.flatnonzero(kappa >= best * (1.0 - _TIE_RTOL))
    return keep[int(tied[0])]


def max_curvature_alpha(curve: RegCurve, scale: str = "loglog") -> float:
    """Weight at the trade-off curve's corner: the interior grid point of
    maximal discrete curvature; among ties the smallest weight wins.
    Needs at least 5 points; a degenerate (collinear) curve has no
    curvature maximum and raises.

    Selection runs on the curve's monotone envelope (residual
    nondecreasing, penalty nonincreasing in the weight): measured
    violations of that ordering are solver noise by the RegCurve
    invariant and would otherwise read as spurious corners.
    """
    if len(curve) < 5:
        raise ValueError(f"need at least 5 curve points, got {len(curve)}")
    res_env = np.maximum.accumulate(curve.residual_sq)
    pen_env = np.minimum.accumulate(curve.penalties)
    return float(curve.alphas[corner_index(res_env, pen_env, scale)])


def q_sweep(
    operator,
    data,
    q_grid,
    alpha_grid,
    rule_for=None,
    solver: str = "landweber",
    solver_options: dict | None = None,
    scale: str = "loglog",
    nonzero_atol: float = 0.0,
):
    """Corner-selected summary per exponent: rows of
    ``(q, alpha, residual_norm, nonzeros)``.

    ``rule_for(q)`` supplies the rule per exponent (hard-soft family by
    default).  Nonzeros are exact-zero counts unless ``nonzero_atol``
    sets a relative-to-peak threshold.
    """
    rows = []
    for q in q_grid:
        rule = hard_soft_rule(q) if rule_for is None else rule_for(q)
        curve = sweep_alpha(
            operator,
            data,
            alpha_grid,
            q=q,
            rule=rule,
            solver=solver,
            solver_options=solver_options,
        )
        alpha = max_curvature_alpha(curve, scale=scale)
        i = int(np.flatnonzero(curve.alphas == alpha)[0])
        g = curve.solutions[i]
        if nonzero_atol > 0:
            nnz = int(np.sum(np.abs(g) > nonzero_atol * np.max(np.abs(g))))
        else:
            nnz = int(np.count_nonzero(g))
        rows.append(
            {
                "q": float(q),
                "alpha": float(alpha),
                "residual_norm": float(np.sqrt(curve.residual_sq[i])),
                "nonzeros": nnz,
            }
        )
    # smaller q promotes sparsity, so counts should not grow as q drops;
    # nonconvex solves can violate this, which is worth flagging only
    ordered = sorted(rows, key=lambda r: r["q"])
    counts = [r["nonzeros"] for r in ordered]
    if any(a > b for a, b in zip(counts, counts[1:])):
        warnings.warn(
            f"nonzero counts not monotone in q: {counts} for "
            f"q={[r['q'] for r in ordered]}",
            RuntimeWarning,
            stacklevel=2,
        )
    return rows
