"""Catalog of scalar shrinkage rules and their q-dependent adaptation.

A shrinkage rule is a map ``(x, alpha) -> rho(x, alpha)`` that pulls the
coefficient ``x`` toward zero with strength controlled by ``alpha >= 0``.
Every rule here declares the constants ``(c1, c2, rho, d)`` of the two
decay bounds it satisfies,

    |x - rho(x, alpha)| <= c1 * min(|x|, alpha)           for alpha >= 0,
    |rho(x, alpha)|     <= c2 * |x| * |x/alpha|**rho      for 0 < |x| <= d*alpha,

with the convention ``a**inf = 0`` for ``0 <= a < 1``.  A rule is a
*thresholding* rule when it additionally has a constant ``c3 > 0`` with
``|x| <= c3*alpha  =>  rho(x, alpha) = 0``; thresholding rules may declare
``rho = inf``.

All ``apply`` callables accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import check_interval

__all__ = [
    "ShrinkageRule",
    "QDependentRule",
    "AxiomReport",
    "catalog",
    "rule_by_name",
    "wrap_q",
    "hard_soft_constant",
    "hard_soft_rule",
    "soft_rule",
    "hard_rule",
    "garotte_rule",
    "hyperbolic_rule",
    "ndeg_garotte_rule",
    "poly_soft_rule",
    "diffusion1_rule",
    "diffusion2_rule",
    "firm_rule",
    "ratio_rule",
    "check_axioms",
    "default_check_grid",
]

# Upper end of the default alpha check grid; firm rules declare a threshold
# constant that is only valid for alpha below this bound (see firm_rule).
ALPHA_CHECK_MAX = 1e3


@dataclass(frozen=True)
class ShrinkageRule:
    """A named scalar shrinkage map with its declared axiom constants.

    ``rho`` may be ``math.inf`` (thresholding rules).  ``c3`` is present
    iff the rule maps the whole band ``|x| <= c3*alpha`` to exactly zero.
    """

    name: str
    apply: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    c1: float
    c2: float
    rho: float
    d: float
    c3: float | None = None

    def __call__(self, x, alpha):
        return self.apply(x, alpha)

    @property
    def is_thresholding(self) -> bool:
        return self.c3 is not None


@dataclass(frozen=True)
class QDependentRule:
    """The adaptation of ``base`` to an lq penalty with exponent ``q``.

    Evaluates ``base(x, alpha * |x|**(q-1))`` for ``x != 0`` and returns 0
    at ``x = 0``.  For ``q = 1`` this is the base rule itself.
    """

    base: ShrinkageRule
    q: float

    def __post_init__(self):
        check_interval(self.q, 0.0, 2.0, "q")

    def __call__(self, x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        if self.q == 1.0:
            # |x|**0 = 1: the wrap is the base rule itself (0 maps to 0)
            return self.base.apply(x, alpha)
        ax = np.abs(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            eff = alpha * np.where(ax > 0, ax, 1.0) ** (self.q - 1.0)
            # 0 * inf (alpha = 0 at tiny x) means no penalty: threshold 0
            eff = np.where(np.isnan(eff), 0.0, eff)
            out = self.base.apply(x, eff)
        return np.where(ax > 0, out, 0.0)

    @property
    def name(self) -> str:
        return f"{self.base.name}|q={self.q:g}"


def wrap_q(base: ShrinkageRule, q: float) -> QDependentRule:
    """Adapt ``base`` to the lq penalty exponent ``q`` in [0, 2]."""
    return QDependentRule(base=base, q=q)


def _sign(x):
    return np.sign(x)


def soft_rule() -> ShrinkageRule:
    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return np.where(np.abs(x) > alpha, x - _sign(x) * alpha, 0.0)

    return ShrinkageRule("soft", apply, c1=1.0, c2=1.0, rho=math.inf, d=1.0, c3=1.0)


def hard_rule() -> ShrinkageRule:
    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return np.where(np.abs(x) > alpha, x, 0.0)

    return ShrinkageRule("hard", apply, c1=1.0, c2=1.0, rho=math.inf, d=1.0, c3=1.0)


def garotte_rule() -> ShrinkageRule:
    """Nonnegative garotte: continuous, leaves large coefficients nearly alone."""

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        safe = np.where(x == 0, 1.0, x)
        with np.errstate(over="ignore", invalid="ignore"):
            shrunk = x - alpha * alpha / safe
        return np.where(np.abs(x) > alpha, shrunk, 0.0)

    return ShrinkageRule("garotte", apply, c1=1.0, c2=1.0, rho=math.inf, d=1.0, c3=1.0)


def hyperbolic_rule() -> ShrinkageRule:
    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        gap = np.maximum(x * x - alpha * alpha, 0.0)
        return np.where(np.abs(x) > alpha, _sign(x) * np.sqrt(gap), 0.0)

    return ShrinkageRule(
        "hyperbolic", apply, c1=1.0, c2=1.0, rho=math.inf, d=1.0, c3=1.0
    )


def ndeg_garotte_rule(n: int) -> ShrinkageRule:
    """n-degree garotte ``x**(2n+1) / (x**(2n) + alpha**(2n))``; smooth, rho = 2n."""
    if n < 1:
        raise ValueError(f"degree n must be a positive integer, got {n}")

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        safe = np.where(x == 0, 1.0, np.abs(x))
        with np.errstate(over="ignore", divide="ignore"):
            # x / (1 + (alpha/|x|)^{2n}) is the overflow-safe form
            out = x / (1.0 + (alpha / safe) ** (2 * n))
        return np.where(x == 0, 0.0, out)

    return ShrinkageRule(f"ndeg:{n}", apply, c1=1.0, c2=1.0, rho=2.0 * n, d=1.0)


def poly_soft_rule(k: int) -> ShrinkageRule:
    """Twice differentiable rule: odd-degree polynomial core, soft-like tail.

    ``x**(2k+1) / ((2k+1) alpha**(2k))`` inside ``|x| <= alpha``, then
    ``x - sign(x) (alpha - alpha/(2k+1))`` outside; rho = 2k.
    """
    if k < 1:
        raise ValueError(f"order k must be a positive integer, got {k}")

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        safe = np.where(alpha == 0, 1.0, alpha)
        with np.errstate(over="ignore", invalid="ignore"):
            inner = x * (x / safe) ** (2 * k) / (2 * k + 1)
        outer = x - _sign(x) * alpha * (2 * k) / (2 * k + 1)
        out = np.where(np.abs(x) > alpha, outer, inner)
        return np.where((alpha == 0) & (x == 0), 0.0, out)

    return ShrinkageRule(f"k:{k}", apply, c1=1.0, c2=1.0, rho=2.0 * k, d=1.0)


def diffusion1_rule() -> ShrinkageRule:
    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        # sqrt(a^2/(a^2 + 2x^2)) = a/hypot(a, sqrt(2) x), safe against
        # under/overflow of the squares
        h = np.hypot(alpha, np.sqrt(2.0) * x)
        out = x * (1.0 - alpha / np.where(h > 0, h, 1.0))
        return np.where(h > 0, out, 0.0)

    return ShrinkageRule("diff1", apply, c1=1.0, c2=1.0, rho=1.0, d=1.0)


def diffusion2_rule() -> ShrinkageRule:
    """Diffusion-derived rule ``x * exp(-0.2 alpha**8 / x**8)``, 0 at x = 0."""

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        safe = np.where(x == 0, 1.0, np.abs(x))
        with np.errstate(over="ignore"):
            out = x * np.exp(-0.2 * (alpha / safe) ** 8)
        return np.where(x == 0, 0.0, out)

    return ShrinkageRule("diff2", apply, c1=1.0, c2=1.0, rho=1.0, d=1.0)


def firm_rule(alpha1: float, alpha_max: float = ALPHA_CHECK_MAX) -> ShrinkageRule:
    """Firm shrinkage in its second threshold, with the first fixed at ``alpha1``.

    Identity for ``|x| > alpha``, zero for ``|x| <= alpha1``, linear in
    between.  Its zero band ``|x| <= min(alpha1, alpha)`` does not scale
    with alpha, so the declared ``c3 = min(1, alpha1/alpha_max)`` is a
    threshold constant only for ``alpha <= alpha_max``.
    """
    if alpha1 <= 0:
        raise ValueError(f"alpha1 must be positive, got {alpha1}")

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        ax = np.abs(x)
        denom = np.where(alpha > alpha1, alpha - alpha1, 1.0)
        mid = _sign(x) * alpha * (ax - alpha1) / denom
        out = np.where((alpha > alpha1) & (ax >= alpha1) & (ax <= alpha), mid, 0.0)
        return np.where(ax > alpha, x, out)

    c3 = min(1.0, alpha1 / alpha_max)
    return ShrinkageRule(
        f"firm:{alpha1:g}", apply, c1=1.0, c2=1.0, rho=math.inf, d=c3, c3=c3
    )


def ratio_rule() -> ShrinkageRule:
    """``x / (1 + alpha/|x|)``; its q-adaptation at q = 2 is the exact
    minimizer ``x / (1 + alpha)`` of the quadratic-penalty problem."""

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        safe = np.where(x == 0, 1.0, np.abs(x))
        with np.errstate(over="ignore", divide="ignore"):
            out = x / (1.0 + alpha / safe)
        return np.where(x == 0, 0.0, out)

    return ShrinkageRule("ratio", apply, c1=1.0, c2=1.0, rho=1.0, d=1.0)


def hard_soft_constant(q):
    """Threshold constant of the hard-soft family on [0, 1].

    ``2**(q-2) * (2-q)**(2-q) / (1-q)**(1-q)`` with the continuous
    extension ``0**0 = 1`` at q = 1.  Decreases from 1 at q = 0 to 1/2 at
    q = 1.  Accepts scalars or arrays.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or np.any(q > 1):
        raise ValueError("q must lie in [0, 1]")
    # IEEE pow gives 0.0**0.0 == 1.0, exactly the continuous extension
    out = 2.0 ** (q - 2.0) * (2.0 - q) ** (2.0 - q) / (1.0 - q) ** (1.0 - q)
    return out if out.ndim else float(out)


def hard_soft_rule(q: float) -> ShrinkageRule:
    """Thresholding rule interpolating hard (q = 0) and soft (q = 1).

    ``(x - sign(x) q c alpha) 1_{|x| > c alpha}`` with ``c`` the hard-soft
    constant for ``q``.  The jump at ``|x| = c*alpha`` has size
    ``(1-q) c alpha`` and ``|x - rho(x, alpha)| = q c alpha`` beyond it.
    At q = 1 this is ``soft(x, alpha/2)``; its q-adaptation at q = 0 is
    ``hard(x, sqrt(alpha))``.
    """
    check_interval(q, 0.0, 1.0, "q")
    c = hard_soft_constant(q)

    def apply(x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return np.where(np.abs(x) > c * alpha, x - _sign(x) * (q * c) * alpha, 0.0)

    return ShrinkageRule(
        f"hs:{q:g}", apply, c1=1.0, c2=1.0, rho=math.inf, d=c, c3=c
    )


def catalog() -> list[ShrinkageRule]:
    """All fixed rules of the library, with their declared constants."""
    return [
        hard_rule(),
        soft_rule(),
        garotte_rule(),
        hyperbolic_rule(),
        ndeg_garotte_rule(1),
        ndeg_garotte_rule(2),
        poly_soft_rule(1),
        poly_soft_rule(2),
        diffusion1_rule(),
        diffusion2_rule(),
        firm_rule(1.0),
        firm_rule(2.0),
        ratio_rule(),
    ]


def rule_by_name(name: str) -> ShrinkageRule:
    """Resolve a rule from its CLI/config string name.

    Plain names: ``soft``, ``hard``, ``garotte``, ``hyperbolic``,
    ``diff1``, ``diff2``, ``ratio``.  Parameterized: ``ndeg:N``, ``k:K``,
    ``firm:A1``, ``hs:Q``.
    """
    plain = {
        "soft": soft_rule,
        "hard": hard_rule,
        "garotte": garotte_rule,
        "hyperbolic": hyperbolic_rule,
        "diff1": diffusion1_rule,
        "diff2": diffusion2_rule,
        "ratio": ratio_rule,
    }
    if name in plain:
        return plain[name]()
    kind, sep, arg = name.partition(":")
    if not sep:
        raise ValueError(f"unknown shrinkage rule {name!r}")
    try:
        if kind == "ndeg":
            return ndeg_garotte_rule(int(arg))
        if kind == "k":
            return poly_soft_rule(int(arg))
        if kind == "firm":
            return firm_rule(float(arg))
        if kind == "hs":
            return hard_soft_rule(float(arg))
    except ValueError as exc:
        raise ValueError(f"bad parameter in rule name {name!r}: {exc}") from exc
    raise ValueError(f"unknown shrinkage rule {name!r}")


@dataclass
class AxiomReport:
    """Outcome of an empirical axiom check over a sample grid.

    Each violation entry is ``(x, alpha, lhs, bound)`` for the failing
    inequality; thresholding violations record the nonzero value as lhs.
    """

    rule_name: str
    n_points: int
    closeness_violations: list[tuple] = field(default_factory=list)
    decay_violations: list[tuple] = field(default_factory=list)
    threshold_violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.closeness_violations
            or self.decay_violations
            or self.threshold_violations
        )

    def summary(self) -> str:
        status = "ok" if self.ok else "VIOLATIONS"
        return (
            f"{self.rule_name}: {status} over {self.n_points} points "
            f"(closeness {len(self.closeness_violations)}, "
            f"decay {len(self.decay_violations)}, "
            f"threshold {len(self.threshold_violations)})"
        )


def default_check_grid() -> tuple[np.ndarray, np.ndarray]:
    """Default sample grid: x in +-logspace(1e-4, 1e4, 200) plus 0,
    alpha in logspace(1e-3, 1e3, 50) plus 0."""
    xs = np.logspace(-4, 4, 200)
    x = np.concatenate([-xs[::-1], [0.0], xs])
    alpha = np.concatenate([[0.0], np.logspace(-3, 3, 50)])
    return x, alpha


# Floating-point slack for the empirical inequality checks; the declared
# constants are meant exactly, the slack only absorbs rounding.
_REL_SLACK = 1e-9
_ABS_SLACK = 1e-12


def check_axioms(
    rule: ShrinkageRule,
    grid: tuple[np.ndarray, np.ndarray] | None = None,
) -> AxiomReport:
    """Empirically verify the two decay bounds and the threshold band.

    ``grid`` is a pair ``(x_values, alpha_values)``; all pairs are
    checked.  Report-only: violations are collected, never raised.
    """
    x_vals, a_vals = default_check_grid() if grid is None else grid
    x = np.asarray(x_vals, dtype=float).ravel()
    alpha = np.asarray(a_vals, dtype=float).ravel()
    if x.size == 0 or alpha.size == 0:
        raise ValueError("check grid must be nonempty")

    X, A = np.meshgrid(x, alpha, indexing="ij")
    X, A = X.ravel(), A.ravel()
    R = np.asarray(rule.apply(X, A), dtype=float)
    report = AxiomReport(rule.name, n_points=X.size)

    ax = np.abs(X)
    # closeness bound: |x - rho| <= c1 * min(|x|, alpha)
    lhs1 = np.abs(X - R)
    rhs1 = rule.c1 * np.minimum(ax, A)
    bad1 = lhs1 > rhs1 * (1 + _REL_SLACK) + _ABS_SLACK
    for i in np.flatnonzero(bad1):
        report.closeness_violations.append((X[i], A[i], lhs1[i], rhs1[i]))

    # decay bound on 0 < |x| <= d*alpha (alpha > 0)
    zone = (A > 0) & (ax <= rule.d * A)
    if math.isinf(rule.rho):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(A > 0, ax / A, np.inf)
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        bound = np.where(ratio < 1.0, 0.0, rule.c2 * ax)
    else:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            bound = rule.c2 * ax * np.where(A > 0, ax / A, np.inf) ** rule.rho
        bound = np.where(np.isnan(bound), np.inf, bound)
    lhs2 = np.abs(R)
    bad2 = zone & (lhs2 > bound * (1 + _REL_SLACK) + _ABS_SLACK)
    for i in np.flatnonzero(bad2):
        report.decay_violations.append((X[i], A[i], lhs2[i], bound[i]))

    # threshold band: |x| <= c3*alpha must map to exactly zero
    if rule.c3 is not None:
        bad3 = (ax <= rule.c3 * A) & (R != 0.0)
        for i in np.flatnonzero(bad3):
            report.threshold_violations.append((X[i], A[i], R[i], 0.0))

    return report
