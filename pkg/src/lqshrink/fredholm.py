"""Discretized first-kind integral problems used as the experiment bed.

The forward map is ``f(y) = integral g(x) K(x, y) dx``, discretized on
two grids with trapezoidal quadrature: ``kernel_matrix[i, j] = w_j *
K(x_j, y_i)``.  Two synthetic kernels are provided:

* ``gaussian_blur``: ``K(x, y) = exp(-(x - y)^2 / (2 s^2))``, a classic
  smoothing kernel whose discretization is severely ill-conditioned for
  widths of a few grid cells;
* ``sigmoid_front``: ``K(x, y) = 1 / (1 + exp(-(y - x t) / w))``, a
  moving-front profile whose position scales with the solution variable
  (speed v(x) = x), standing in for measured sedimentation profiles.

Ground truths are sparse spike vectors; observations add seeded Gaussian
noise so every experiment is reproducible from the problem file alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import as_matrix, as_vector, check_nonneg, check_positive

__all__ = [
    "FredholmProblem",
    "trapezoid_weights",
    "make_synthetic_kernel",
    "make_sparse_truth",
    "observe",
    "default_benchmark",
    "save_problem",
    "load_problem",
]

SCHEMA = "lqshrink/fredholm-problem/1"


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Trapezoidal quadrature weights for a strictly increasing grid."""
    grid = as_vector(grid, "grid")
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least 2 points")
    w = np.zeros_like(grid)
    d = np.diff(grid)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def make_synthetic_kernel(kind: str, params: dict, x_grid, y_grid) -> np.ndarray:
    """Quadrature-weighted kernel matrix of shape (len(y_grid), len(x_grid))."""
    x = as_vector(x_grid, "x_grid")
    y = as_vector(y_grid, "y_grid")
    w = trapezoid_weights(x)
    if np.any(np.diff(y) <= 0):
        raise ValueError("y_grid must be strictly increasing")

    X = x[None, :]
    Y = y[:, None]
    if kind == "gaussian_blur":
        s = check_positive(params.get("s", 0.03), "s")
        kernel = np.exp(-((X - Y) ** 2) / (2.0 * s * s))
    elif kind == "sigmoid_front":
        t = float(params.get("t", 1.0))
        width = check_positive(params.get("w", 0.05), "w")
        kernel = 1.0 / (1.0 + np.exp(-(Y - X * t) / width))
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return kernel * w[None, :]


def make_sparse_truth(m: int, spikes) -> np.ndarray:
    """Vector of length m with one positive spike per (index, amplitude)."""
    g = np.zeros(int(m))
    seen = set()
    for pos, amp in spikes:
        pos = int(pos)
        if not 0 <= pos < m:
            raise ValueError(f"spike position {pos} outside [0, {m})")
        if pos in seen:
            raise ValueError(f"duplicate spike position {pos}")
        if not amp > 0:
            raise ValueError(f"spike amplitude must be positive, got {amp}")
        seen.add(pos)
        g[pos] = float(amp)
    return g


@dataclass(frozen=True)
class FredholmProblem:
    """A discretized first-kind problem with reproducible observations."""

    x_grid: np.ndarray
    y_grid: np.ndarray
    kernel_matrix: np.ndarray
    ground_truth: np.ndarray | None = None
    noise_sigma: float = 0.0
    seed: int = 0
    kernel_spec: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x_grid", as_vector(self.x_grid, "x_grid"))
        object.__setattr__(self, "y_grid", as_vector(self.y_grid, "y_grid"))
        object.__setattr__(
            self, "kernel_matrix", as_matrix(self.kernel_matrix, "kernel_matrix")
        )
        if self.ground_truth is not None:
            object.__setattr__(
                self, "ground_truth", as_vector(self.ground_truth, "ground_truth")
            )
        object.__setattr__(
            self, "noise_sigma", check_nonneg(self.noise_sigma, "noise_sigma")
        )
        object.__setattr__(self, "seed", int(self.seed))
        p, m = self.kernel_matrix.shape
        if m != self.x_grid.size or p != self.y_grid.size:
            raise ValueError("kernel_matrix shape must be (len(y_grid), len(x_grid))")
        if self.ground_truth is not None and self.ground_truth.size != m:
            raise ValueError("ground_truth length must match x_grid")
        norms = np.linalg.norm(self.kernel_matrix, axis=0)
        if np.any(norms == 0):
            raise ValueError("kernel_matrix has a zero column")

    @property
    def m(self) -> int:
        return self.x_grid.size

    @property
    def p(self) -> int:
        return self.y_grid.size

    def clean_data(self) -> np.ndarray:
        if self.ground_truth is None:
            raise ValueError("problem has no ground truth")
        return self.kernel_matrix @ self.ground_truth

    def snr(self) -> float:
        """``||K g*|| / (sigma sqrt(P))``; inf for noiseless problems."""
        signal = float(np.linalg.norm(self.clean_data()))
        if self.noise_sigma == 0:
            return float("inf")
        return signal / (self.noise_sigma * np.sqrt(self.p))

    def metadata(self) -> dict:
        return {
            "m": self.m,
            "p": self.p,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "snr": self.snr() if self.ground_truth is not None else None,
        }


def observe(problem: FredholmProblem) -> np.ndarray:
    """Observed data ``K g* + sigma * xi`` with seeded standard normal
    noise; identical for identical (problem, seed)."""
    clean = problem.clean_data()
    if problem.noise_sigma == 0:
        return clean
    rng = np.random.default_rng(problem.seed)
    return clean + problem.noise_sigma * rng.standard_normal(problem.p)


# Benchmark layout: four well separated spikes in the upper half of the
# grid, mirroring a nearly pure solute with a handful of species.
BENCHMARK_SPIKES = ((45, 1.0), (55, 0.8), (66, 1.2), (89, 0.9))


def default_benchmark(
    m: int = 100,
    p: int | None = None,
    noise_sigma: float | None = None,
    seed: int = 42,
    kernel_kind: str = "sigmoid_front",
    kernel_params: dict | None = None,
) -> FredholmProblem:
    """The standard synthetic benchmark (sigmoid-front kernel, 4 spikes).

    Spike indices scale with the grid size; ``noise_sigma`` defaults to
    1e-2 times the peak clean-data amplitude.  ``m = 100`` matches the
    default experiment; ``m = 1000`` gives the high-resolution variant.
    """
    p = m if p is None else p
    if kernel_params is None:
        kernel_params = (
            {"t": 1.0, "w": 0.01} if kernel_kind == "sigmoid_front" else {"s": 0.03}
        )
    x = np.linspace(0.0, 1.0, m)
    y = np.linspace(0.0, 1.0, p)
    kernel = make_synthetic_kernel(kernel_kind, kernel_params, x, y)
    scale = m / 100.0
    spikes = [(int(round(i * scale)), a) for i, a in BENCHMARK_SPIKES]
    truth = make_sparse_truth(m, spikes)
    if noise_sigma is None:
        noise_sigma = 1e-2 * float(np.max(np.abs(kernel @ truth)))
    return FredholmProblem(
        x_grid=x,
        y_grid=y,
        kernel_matrix=kernel,
        ground_truth=truth,
        noise_sigma=noise_sigma,
        seed=seed,
        kernel_spec={"kind": kernel_kind, "params": dict(kernel_params)},
    )


def _to_jsonable(problem: FredholmProblem) -> dict:
    doc = {
        "schema": SCHEMA,
        "x_grid": problem.x_grid.tolist(),
        "y_grid": problem.y_grid.tolist(),
        "quadrature": "trapezoid-on-x_grid",
        "noise_sigma": problem.noise_sigma,
        "seed": problem.seed,
        "ground_truth": None
        if problem.ground_truth is None
        else problem.ground_truth.tolist(),
    }
    if problem.kernel_spec is not None:
        doc["kernel"] = problem.kernel_spec
    else:
        doc["kernel"] = {"kind": "inline", "matrix": problem.kernel_matrix.tolist()}
    return doc


def save_problem(path, problem: FredholmProblem) -> None:
    """Write a problem as one self-describing JSON document."""
    with open(path, "w") as fh:
        json.dump(_to_jsonable(problem), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_problem(path) -> FredholmProblem:
    with open(Path(path), "r") as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unrecognized problem schema {doc.get('schema')!r}")
    x = np.array(doc["x_grid"], dtype=float)
    y = np.array(doc["y_grid"], dtype=float)
    kernel_doc = doc["kernel"]
    if kernel_doc["kind"] == "inline":
        kernel = np.array(kernel_doc["matrix"], dtype=float)
        spec = None
    else:
        kernel = make_synthetic_kernel(kernel_doc["kind"], kernel_doc["params"], x, y)
        spec = {"kind": kernel_doc["kind"], "params": dict(kernel_doc["params"])}
    truth = doc.get("ground_truth")
    return FredholmProblem(
        x_grid=x,
        y_grid=y,
        kernel_matrix=kernel,
        ground_truth=None if truth is None else np.array(truth, dtype=float),
        noise_sigma=float(doc["noise_sigma"]),
        seed=int(doc["seed"]),
        kernel_spec=spec,
    )
