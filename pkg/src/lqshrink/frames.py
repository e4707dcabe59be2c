"""Finite-dimensional frames, bi-frames, and forward-operator pseudo-inverses.

A frame here is a dense real synthesis matrix whose columns are the frame
vectors; analysis is its transpose.  A bi-frame is a (primal, dual) pair
whose cross composition ``F @ dual.T`` is the identity, so every vector
expands through the dual's analysis coefficients.  All spaces are finite
real Euclidean spaces.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import as_matrix, as_vector

__all__ = [
    "NotAFrameError",
    "Frame",
    "BiFrame",
    "ForwardProblem",
    "frame_bounds",
    "canonical_dual",
    "make_pseudo_inverse",
    "boundedness_audit",
    "save_matrix",
    "load_matrix",
]

# singular values below RANK_RTOL * sigma_max count as zero
RANK_RTOL = 1e-12
BIFRAME_TOL = 1e-10
PSEUDO_INVERSE_TOL = 1e-8


class NotAFrameError(ValueError):
    """The given vectors do not span the space (lower frame bound is 0)."""


@dataclass(frozen=True)
class Frame:
    """A spanning family in R^dim given by its synthesis matrix (dim x N)."""

    synthesis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "synthesis", as_matrix(self.synthesis, "synthesis"))

    @property
    def dim(self) -> int:
        return self.synthesis.shape[0]

    @property
    def size(self) -> int:
        return self.synthesis.shape[1]

    def synthesize(self, coeffs) -> np.ndarray:
        """Linear combination of the frame vectors: ``F @ coeffs``."""
        return self.synthesis @ np.asarray(coeffs, dtype=float)

    def analyze(self, g) -> np.ndarray:
        """Inner products with the frame vectors: ``F.T @ g``."""
        return self.synthesis.T @ np.asarray(g, dtype=float)

    def frame_operator(self) -> np.ndarray:
        return self.synthesis @ self.synthesis.T

    @classmethod
    def identity(cls, dim: int) -> "Frame":
        return cls(np.eye(dim))


def frame_bounds(frame: Frame) -> tuple[float, float]:
    """Optimal frame bounds (A, B): extreme eigenvalues of ``F @ F.T``.

    Raises :class:`NotAFrameError` when the synthesis matrix is row-rank
    deficient (the family does not span, so A = 0).
    """
    eigs = np.linalg.eigvalsh(frame.frame_operator())
    lo, hi = float(eigs[0]), float(eigs[-1])
    if hi <= 0 or lo <= RANK_RTOL * hi:
        raise NotAFrameError(
            f"columns do not span R^{frame.dim}: lower bound {lo:.3e}"
        )
    return lo, hi


def canonical_dual(frame: Frame) -> Frame:
    """Canonical dual frame: columns ``S^{-1} f_n`` for ``S = F F.T``."""
    frame_bounds(frame)  # rejects rank-deficient input
    dual = np.linalg.solve(frame.frame_operator(), frame.synthesis)
    return Frame(dual)


@dataclass(frozen=True)
class BiFrame:
    """A pair of frames with ``primal @ dual.T == Id`` on the space."""

    primal: Frame
    dual: Frame

    def __post_init__(self):
        if self.primal.dim != self.dual.dim or self.primal.size != self.dual.size:
            raise ValueError("primal and dual frames must have matching shapes")
        eye = self.primal.synthesis @ self.dual.synthesis.T
        err = np.max(np.abs(eye - np.eye(self.primal.dim)))
        if err > BIFRAME_TOL:
            raise NotAFrameError(
                f"not a bi-frame: ||F Fd.T - I||_max = {err:.3e} > {BIFRAME_TOL:g}"
            )

    @property
    def dim(self) -> int:
        return self.primal.dim

    @property
    def size(self) -> int:
        return self.primal.size

    def coefficients(self, g) -> np.ndarray:
        """Expansion coefficients ``<g, dual_n>`` reconstructing g through
        the primal synthesis."""
        return self.dual.analyze(g)

    def reconstruct(self, coeffs) -> np.ndarray:
        return self.primal.synthesize(coeffs)

    @classmethod
    def canonical(cls, frame: Frame) -> "BiFrame":
        return cls(primal=frame, dual=canonical_dual(frame))

    @classmethod
    def identity(cls, dim: int) -> "BiFrame":
        eye = Frame.identity(dim)
        return cls(primal=eye, dual=eye)


def make_pseudo_inverse(op: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse via SVD; satisfies ``L @ L# @ L == L``.

    Any generalized inverse would do for the minimization identities; the
    Moore-Penrose one is unique and numerically stable.
    """
    op = as_matrix(op, "op")
    if not np.any(op):
        raise ValueError("operator must be nonzero")
    return np.linalg.pinv(op, rcond=RANK_RTOL)


@dataclass(frozen=True)
class ForwardProblem:
    """A linear operator, a pseudo-inverse of it, and observed data."""

    op: np.ndarray
    pseudo_inverse: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        op = as_matrix(self.op, "op")
        pinv = as_matrix(self.pseudo_inverse, "pseudo_inverse")
        data = as_vector(self.data, "data")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "pseudo_inverse", pinv)
        object.__setattr__(self, "data", data)
        if pinv.shape != op.shape[::-1]:
            raise ValueError("pseudo_inverse shape must be the transpose of op's")
        if data.shape[0] != op.shape[0]:
            raise ValueError("data length must match the operator's output dim")
        resid = np.max(np.abs(op @ pinv @ op - op))
        scale = max(1.0, float(np.max(np.abs(op))))
        if resid > PSEUDO_INVERSE_TOL * scale:
            raise ValueError(
                f"pseudo-inverse identity L L# L = L fails: "
                f"residual {resid:.3e}"
            )

    @property
    def domain_dim(self) -> int:
        return self.op.shape[1]

    @property
    def range_dim(self) -> int:
        return self.op.shape[0]

    @classmethod
    def from_operator(cls, op, data) -> "ForwardProblem":
        op = as_matrix(op, "op")
        return cls(op=op, pseudo_inverse=make_pseudo_inverse(op), data=data)


def _weighted_qnorm(x, weights, q):
    x = np.abs(np.asarray(x, dtype=float))
    if q == 0:
        return float(np.sum(weights * (x != 0)))
    return float(np.sum(weights * x**q) ** (1.0 / q))


def boundedness_audit(
    op: np.ndarray,
    q: float,
    weights=None,
    n_random: int = 200,
    seed: int = 0,
) -> float:
    """Empirical lq -> lq (quasi-)norm estimate of an operator on sequences.

    Probes with every canonical basis vector plus random Gaussian and
    sparse vectors and returns the largest quasi-norm ratio.  In finite
    dimensions the quantity is always finite; this measures it, it never
    gates anything.  For q >= 1 the canonical vectors make the estimate
    exact when weights are uniform (the norm is attained at an extreme
    point); for q < 1 it is a lower bound.
    """
    op = as_matrix(op, "op")
    n = op.shape[1]
    if q < 0 or q > 2:
        raise ValueError("q must lie in [0, 2]")
    weights = np.ones(n) if weights is None else as_vector(weights, "weights")

    rng = np.random.default_rng(seed)
    probes = [np.eye(n)]
    gauss = rng.standard_normal((n, n_random))
    sparse = np.where(rng.random((n, n_random)) < 3.0 / max(n, 3), gauss, 0.0)
    probes += [gauss, sparse]

    best = 0.0
    for block in probes:
        for c in block.T:
            denom = _weighted_qnorm(c, weights, q)
            if denom == 0:
                continue
            best = max(best, _weighted_qnorm(op @ c, weights, q) / denom)
    return best


def save_matrix(path, matrix) -> None:
    """Write a matrix with a plain-text ``rows cols`` header.

    Payload format follows the extension: ``.csv`` stores one
    comma-separated text row per matrix row; ``.bin`` stores row-major
    little-endian float64.
    """
    matrix = as_matrix(matrix, "matrix")
    path = Path(path)
    rows, cols = matrix.shape
    header = f"{rows} {cols}\n"
    if path.suffix == ".csv":
        with open(path, "w") as fh:
            fh.write(header)
            for row in matrix:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
    elif path.suffix == ".bin":
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(
                struct.pack(f"<{rows * cols}d", *matrix.ravel(order="C").tolist())
            )
    else:
        raise ValueError(f"unsupported matrix extension {path.suffix!r} (use .csv or .bin)")


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`."""
    path = Path(path)
    if path.suffix == ".csv":
        with open(path, "r") as fh:
            rows, cols = map(int, fh.readline().split())
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    elif path.suffix == ".bin":
        with open(path, "rb") as fh:
            rows, cols = map(int, fh.readline().split())
            payload = fh.read(8 * rows * cols)
            data = np.array(struct.unpack(f"<{rows * cols}d", payload)).reshape(
                rows, cols
            )
    else:
        raise ValueError(f"unsupported matrix extension {path.suffix!r} (use .csv or .bin)")
    if data.shape != (rows, cols):
        raise ValueError(
            f"payload shape {data.shape} does not match header ({rows}, {cols})"
        )
    return data
