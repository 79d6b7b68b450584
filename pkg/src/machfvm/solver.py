"""Linear solvers for assembled stencil operators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import StencilOperator
from .spectral import DstContext, dst_forward, dst_inverse

__all__ = [
    "SolverError",
    "ConvergenceError",
    "SolveOptions",
    "SolveReport",
    "solve_tridiagonal",
    "solve_cg",
    "mode_systems",
    "solve_dst_direct",
    "solve",
]


class SolverError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """CG stopped before reaching the requested residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolveOptions:
    method: str = "cg"
    tol: float = 1e-12
    max_iters: int | None = None  # default 10 * N**2

    def __post_init__(self):
        if self.method not in ("cg", "dst"):
            raise SolverError(f"unknown solver {self.method!r}")
        if not self.tol > 0:
            raise SolverError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class SolveReport:
    method: str
    iterations: int
    residual: float  # relative 2-norm residual


def solve_tridiagonal(sub, diag, sup, rhs) -> np.ndarray:
    """Thomas elimination; leading axes of all arguments are batch axes.

    ``sub[..., m]`` multiplies ``x[m]`` in row ``m + 1`` and ``sup[..., m]``
    multiplies ``x[m + 1]`` in row ``m``, so both have one entry less than
    ``diag``.
    """
    a = np.asarray(sub, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(sup, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.shape[-1]
    if d.shape[-1] != n or a.shape[-1] != n - 1 or c.shape[-1] != n - 1:
        raise SolverError("inconsistent tridiagonal band lengths")
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1], c.shape[:-1], d.shape[:-1])
    a = np.broadcast_to(a, shape + (n - 1,))
    b = np.broadcast_to(b, shape + (n,))
    c = np.broadcast_to(c, shape + (n - 1,))
    d = np.broadcast_to(d, shape + (n,))
    cp = np.empty(shape + (max(n - 1, 0),))
    dp = np.empty(shape + (n,))
    piv = b[..., 0]
    if np.any(piv == 0.0):
        raise SolverError("zero pivot in tridiagonal elimination")
    if n > 1:
        cp[..., 0] = c[..., 0] / piv
    dp[..., 0] = d[..., 0] / piv
    for m in range(1, n):
        piv = b[..., m] - a[..., m - 1] * cp[..., m - 1]
        if np.any(piv == 0.0):
            raise SolverError("zero pivot in tridiagonal elimination")
        if m < n - 1:
            cp[..., m] = c[..., m] / piv
        dp[..., m] = (d[..., m] - a[..., m - 1] * dp[..., m - 1]) / piv
    x = dp
    for m in range(n - 2, -1, -1):
        x[..., m] -= cp[..., m] * x[..., m + 1]
    return x


def solve_cg(
    op: StencilOperator,
    rhs: np.ndarray | None = None,
    opts: SolveOptions | None = None,
    *,
    x0: np.ndarray | None = None,
    callback: Callable[[np.ndarray], None] | None = None,
    full_output: bool = False,
):
    """Jacobi-preconditioned conjugate gradients on the operator matrix.

    Stops once ``||b - A x||_2 <= tol * ||b||_2`` holds for the true residual.
    ``callback`` receives the iterate (as a node field) after every step.
    """
    opts = opts or SolveOptions()
    b = (op.rhs if rhs is None else np.asarray(rhs, dtype=float)).reshape(-1)
    if b.size != op.size:
        raise SolverError(f"rhs has {b.size} entries, operator has {op.size}")
    A = op.to_sparse()
    dinv = 1.0 / op.diagonal().reshape(-1)
    n0 = op.shape[0] - 1
    max_iters = opts.max_iters if opts.max_iters is not None else 10 * n0 * n0
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.asarray(x0, dtype=float).reshape(-1).copy()
    if bnorm == 0.0:
        x[:] = 0.0
        return (x.reshape(op.shape), SolveReport("cg", 0, 0.0)) if full_output else x.reshape(op.shape)
    target = opts.tol * bnorm
    r = b - A @ x
    it = 0
    while True:
        z = dinv * r
        p = z.copy()
        rz = r @ z
        start = it
        while np.linalg.norm(r) > target and it < max_iters and rz > 0.0:
            Ap = A @ p
            alpha = rz / (p @ Ap)
            x += alpha * p
            r -= alpha * Ap
            it += 1
            if callback is not None:
                callback(x.reshape(op.shape))
            z = dinv * r
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
        # guard against drift between recursive and true residual
        r = b - A @ x
        res = np.linalg.norm(r)
        if res <= target:
            break
        if it >= max_iters or it == start or not np.isfinite(res):
            why = "stagnated after" if it < max_iters else "did not converge in"
            raise ConvergenceError(
                f"CG {why} {it} iterations (relative residual {res / bnorm:.3e})",
                res / bnorm, it)
    out = x.reshape(op.shape)
    return (out, SolveReport("cg", it, res / bnorm)) if full_output else out


def _column_weights(op: StencilOperator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-column (left weight, right weight, diagonal) of a five-point operator."""
    if op.kind != "five":
        raise SolverError("the DST solver needs a five-point operator")
    c = op.coeffs[:, 1:-1, 1:-1]
    for s in (1, 3, 5, 7):
        if np.any(c[s] != 0.0):
            raise SolverError("operator is not of five-point 'x' type")
    if not (np.array_equal(c[0], c[6]) and np.array_equal(c[2], c[8])):
        raise SolverError("five-point operator is not symmetric in y")
    cols = []
    for s in (0, 2, 4):
        v = c[s]
        if np.any(v != v[:, :1]):
            raise SolverError("coefficients vary along y; modes do not decouple")
        cols.append(v[:, 0])
    left, right, diag = cols
    return -2.0 * left, -2.0 * right, diag


def mode_systems(op: StencilOperator):
    """Tridiagonal bands ``(sub, diag, sup)`` of every sine mode, shape ``(N-1, .)``.

    Row ``i`` of mode ``k`` reads ``-c_l cos(k pi h) x_{i-1} + d_i x_i -
    c_r cos(k pi h) x_{i+1}``.
    """
    cl, cr, diag = _column_weights(op)
    N = op.shape[0] - 1
    cos = np.cos(np.pi * np.arange(1, N) / N)[:, None]
    sub = -cl[1:][None, :] * cos
    sup = -cr[:-1][None, :] * cos
    return sub, np.broadcast_to(diag, (N - 1, N - 1)), sup


def solve_dst_direct(op: StencilOperator, rhs: np.ndarray | None = None,
                     *, fast_transform: bool = False) -> np.ndarray:
    """Direct solve of a five-point operator by sine transform in y."""
    b = op.rhs if rhs is None else np.asarray(rhs, dtype=float)
    if b.shape != op.shape:
        raise SolverError(f"rhs shape {b.shape} does not match operator {op.shape}")
    sub, diag, sup = mode_systems(op)
    N = op.shape[0] - 1
    ctx = DstContext(N)
    bhat = dst_forward(ctx, b[1:-1, 1:-1], axis=1, fast=fast_transform)  # [i, k]
    xhat = solve_tridiagonal(sub, diag, sup, bhat.T)  # [k, i]
    x = np.zeros(op.shape)
    x[1:-1, 1:-1] = dst_inverse(ctx, xhat.T, axis=1, fast=fast_transform)
    return x


def solve(op: StencilOperator, opts: SolveOptions | None = None, rhs=None) -> np.ndarray:
    opts = opts or SolveOptions()
    if opts.method == "dst":
        return solve_dst_direct(op, rhs)
    return solve_cg(op, rhs, opts)
