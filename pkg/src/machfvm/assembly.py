"""MACH-like nine-point and five-point finite volume operators.

A :class:`StencilOperator` stores nine coefficients per node in the order

    (i-1, j-1), (i, j-1), (i+1, j-1),
    (i-1, j),   (i, j),   (i+1, j),
    (i-1, j+1), (i, j+1), (i+1, j+1)

so slot ``3 * (dj + 1) + (di + 1)`` couples node ``(i, j)`` to
``(i + di, j + dj)``.  The five-point "x" scheme uses slots 0, 2, 4, 6, 8.
Boundary rows are Dirichlet identity rows with zero right-hand side.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.io
import scipy.sparse as sp

from .materials import (
    AverageStrategy,
    MaterialError,
    MaterialPartition,
    area_fractions,
    average,
)
from .mesh import Grid, MeshError, control_volume_from_points

__all__ = [
    "AssemblyError",
    "MeshQualityWarning",
    "StencilOperator",
    "OFFSETS",
    "green_gauss_weights",
    "green_gauss_gradient",
    "cell_kappas",
    "five_point_cell_kappas",
    "assemble_nine_point",
    "assemble_flux_balance",
    "assemble_five_point",
    "apply_stencil",
    "write_matrix_market",
    "parity_blocks",
]

OFFSETS = tuple((di, dj) for dj in (-1, 0, 1) for di in (-1, 0, 1))
CENTER = 4
FIVE_POINT_SLOTS = (0, 2, 4, 6, 8)

# 2-point Gauss-Legendre nodes on [-1/2, 1/2]
_GAUSS2 = np.array([-0.5, 0.5]) / np.sqrt(3.0)


class AssemblyError(ValueError):
    pass


class MeshQualityWarning(UserWarning):
    """A parallelogram corner of a control volume left its cell."""


@dataclass(frozen=True)
class StencilOperator:
    coeffs: np.ndarray  # (9, nx + 1, ny + 1)
    rhs: np.ndarray  # (nx + 1, ny + 1)
    kind: str = "nine"
    grid: Grid | None = None
    kappa_minus: float | None = None
    kappa_star: float | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.rhs.shape

    @property
    def size(self) -> int:
        return self.rhs.size

    def to_sparse(self) -> sp.csr_matrix:
        """Matrix over all nodes, numbered ``p = i * (ny + 1) + j``.

        Couplings into boundary nodes are dropped; this leaves the action on
        fields with zero boundary values unchanged and keeps the matrix
        symmetric.
        """
        n0, n1 = self.shape
        idx = np.arange(n0 * n1).reshape(n0, n1)
        interior = np.zeros((n0, n1), dtype=bool)
        interior[1:-1, 1:-1] = True
        rows, cols, vals = [], [], []
        for s, (di, dj) in enumerate(OFFSETS):
            a = self.coeffs[s, 1:-1, 1:-1]
            tgt = interior[1 + di:n0 - 1 + di, 1 + dj:n1 - 1 + dj]
            keep = tgt & (a != 0.0)
            rows.append(idx[1:-1, 1:-1][keep])
            cols.append(idx[1 + di:n0 - 1 + di, 1 + dj:n1 - 1 + dj][keep])
            vals.append(a[keep])
        bnd = idx[~interior]
        rows.append(bnd)
        cols.append(bnd)
        vals.append(np.ones(bnd.size))
        A = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n0 * n1, n0 * n1),
        )
        return A.tocsr()

    def diagonal(self) -> np.ndarray:
        d = self.coeffs[CENTER].copy()
        d[0, :] = d[-1, :] = d[:, 0] = d[:, -1] = 1.0
        return d


def apply_stencil(op: StencilOperator, field: np.ndarray) -> np.ndarray:
    """Apply the discrete operator at interior nodes; boundary values pass through."""
    u = np.asarray(field, dtype=float)
    if u.shape != op.shape:
        raise AssemblyError(f"field shape {u.shape} does not match operator {op.shape}")
    n0, n1 = u.shape
    out = u.copy()
    acc = np.zeros((n0 - 2, n1 - 2))
    for s, (di, dj) in enumerate(OFFSETS):
        acc += op.coeffs[s, 1:-1, 1:-1] * u[1 + di:n0 - 1 + di, 1 + dj:n1 - 1 + dj]
    out[1:-1, 1:-1] = acc
    return out


def write_matrix_market(op: StencilOperator, target, comment: str = "") -> None:
    """Dump the operator matrix as 1-based (row, col, value) triplets."""
    scipy.io.mmwrite(target, op.to_sparse().tocoo(), comment=comment, symmetry="general")


def parity_blocks(op: StencilOperator) -> tuple[tuple[np.ndarray, sp.csr_matrix], ...]:
    """Split a five-point operator into its two checkerboard blocks.

    Returns ``((idx_even, A_even), (idx_odd, A_odd))`` where ``idx`` are flat
    node numbers with ``i + j`` even/odd and ``A`` the matching diagonal
    block.  Raises if the blocks are coupled.
    """
    A = op.to_sparse()
    n0, n1 = op.shape
    i, j = np.divmod(np.arange(n0 * n1), n1)
    par = (i + j) % 2
    if A[par == 0][:, par == 1].nnz or A[par == 1][:, par == 0].nnz:
        raise AssemblyError("operator couples nodes of different parity")
    out = []
    for q in (0, 1):
        idx = np.flatnonzero(par == q)
        out.append((idx, A[idx][:, idx].tocsr()))
    return tuple(out)


# ---------------------------------------------------------------------------
# Green-Gauss cell gradients


def green_gauss_weights(corners) -> tuple[np.ndarray, float]:
    """Weights ``w`` and area with ``grad u = (1/area) * sum_m u_m w_m``.

    Corners must be in counterclockwise order.
    """
    P = np.asarray(corners, dtype=float).reshape(-1, 2)
    nxt = np.roll(P, -1, axis=0)
    e = nxt - P
    scaled_n = np.column_stack([e[:, 1], -e[:, 0]])  # |edge| * outward normal
    area = 0.5 * float(np.sum(P[:, 0] * nxt[:, 1] - nxt[:, 0] * P[:, 1]))
    if area <= 0.0:
        raise AssemblyError("cell has zero area or clockwise orientation")
    w = 0.5 * (scaled_n + np.roll(scaled_n, 1, axis=0))
    return w, area


def green_gauss_gradient(cell, corner_values) -> np.ndarray:
    """Average gradient over a quadrilateral from its corner values.

    Each edge contributes the trapezoidal mean of its end values times its
    length and outward normal; the sum is divided by the cell area.
    """
    w, area = green_gauss_weights(cell)
    v = np.asarray(corner_values, dtype=float)
    if v.shape != (w.shape[0],):
        raise AssemblyError("need one value per cell corner")
    return (v @ w) / area


# ---------------------------------------------------------------------------
# Cell coefficients


def cell_kappas(grid: Grid, partition: MaterialPartition,
                strategy: AverageStrategy | str | None = None) -> np.ndarray:
    """Averaged coefficient for every cell, shape ``(nx, ny)``."""
    xs, ys = grid.x(), grid.y()
    out = np.empty((grid.nx, grid.ny))
    for p in range(grid.nx):
        for q in range(grid.ny):
            cell = [(xs[p], ys[q]), (xs[p + 1], ys[q]), (xs[p + 1], ys[q + 1]), (xs[p], ys[q + 1])]
            th = area_fractions(partition, cell)
            if strategy is None and np.count_nonzero(th > 0.0) > 1:
                raise MaterialError(
                    f"cell ({p}, {q}) holds several materials; an averaging strategy is required"
                )
            out[p, q] = average(partition.kappas, th, strategy)
    return out


def five_point_cell_kappas(N: int, kappa_minus: float, kappa_star: float) -> np.ndarray:
    """Cell coefficients of the two-material model: the column split by x = 1/2 gets kappa_star."""
    M = (N - 1) // 2
    col = np.where(np.arange(N) < M, kappa_minus, 1.0)
    col[M] = kappa_star
    return np.repeat(col[:, None], N, axis=1)


# ---------------------------------------------------------------------------
# Right-hand sides


def _source_callable(source) -> Callable:
    f = getattr(source, "f", source)
    if not callable(f):
        raise AssemblyError("source must be callable or carry a callable 'f'")
    return f


def _point_rhs(grid: Grid, f: Callable) -> np.ndarray:
    X, Y = grid.mesh()
    vals = np.asarray(f(X, Y), dtype=float) * np.ones(grid.shape)
    rhs = grid.hx * grid.hy * vals
    rhs[0, :] = rhs[-1, :] = rhs[:, 0] = rhs[:, -1] = 0.0
    return rhs


def _averaged_rhs(grid: Grid, f: Callable) -> np.ndarray:
    # 2x2 Gauss rule over the hx-by-hy control volume
    X, Y = grid.mesh()
    acc = np.zeros(grid.shape)
    for gx in _GAUSS2:
        for gy in _GAUSS2:
            acc += np.asarray(f(X + gx * grid.hx, Y + gy * grid.hy), dtype=float)
    rhs = 0.25 * grid.hx * grid.hy * acc
    rhs[0, :] = rhs[-1, :] = rhs[:, 0] = rhs[:, -1] = 0.0
    return rhs


def _rhs(grid: Grid, source, rhs_mode: str) -> np.ndarray:
    if source is None:
        return np.zeros(grid.shape)
    f = _source_callable(source)
    if rhs_mode == "point":
        return _point_rhs(grid, f)
    if rhs_mode == "average":
        return _averaged_rhs(grid, f)
    raise AssemblyError(f"unknown rhs_mode {rhs_mode!r}")


# ---------------------------------------------------------------------------
# Nine-point operator on uniform rectangular grids


def _nine_point_coeffs(kc: np.ndarray, hx: float, hy: float) -> np.ndarray:
    nx, ny = kc.shape
    c = np.zeros((9, nx + 1, ny + 1))
    k1 = kc[:-1, :-1]  # lower left
    k2 = kc[1:, :-1]  # lower right
    k3 = kc[1:, 1:]  # upper right
    k4 = kc[:-1, 1:]  # upper left
    s = hy / hx + hx / hy
    d = hy / hx - hx / hy
    inner = (slice(1, -1), slice(1, -1))
    c[(0, *inner)] = -0.25 * s * k1
    c[(1, *inner)] = -0.25 * (-d) * (k1 + k2)
    c[(2, *inner)] = -0.25 * s * k2
    c[(3, *inner)] = -0.25 * d * (k1 + k4)
    # left pair plus right pair so that the square-mesh diagonal is kl + kr exactly
    c[(4, *inner)] = 0.25 * s * ((k1 + k4) + (k2 + k3)) + hx * hy
    c[(5, *inner)] = -0.25 * d * (k2 + k3)
    c[(6, *inner)] = -0.25 * s * k4
    c[(7, *inner)] = -0.25 * (-d) * (k3 + k4)
    c[(8, *inner)] = -0.25 * s * k3
    return c


def assemble_nine_point(
    grid: Grid,
    partition: MaterialPartition | None = None,
    strategy: AverageStrategy | str | None = None,
    source=None,
    *,
    kappa_cells: np.ndarray | None = None,
    rhs_mode: str = "point",
) -> StencilOperator:
    """Nine-point MACH-like operator on a uniform rectangular grid.

    Cell coefficients come from ``partition`` averaged with ``strategy``, or
    directly from ``kappa_cells`` of shape ``(nx, ny)``.  ``source`` is a
    vectorized ``f(x, y)`` or an object with such an ``f`` attribute.
    ``rhs_mode="point"`` uses ``hx*hy*f(x_i, y_j)``; ``"average"`` integrates
    ``f`` over the control volume with a 2x2 Gauss rule.
    """
    if kappa_cells is None:
        if partition is None:
            raise AssemblyError("need a material partition or explicit cell coefficients")
        kappa_cells = cell_kappas(grid, partition, strategy)
    kc = np.asarray(kappa_cells, dtype=float)
    if kc.shape != (grid.nx, grid.ny):
        raise AssemblyError(f"kappa_cells must have shape {(grid.nx, grid.ny)}, got {kc.shape}")
    if np.any(kc <= 0):
        raise AssemblyError("cell coefficients must be positive")
    coeffs = _nine_point_coeffs(kc, grid.hx, grid.hy)
    return StencilOperator(coeffs, _rhs(grid, source, rhs_mode), "nine", grid)


# ---------------------------------------------------------------------------
# Flux-balance assembly on structured quadrilateral meshes

# cell Q_l around (i, j): (cell offset, CCW corner node offsets)
_QUADS = (
    ((-1, -1), ((-1, -1), (0, -1), (0, 0), (-1, 0))),
    ((0, -1), ((0, -1), (1, -1), (1, 0), (0, 0))),
    ((0, 0), ((0, 0), (1, 0), (1, 1), (0, 1))),
    ((-1, 0), ((-1, 0), (0, 0), (0, 1), (-1, 1))),
)


def _inside_convex(P: np.ndarray, q: np.ndarray) -> bool:
    e = np.roll(P, -1, axis=0) - P
    r = q - P
    return bool(np.all(e[:, 0] * r[:, 1] - e[:, 1] * r[:, 0] >= -1e-14))


def assemble_flux_balance(
    nodes: np.ndarray,
    kappa_cells: np.ndarray,
    source=None,
    *,
    rhs_mode: str = "point",
) -> StencilOperator:
    """Nine-point operator from the control-volume flux balance itself.

    Works on any structured quadrilateral mesh given as node coordinates of
    shape ``(nx + 1, ny + 1, 2)``: each cell gradient is the Green-Gauss
    average of its corner values, and each control volume collects the flux
    through its four chords plus ``|V| u``.  On uniform rectangles this
    reproduces :func:`assemble_nine_point` up to roundoff.  A
    :class:`MeshQualityWarning` is emitted when a parallelogram corner falls
    outside its cell; no further mesh-quality checks are made.
    """
    P = np.asarray(nodes, dtype=float)
    n0, n1 = P.shape[:2]
    kc = np.asarray(kappa_cells, dtype=float)
    if kc.shape != (n0 - 1, n1 - 1):
        raise AssemblyError(f"kappa_cells must have shape {(n0 - 1, n1 - 1)}")
    f = None if source is None else _source_callable(source)
    if rhs_mode not in ("point", "average"):
        raise AssemblyError(f"unknown rhs_mode {rhs_mode!r}")
    coeffs = np.zeros((9, n0, n1))
    rhs = np.zeros((n0, n1))
    bad = 0
    for i in range(1, n0 - 1):
        for j in range(1, n1 - 1):
            X = P[i, j]
            cv = control_volume_from_points(X, [P[i, j - 1], P[i + 1, j], P[i, j + 1], P[i - 1, j]])
            chords = cv.scaled_normals()
            for l, ((ci, cj), corner_off) in enumerate(_QUADS):
                corners = np.array([P[i + di, j + dj] for di, dj in corner_off])
                w, area = green_gauss_weights(corners)
                kappa = kc[i + ci, j + cj]
                # chord l joins O_{l-1} and O_l and borders cell Q_l
                flux = -kappa * (w @ chords[l]) / area
                for m, (di, dj) in enumerate(corner_off):
                    coeffs[3 * (dj + 1) + (di + 1), i, j] += flux[m]
                if not _inside_convex(corners, cv.corners[l]):
                    bad += 1
            coeffs[CENTER, i, j] += cv.area
            if f is not None:
                rhs[i, j] = _control_volume_integral(cv, f, rhs_mode)
    if bad:
        warnings.warn(f"{bad} control-volume corners lie outside their cells",
                      MeshQualityWarning, stacklevel=2)
    return StencilOperator(coeffs, rhs, "nine", None)


def _control_volume_integral(cv, f, rhs_mode: str) -> float:
    if rhs_mode == "point":
        return cv.area * float(f(*cv.center))
    # the octagon is the union of parallelograms X, O_{l-1}, A_l, O_l
    total = 0.0
    X = cv.center
    O_prev = np.roll(cv.midpoints, 1, axis=0)
    for l in range(4):
        u = O_prev[l] - X
        v = cv.midpoints[l] - X
        jac = abs(u[0] * v[1] - u[1] * v[0])
        for s in _GAUSS2 + 0.5:
            for t in _GAUSS2 + 0.5:
                total += 0.25 * jac * float(f(*(X + s * u + t * v)))
    return total


# ---------------------------------------------------------------------------
# Five-point operator of the two-material model


def assemble_five_point(grid: Grid, kappa_minus: float, kappa_star: float,
                        source=None, *, rhs_mode: str = "point") -> StencilOperator:
    """Five-point "x" scheme of the two-material model.

    Column ``i`` couples to its left diagonal neighbors with ``-c_l/2`` and to
    its right ones with ``-c_r/2``, diagonal ``c_l + c_r + h^2``, where
    ``(c_l, c_r)`` is ``(k, k)`` for i < M, ``(k, k*)`` for i = M,
    ``(k*, 1)`` for i = M + 1 and ``(1, 1)`` beyond, with ``k = kappa_minus``.
    """
    if not grid.simplified:
        raise MeshError("the five-point scheme needs the two-material model grid")
    if not kappa_minus >= 1.0:
        raise AssemblyError(f"kappa_minus must be >= 1, got {kappa_minus}")
    if not kappa_star > 0.0:
        raise AssemblyError(f"kappa_star must be positive, got {kappa_star}")
    N, h = grid.N, grid.h
    col = five_point_cell_kappas(N, kappa_minus, kappa_star)[:, 0]
    cl = col[:-1]  # cells left of nodes 1..N-1
    cr = col[1:]
    coeffs = np.zeros((9, N + 1, N + 1))
    inner = slice(1, -1)
    for s, c in ((0, cl), (6, cl), (2, cr), (8, cr)):
        coeffs[s, inner, inner] = (-0.5 * c)[:, None]
    coeffs[CENTER, inner, inner] = (cl + cr + h * h)[:, None]
    return StencilOperator(coeffs, _rhs(grid, source, rhs_mode), "five", grid,
                           float(kappa_minus), float(kappa_star))
