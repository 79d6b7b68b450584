"""Discrete sine transform and closed-form recurrence diagnostics.

The transform pair

    ebar_k = sqrt(2h) * sum_{j=1}^{N-1} e_j sin(j pi y_k),   y_k = k h,  h = 1/N

is self-inverse.  Applied along ``y`` it turns the five-point "x" operator
into independent three-term recurrences in ``x``, one per mode ``k``, with
off-diagonal weight ``cos(k pi h)``.  The functions below evaluate the
characteristic roots, ``Z_j(lam) = lam**j - lam**(-j)``, the closed-form
inverse of the symmetric Toeplitz tridiagonal matrix and the interface
quantities ``Theta_k`` and ``delta_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

__all__ = [
    "SpectralError",
    "DstContext",
    "dst_forward",
    "dst_inverse",
    "char_root",
    "char_root_lambda",
    "log_abs_z",
    "z_function",
    "z_ratio",
    "trid_inverse_entry",
    "delta_theta",
    "interface_margins",
]


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class DstContext:
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise SpectralError(f"need N >= 2, got {self.N}")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def scale(self) -> float:
        return math.sqrt(2.0 * self.h)

    @property
    def ordinates(self) -> np.ndarray:
        return np.arange(1, self.N) * self.h

    def kernel(self) -> np.ndarray:
        """``sin(j pi y_k)`` for ``j, k = 1..N-1`` (symmetric)."""
        jk = np.outer(np.arange(1, self.N), np.arange(1, self.N))
        return np.sin(np.pi * (jk % (2 * self.N)) / self.N)


def _transform(ctx: DstContext, seq, axis: int, fast: bool) -> np.ndarray:
    a = np.asarray(seq, dtype=float)
    if a.shape[axis] != ctx.N - 1:
        raise SpectralError(f"expected length {ctx.N - 1} along axis {axis}, got {a.shape[axis]}")
    if fast:
        return scipy.fft.dst(a, type=1, norm="ortho", axis=axis)
    a = np.moveaxis(a, axis, -1)
    out = ctx.scale * (a @ ctx.kernel())
    return np.moveaxis(out, -1, axis)


def dst_forward(ctx: DstContext, seq, axis: int = -1, fast: bool = False) -> np.ndarray:
    """Sine transform of length-(N-1) sequences along ``axis``.

    The default evaluates the sum directly; ``fast=True`` uses the
    orthonormal type-I DST from :mod:`scipy.fft`, which is the same map.
    """
    return _transform(ctx, seq, axis, fast)


def dst_inverse(ctx: DstContext, seq, axis: int = -1, fast: bool = False) -> np.ndarray:
    return _transform(ctx, seq, axis, fast)


def char_root(beta: float) -> float:
    """Root of ``lam**2 - beta*lam + 1 = 0`` with ``|lam| > 1``."""
    beta = float(beta)
    if not abs(beta) > 2.0:
        raise SpectralError(f"|beta| must exceed 2, got {beta}")
    half = abs(beta) / 2.0
    return math.copysign(half + math.sqrt((half - 1.0) * (half + 1.0)), beta)


def _mode_cos(k: int, N: int) -> float:
    if not 1 <= k <= N - 1:
        raise SpectralError(f"mode k={k} outside 1..{N - 1}")
    c = math.cos(k * math.pi / N)
    if c == 0.0:
        raise SpectralError(f"cos(k pi h) vanishes for k={k}, N={N}")
    return c


def char_root_lambda(omega: float, k: int, N: int) -> float:
    """Characteristic root of mode ``k`` for coefficient ``omega``.

    ``beta = (2 omega + h^2) / (omega cos(k pi h))``.
    """
    c = _mode_cos(k, N)
    h = 1.0 / N
    return char_root((2.0 * omega + h * h) / (omega * c))


def log_abs_z(lam: float, j: int) -> float:
    """``log |Z_j(lam)|`` for ``|lam| > 1``; ``-inf`` for ``j = 0``."""
    if not abs(lam) > 1.0:
        raise SpectralError(f"need |lambda| > 1, got {lam}")
    if j == 0:
        return -math.inf
    t = j * math.log(abs(lam))
    return t + math.log(-math.expm1(-2.0 * t))


def _z_sign(lam: float, j: int) -> float:
    return -1.0 if (lam < 0 and j % 2) else 1.0


def z_function(lam: float, j: int) -> float:
    """``Z_j(lam) = lam**j - lam**(-j)``; overflows to +-inf for huge arguments."""
    if j == 0:
        return 0.0
    la = log_abs_z(lam, j)
    mag = math.exp(la) if la < 709.0 else math.inf
    return _z_sign(lam, j) * mag


def z_ratio(lam: float, j: int, i: int) -> float:
    """``Z_j(lam) / Z_i(lam)`` evaluated in log space."""
    if i == 0:
        raise SpectralError("Z_0 = 0 cannot be a denominator")
    if j == 0:
        return 0.0
    return _z_sign(lam, j) * _z_sign(lam, i) * math.exp(log_abs_z(lam, j) - log_abs_z(lam, i))


def trid_inverse_entry(beta: float, K: int, i: int, j: int) -> float:
    """Entry ``(i, j)`` (1-based) of ``T^{-1}``, ``T = tridiag(-1, beta, -1)`` of size K.

    Uses ``Z_{K-i+1} Z_j / (Z_{K+1} Z_1)`` for ``j <= i`` and its transpose.
    """
    if not abs(beta) > 2.0:
        raise SpectralError(f"|beta| must exceed 2, got {beta}")
    if not (1 <= i <= K and 1 <= j <= K):
        raise SpectralError(f"index ({i}, {j}) outside 1..{K}")
    if j > i:
        i, j = j, i
    lam = char_root(beta)
    top = (K - i + 1, j)
    bottom = (K + 1, 1)
    sign = 1.0
    for n in top + bottom:
        sign *= _z_sign(lam, n)
    logmag = sum(log_abs_z(lam, n) for n in top) - sum(log_abs_z(lam, n) for n in bottom)
    return sign * math.exp(logmag)


def delta_theta(omega: float, kappa_star: float, k: int, N: int) -> tuple[float, float]:
    """``(delta_k(omega), Theta_k(omega))`` for mode ``k`` on an N = 2M+1 grid.

    ``Theta_k = omega * (1/cos(k pi h) - Z_{M-1}/Z_M)`` and
    ``delta_k = Theta_k + (kappa_star + h^2) / cos(k pi h)``.
    """
    if N % 2 == 0:
        raise SpectralError(f"N must be odd, got N={N}")
    M = (N - 1) // 2
    h = 1.0 / N
    c = _mode_cos(k, N)
    lam = char_root_lambda(omega, k, N)
    theta = omega * (1.0 / c - z_ratio(lam, M - 1, M))
    return theta + (kappa_star + h * h) / c, theta


def interface_margins(kappa_minus: float, kappa_star: float, N: int) -> dict[str, np.ndarray]:
    """Per-mode table of the interface quantities and their lower-bound margins.

    For ``k <= M`` the bounds read ``delta_k(kappa_minus) >= delta_k(1) >
    kappa_star + k h``; for ``k > M`` the same holds for ``-delta`` with
    ``(N - k) h``.  ``monotone_margin`` and ``lower_margin`` are the
    sign-adjusted slacks of the two inequalities.
    """
    M = (N - 1) // 2
    h = 1.0 / N
    ks = np.arange(1, N)
    rows = {name: np.empty(N - 1) for name in (
        "cos", "lambda_1", "lambda_kminus", "delta_1", "delta_kminus",
        "monotone_margin", "lower_margin")}
    for n, k in enumerate(ks):
        d1, _ = delta_theta(1.0, kappa_star, k, N)
        dk, _ = delta_theta(kappa_minus, kappa_star, k, N)
        s = 1.0 if k <= M else -1.0
        gap = k * h if k <= M else (N - k) * h
        rows["cos"][n] = math.cos(k * math.pi / N)
        rows["lambda_1"][n] = char_root_lambda(1.0, k, N)
        rows["lambda_kminus"][n] = char_root_lambda(kappa_minus, k, N)
        rows["delta_1"][n] = d1
        rows["delta_kminus"][n] = dk
        rows["monotone_margin"][n] = s * (dk - d1)
        rows["lower_margin"][n] = s * d1 - (kappa_star + gap)
    rows["k"] = ks
    return rows
