"""Local truncation error of the five-point scheme and its leading coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assembly import StencilOperator, apply_stencil
from ..materials import AverageStrategy
from ..mesh import Grid, NodeClass, node_classes
from .exact import ExactSolutionSpec, check_source_consistency

__all__ = [
    "TruncationCoefficients",
    "truncation_residual",
    "interior_coefficient",
    "truncation_coefficients",
    "first_order_factor",
    "class_masks",
    "residual_order_ratios",
]


def class_masks(grid: Grid) -> dict[str, np.ndarray]:
    """Boolean node masks for ``S_I`` (away from the interface) and ``S_B``."""
    cls = node_classes(grid)
    out = {c: cls == c for c in NodeClass}
    out["S_I"] = out[NodeClass.INTERIOR1] | out[NodeClass.INTERIOR2]
    out["S_B"] = out[NodeClass.INTERFACE_LEFT] | out[NodeClass.INTERFACE_RIGHT]
    return out


def truncation_residual(grid: Grid, op: StencilOperator, spec: ExactSolutionSpec,
                        *, consistency_tol: float = 1e-8) -> np.ndarray:
    """``R = L_h u(x_i, y_j) - rhs_{i,j}`` at interior nodes, zero on the boundary.

    The source term of ``spec`` is first checked against a finite-difference
    evaluation of ``-kappa Lap u + u``.
    """
    dev = check_source_consistency(spec)
    if dev > consistency_tol:
        raise ValueError(f"source term of {spec.name} is inconsistent with u (rel. dev {dev:.2e})")
    R = apply_stencil(op, spec.sample(grid)) - op.rhs
    R[0, :] = R[-1, :] = R[:, 0] = R[:, -1] = 0.0
    return R


def interior_coefficient(spec: ExactSolutionSpec, x, y):
    """Leading interior coefficient ``-(u_yyyy + u_xxxx + 6 u_xxyy) / 12``.

    The residual at nodes away from the interface is this times ``h^4``,
    times ``kappa_minus`` on the left side.
    """
    d = spec.d4
    return -(d["uyyyy"](x, y) + d["uxxxx"](x, y) + 6.0 * d["uxxyy"](x, y)) / 12.0


@dataclass(frozen=True)
class TruncationCoefficients:
    """Coefficients of ``h``, ``h^2``, ``h^3`` at columns M and M+1."""

    cm1: float
    cm1_next: float
    cm2: float
    cm2_next: float
    ctilde_m2: float
    ctilde_m2_next: float
    cm3: float
    cm3_next: float
    c4: float | None = None


def first_order_factor(kappa_minus: float, kappa_star) -> float:
    """``kappa_minus - kappa_star/2 - kappa_star*kappa_minus/2``.

    For an averaging strategy the closed form is used: zero for harmonic
    averaging, ``-(kappa_minus - 1)**2 / 4`` for arithmetic averaging.
    """
    km = float(kappa_minus)
    if isinstance(kappa_star, (AverageStrategy, str)):
        if AverageStrategy.parse(kappa_star) is AverageStrategy.HARMONIC:
            return 0.0
        return -0.25 * (km - 1.0) ** 2
    ks = float(kappa_star)
    return km - ks / 2 - ks * km / 2


def truncation_coefficients(spec: ExactSolutionSpec, kappa_minus: float,
                            kappa_star: float | AverageStrategy | str,
                            y: float, x: float | None = None) -> TruncationCoefficients:
    """Evaluate the interface expansion coefficients at ordinate ``y``.

    ``kappa_star`` is a number or an averaging strategy of the split cells.
    ``_next`` fields belong to column M+1.  ``c4`` is the interior
    coefficient at ``(x, y)`` when ``x`` is given.
    """
    missing = {"ux", "uxx", "uyy", "uxxx", "uyyx"} - set(spec.traces)
    if missing:
        raise ValueError(f"missing interface traces: {sorted(missing)}")
    km = float(kappa_minus)
    if isinstance(kappa_star, (AverageStrategy, str)):
        ks = AverageStrategy.parse(kappa_star).interface_kappa(km)
    else:
        ks = float(kappa_star)
    t = lambda name, side: float(spec.trace(name, side, y))  # noqa: E731
    jump_uxx = t("uxx", "-") - t("uxx", "+")
    mean_uxxx = 0.5 * (t("uxxx", "-") + t("uxxx", "+"))

    cm1 = first_order_factor(km, kappa_star) * t("ux", "-")
    ct2 = ks / 8 * jump_uxx
    cm2 = ct2 + 0.5 * (km * t("uyy", "-") - ks * t("uyy", "+"))
    cm2_next = -ct2 + 0.5 * (t("uyy", "+") - ks * t("uyy", "-"))
    cm3 = (km / 24 * t("uxxx", "-") - ks / 24 * mean_uxxx
           + 0.25 * (km * t("uyyx", "-") - ks * t("uyyx", "+")))
    cm3_next = (-t("uxxx", "+") / 24 + ks / 24 * mean_uxxx
                + 0.25 * (-t("uyyx", "+") + ks * t("uyyx", "-")))
    c4 = None if x is None else float(interior_coefficient(spec, x, y))
    return TruncationCoefficients(cm1, -cm1, cm2, cm2_next, ct2, -ct2, cm3, cm3_next, c4)


def residual_order_ratios(residuals: dict[int, np.ndarray], grids: dict[int, Grid],
                          region: str, power: int) -> tuple[float, ...]:
    """``max_region |R| / h**power`` for each N, in the order of ``residuals``."""
    out = []
    for N, R in residuals.items():
        g = grids[N]
        mask = class_masks(g)[region]
        out.append(float(np.max(np.abs(R[mask]))) / g.h**power)
    return tuple(out)
