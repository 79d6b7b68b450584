"""Manufactured solutions of the two-material problem.

Each built-in solution is, on either side of ``x = 1/2``, a short sum of
separable terms ``c * X(x) * Y(y)`` with factors ``sin(pi t) * p(t)`` for a
polynomial ``p``.  Derivatives of such factors follow exactly from the
Leibniz rule, which gives closed forms for the source term, the one-sided
interface traces and the fourth derivatives entering the truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "SinPoly",
    "SeparableTerm",
    "ExactSolutionSpec",
    "builtin_example",
    "solution_from_terms",
    "check_source_consistency",
    "check_jump_conditions",
    "DEFAULT_KAPPA_MINUS",
]

INTERFACE_X = 0.5
DEFAULT_KAPPA_MINUS = {1: 1e4, 2: 1e6}


@dataclass(frozen=True)
class SinPoly:
    """The factor ``t -> sin(pi t) * p(t)``; ``coef`` in increasing degree."""

    coef: tuple[float, ...]

    def derivative(self, t, n: int = 0):
        t = np.asarray(t, dtype=float)
        p = Polynomial(self.coef)
        out = np.zeros_like(t)
        for m in range(n + 1):
            pd = p.deriv(n - m) if n - m > 0 else p
            out = out + math.comb(n, m) * np.pi**m * np.sin(np.pi * t + m * np.pi / 2) * pd(t)
        return out


@dataclass(frozen=True)
class SeparableTerm:
    scale: float
    fx: SinPoly
    fy: SinPoly

    def derivative(self, x, y, nx: int = 0, ny: int = 0):
        return self.scale * self.fx.derivative(x, nx) * self.fy.derivative(y, ny)


def _side_derivative(terms, x, y, nx, ny):
    return sum(t.derivative(x, y, nx, ny) for t in terms)


@dataclass
class ExactSolutionSpec:
    """Exact solution on the unit square with interface at ``x = 1/2``.

    ``u`` and ``f`` are vectorized callables; ``traces`` maps a derivative
    name (``u``, ``ux``, ``uxx``, ``uyy``, ``uxxx``, ``uyyx``) to the pair of
    one-sided limits ``(minus, plus)`` as functions of ``y``; ``d4`` maps
    ``uxxxx``, ``uyyyy`` and ``uxxyy`` to callables of ``(x, y)``.
    """

    name: str
    kappa_minus: float
    u: Callable
    f: Callable
    traces: dict[str, tuple[Callable, Callable]]
    d4: dict[str, Callable]
    derivative: Callable | None = field(default=None, repr=False)

    def kappa(self, x):
        return np.where(np.asarray(x) < INTERFACE_X, self.kappa_minus, 1.0)

    def trace(self, name: str, side: str, y):
        minus, plus = self.traces[name]
        return (minus if side == "-" else plus)(np.asarray(y, dtype=float))

    def jump(self, name: str, y):
        """``(zeta)^- - (zeta)^+``."""
        return self.trace(name, "-", y) - self.trace(name, "+", y)

    def mean(self, name: str, y):
        return 0.5 * (self.trace(name, "-", y) + self.trace(name, "+", y))

    def sample(self, grid) -> np.ndarray:
        X, Y = grid.mesh()
        return np.asarray(self.u(X, Y), dtype=float)


_TRACE_ORDERS = {"u": (0, 0), "ux": (1, 0), "uxx": (2, 0), "uyy": (0, 2),
                 "uxxx": (3, 0), "uyyx": (1, 2)}
_D4_ORDERS = {"uxxxx": (4, 0), "uyyyy": (0, 4), "uxxyy": (2, 2)}


def solution_from_terms(name: str, kappa_minus: float, left, right) -> ExactSolutionSpec:
    """Spec for ``u`` given as separable terms left and right of ``x = 1/2``."""
    def deriv(x, y, nx=0, ny=0):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.where(x < INTERFACE_X,
                        _side_derivative(left, x, y, nx, ny),
                        _side_derivative(right, x, y, nx, ny))

    def u(x, y):
        return deriv(x, y)

    def f(x, y):
        lap = deriv(x, y, 2, 0) + deriv(x, y, 0, 2)
        return -np.where(np.asarray(x) < INTERFACE_X, kappa_minus, 1.0) * lap + deriv(x, y)

    def one_sided(terms, nx, ny):
        return lambda y: _side_derivative(terms, INTERFACE_X, np.asarray(y, dtype=float), nx, ny)

    traces = {k: (one_sided(left, *o), one_sided(right, *o)) for k, o in _TRACE_ORDERS.items()}
    d4 = {k: (lambda x, y, o=o: deriv(x, y, *o)) for k, o in _D4_ORDERS.items()}
    return ExactSolutionSpec(name, float(kappa_minus), u, f, traces, d4, deriv)


_SIN_Y = SinPoly((1.0,))


def builtin_example(example: int, kappa_minus: float | None = None) -> ExactSolutionSpec:
    """The two built-in manufactured solutions.

    1. ``u = sin(pi x) sin(pi y) ((x - 1/2)/kappa + 1)``; its tangential second
       derivative does not vanish on the interface.
    2. ``u = sin(pi x) sin(pi y) (x - 1/2)(y - 1) y (1 + x^2 + y^2) / kappa``;
       it vanishes on the interface together with all tangential derivatives.

    Here ``kappa`` is the piecewise coefficient (``kappa_minus`` left of
    ``x = 1/2``, 1 right of it).  ``kappa_minus`` defaults to 1e4 and 1e6.
    """
    if example not in DEFAULT_KAPPA_MINUS:
        raise ValueError(f"unknown example id {example!r}; expected 1 or 2")
    km = DEFAULT_KAPPA_MINUS[example] if kappa_minus is None else float(kappa_minus)
    if not km >= 1.0:
        raise ValueError(f"kappa_minus must be >= 1, got {km}")
    if example == 1:
        def side(kap):
            fx = SinPoly((1.0 - 0.5 / kap, 1.0 / kap))
            return [SeparableTerm(1.0, fx, _SIN_Y)]
    else:
        qy = SinPoly((0.0, -1.0, 1.0))  # sin(pi y) (y^2 - y)
        qy2 = SinPoly((0.0, 0.0, 0.0, -1.0, 1.0))  # sin(pi y) (y^2 - y) y^2
        px = SinPoly((-0.5, 1.0))  # sin(pi x) (x - 1/2)
        px2 = SinPoly((-0.5, 1.0, -0.5, 1.0))  # sin(pi x) (x - 1/2)(1 + x^2)

        def side(kap):
            return [SeparableTerm(1.0 / kap, px2, qy), SeparableTerm(1.0 / kap, px, qy2)]
    return solution_from_terms(f"example{example}", km, side(km), side(1.0))


def _fd_laplacian(u, x, y, d):
    # fourth-order central differences
    w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * d * d)
    off = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * d
    uxx = sum(wk * u(x + o, y) for wk, o in zip(w, off))
    uyy = sum(wk * u(x, y + o) for wk, o in zip(w, off))
    return uxx + uyy


def check_source_consistency(spec: ExactSolutionSpec, n_points: int = 100,
                             step: float = 1e-3, seed: int = 0) -> float:
    """Relative max deviation of ``f`` from ``-kappa Lap u + u`` by finite differences.

    Sample points keep the whole difference stencil on one side of the interface.
    """
    rng = np.random.default_rng(seed)
    margin = 3 * step
    x = rng.uniform(margin, 1.0 - margin, n_points)
    near = np.abs(x - INTERFACE_X) < margin
    x[near] = np.where(x[near] < INTERFACE_X, INTERFACE_X - 2 * margin, INTERFACE_X + 2 * margin)
    y = rng.uniform(margin, 1.0 - margin, n_points)
    fd = -spec.kappa(x) * _fd_laplacian(spec.u, x, y, step) + spec.u(x, y)
    exact = spec.f(x, y)
    return float(np.max(np.abs(fd - exact)) / np.max(np.abs(exact)))


def check_jump_conditions(spec: ExactSolutionSpec, ys=None) -> tuple[float, float]:
    """Max of ``|[u]|`` and ``|[kappa u_x]|`` over the sample ordinates."""
    y = np.linspace(0.1, 0.9, 9) if ys is None else np.asarray(ys, dtype=float)
    ju = np.abs(spec.jump("u", y))
    jflux = np.abs(spec.kappa_minus * spec.trace("ux", "-", y) - spec.trace("ux", "+", y))
    return float(ju.max()), float(jflux.max())
