import dataclasses

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from machfvm.analysis import (
    SeparableTerm,
    SinPoly,
    builtin_example,
    check_jump_conditions,
    check_source_consistency,
    solution_from_terms,
)
from machfvm.mesh import build_simplified_grid

x, y = sp.symbols("x y")


def symbolic_u(example, kap):
    s = sp.sin(sp.pi * x) * sp.sin(sp.pi * y)
    if example == 1:
        return s * ((x - sp.Rational(1, 2)) / kap + 1)
    return s * (x - sp.Rational(1, 2)) * (y - 1) * y * (1 + x**2 + y**2) / kap


@pytest.mark.parametrize("example", [1, 2])
def test_matches_symbolic_derivation(example):
    km = 37.0
    spec = builtin_example(example, km)
    rng = np.random.default_rng(example)
    for kap, lo, hi in ((km, 0.02, 0.48), (1.0, 0.52, 0.98)):
        u = symbolic_u(example, kap)
        f = -kap * (sp.diff(u, x, 2) + sp.diff(u, y, 2)) + u
        fu = sp.lambdify((x, y), u, "numpy")
        ff = sp.lambdify((x, y), f, "numpy")
        px, py = rng.uniform(lo, hi, 20), rng.uniform(0, 1, 20)
        np.testing.assert_allclose(spec.u(px, py), fu(px, py), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(spec.f(px, py), ff(px, py), rtol=1e-11, atol=1e-12)
        for name, (a, b) in (("uxxxx", (4, 0)), ("uyyyy", (0, 4)), ("uxxyy", (2, 2))):
            d = sp.lambdify((x, y), sp.diff(u, x, a, y, b), "numpy")
            np.testing.assert_allclose(spec.d4[name](px, py), d(px, py), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("example", [1, 2])
def test_traces_match_symbolic(example):
    km = 5.0
    spec = builtin_example(example, km)
    ys = np.linspace(0.05, 0.95, 7)
    orders = {"u": (0, 0), "ux": (1, 0), "uxx": (2, 0), "uyy": (0, 2), "uxxx": (3, 0), "uyyx": (1, 2)}
    for side, kap in (("-", km), ("+", 1.0)):
        u = symbolic_u(example, kap)
        for name, (a, b) in orders.items():
            expr = sp.diff(u, x, a, y, b) if (a or b) else u
            g = sp.lambdify(y, expr.subs(x, sp.Rational(1, 2)), "numpy")
            np.testing.assert_allclose(spec.trace(name, side, ys), g(ys) * np.ones_like(ys),
                                       rtol=1e-12, atol=1e-13)


def test_example_one_point_value():
    spec = builtin_example(1)
    assert spec.kappa_minus == 1e4
    # sin(pi/4) * (1 - 0.25e-4)
    assert spec.u(0.25, 0.5) == pytest.approx(0.7070891035170, rel=1e-12)


@pytest.mark.parametrize("example,km", [(1, 1e4), (2, 1e6), (1, 3.0), (2, 1.0)])
def test_source_consistency_and_jumps(example, km):
    spec = builtin_example(example, km)
    assert check_source_consistency(spec) <= 1e-8
    ju, jf = check_jump_conditions(spec)
    assert ju <= 1e-12 and jf <= 1e-10


def test_tangential_second_derivative_on_interface():
    ys = np.linspace(0.1, 0.9, 9)
    e1, e2 = builtin_example(1), builtin_example(2)
    assert np.all(np.abs(e1.trace("uyy", "-", ys)) > 1e-3)
    assert np.all(np.abs(e1.trace("uyy", "+", ys)) > 1e-3)
    for side in "-+":
        assert np.max(np.abs(e2.trace("uyy", side, ys))) == 0.0


def test_example_two_vanishes_on_boundary_and_interface():
    spec = builtin_example(2)
    t = np.linspace(0, 1, 41)
    for vals in (spec.u(t, 0 * t), spec.u(t, 0 * t + 1), spec.u(0 * t, t), spec.u(0 * t + 1, t),
                 spec.u(0 * t + 0.5, t)):
        assert np.max(np.abs(vals)) <= 1e-15
    u = spec.sample(build_simplified_grid(9))
    assert np.all(u[0] == 0) and np.all(u[:, -1] == 0)


def test_invalid_example():
    with pytest.raises(ValueError):
        builtin_example(3)
    with pytest.raises(ValueError):
        builtin_example(1, 0.5)


def test_inconsistent_source_detected():
    spec = builtin_example(1, 10.0)
    bad = dataclasses.replace(spec, f=lambda a, b: spec.f(a, b) * (1 + 1e-6))
    assert check_source_consistency(bad) > 1e-8


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.floats(0.05, 0.95), st.integers(0, 4))
def test_sinpoly_derivatives_match_sympy(coef, t, n):
    p = SinPoly(tuple(coef))
    expr = sp.sin(sp.pi * x) * sum(c * x**k for k, c in enumerate(coef))
    want = float(sp.diff(expr, x, n).subs(x, t)) if n else float(expr.subs(x, t))
    assert float(p.derivative(t, n)) == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_custom_solution_from_terms():
    s = SinPoly((1.0,))
    spec = solution_from_terms("smooth", 1.0, [SeparableTerm(1.0, s, s)], [SeparableTerm(1.0, s, s)])
    assert spec.f(0.3, 0.6) == pytest.approx((2 * np.pi**2 + 1) * np.sin(0.3 * np.pi) * np.sin(0.6 * np.pi))
    assert check_source_consistency(spec) <= 1e-8
