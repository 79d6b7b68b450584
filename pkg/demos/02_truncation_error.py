"""Local truncation error of the five-point scheme near the interface.

The residual R = L_h u - h^2 f of the exact solution is O(h^4) away from
the interface.  In the two columns next to it the leading term is O(h),
unless the interface coefficient is the harmonic average, which cancels it.
"""

import numpy as np

from machfvm.analysis import (
    builtin_example,
    residual_order_ratios,
    truncation_coefficients,
    truncation_residual,
)
from machfvm.assembly import assemble_five_point
from machfvm.materials import AverageStrategy
from machfvm.mesh import build_simplified_grid


def residuals(example, strategy, Ns):
    spec = builtin_example(example)
    ks = AverageStrategy.parse(strategy).interface_kappa(spec.kappa_minus)
    res, grids = {}, {}
    for N in Ns:
        g = build_simplified_grid(N)
        op = assemble_five_point(g, spec.kappa_minus, ks, spec)
        res[N], grids[N] = truncation_residual(g, op, spec), g
    return res, grids


Ns = (33, 67, 135)
for example in (1, 2):
    for strategy in ("arithmetic", "harmonic"):
        res, grids = residuals(example, strategy, Ns)
        print(f"example {example}, {strategy}")
        print("  interior  max|R|/h^4:", np.round(residual_order_ratios(res, grids, "S_I", 4), 3))
        for p in (1, 2):
            print(f"  interface max|R|/h^{p}:", np.round(residual_order_ratios(res, grids, "S_B", p), 5))

# Example 1 with harmonic averaging: the first-order coefficient is zero, and
# R/h^2 approaches the second-order coefficient at the left interface column
spec = builtin_example(1)
c = truncation_coefficients(spec, spec.kappa_minus, "harmonic", 0.5, x=0.25)
print("C_M^(1) =", c.cm1, " C_M^(2) at y=1/2:", c.cm2, " C^(4) at (1/4,1/2):", c.c4)
res, grids = residuals(1, "harmonic", (67, 135, 271))
for N, R in res.items():
    g = grids[N]
    j = (N - 1) // 2  # y_j closest to 1/2 from below
    cj = truncation_coefficients(spec, spec.kappa_minus, "harmonic", j * g.h)
    print(f"  N={N}: R/h^2 = {R[g.M, j] / g.h**2:.3f}, C_M^(2)(y_j) = {cj.cm2:.3f}")
