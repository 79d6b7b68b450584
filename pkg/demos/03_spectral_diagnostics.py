"""Sine-transform structure of the five-point operator.

In y the operator is diagonalised by the discrete sine transform, leaving
one tridiagonal system in x per mode k.  The closed-form inverse of
tridiag(-1, beta, -1) and the interface quantities delta_k are checked here.
"""

import numpy as np

from machfvm.solver import mode_systems, solve_dst_direct, solve_cg
from machfvm.assembly import assemble_five_point
from machfvm.analysis import builtin_example
from machfvm.mesh import build_simplified_grid
from machfvm.spectral import (
    DstContext,
    char_root,
    dst_forward,
    interface_margins,
    trid_inverse_entry,
)

ctx = DstContext(33)
S = ctx.kernel()
print("orthogonality error:", np.abs(S @ S * 2 * ctx.h - np.eye(32)).max())
x = np.random.default_rng(0).normal(size=32)
print("roundtrip error:", np.abs(dst_forward(ctx, dst_forward(ctx, x)) - x).max())

# tridiag(-1, 2.5, -1) has characteristic root 2; compare with a dense inverse
print("lambda(2.5) =", char_root(2.5))
K = 10
T = 2.5 * np.eye(K) - np.eye(K, k=1) - np.eye(K, k=-1)
closed = np.array([[trid_inverse_entry(2.5, K, i, j) for j in range(1, K + 1)] for i in range(1, K + 1)])
print("closed form vs inv():", np.abs(closed - np.linalg.inv(T)).max())
print("first row decays away from the diagonal:", np.round(closed[0, :5], 4))

# interface margins for kappa- = 1e4 and harmonic averaging
km = 1e4
t = interface_margins(km, 2 * km / (km + 1), 33)
for n in (0, 1, 15, 16, 31):
    print(f"  k={t['k'][n]:2d} cos={t['cos'][n]:+.3f} delta1={t['delta_1'][n]:+.4e} "
          f"delta_k-={t['delta_kminus'][n]:+.4e} margin={t['lower_margin'][n]:.4f}")
print("all margins positive:", bool((t["lower_margin"] > 0).all() and (t["monotone_margin"] > 0).all()))

# the direct solver runs exactly this decomposition
spec = builtin_example(2)
op = assemble_five_point(build_simplified_grid(67), spec.kappa_minus, 2e6 / (1e6 + 1), spec)
sub, diag, sup = mode_systems(op)
print("mode systems:", diag.shape, "weakest dominance:",
      float((np.abs(diag[:, 1:-1]) - np.abs(sub[:, :-1]) - np.abs(sup[:, 1:])).min()))
u_dst, u_cg = solve_dst_direct(op), solve_cg(op)
print("dst vs cg:", np.abs(u_dst - u_cg).max() / np.abs(u_dst).max())
