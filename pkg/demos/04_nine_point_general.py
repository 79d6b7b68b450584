"""The nine-point scheme beyond the two-material model.

Three materials on a 2 x 1 rectangle with an anisotropic grid, solved by
conjugate gradients.  The same operator is then rebuilt from the
control-volume flux balance, and once more on a perturbed mesh.
"""

import warnings

import numpy as np

from machfvm import (
    MaterialPartition,
    Rect,
    Subdomain,
    assemble_flux_balance,
    assemble_nine_point,
    build_grid,
    solve_cg,
    write_matrix_market,
)
from machfvm.assembly import MeshQualityWarning, cell_kappas
from machfvm.solver import SolveOptions

part = MaterialPartition((
    Subdomain((Rect(0.0, 0.7, 0.0, 1.0),), 50.0),
    Subdomain((Rect(0.7, 2.0, 0.0, 0.45),), 1.0),
    Subdomain((Rect(0.7, 2.0, 0.45, 1.0),), 5.0),
))
g = build_grid((0.0, 2.0, 0.0, 1.0), 40, 30)
for strategy in ("arithmetic", "harmonic"):
    op = assemble_nine_point(g, part, strategy, lambda x, y: np.ones_like(x))
    u, rep = solve_cg(op, opts=SolveOptions(tol=1e-10), full_output=True)
    print(f"{strategy:10s}: {rep.iterations} CG iterations, max u = {u.max():.5f}")

# the closed-form coefficients are the flux balance on rectangles
kc = cell_kappas(g, part, "harmonic")
closed = assemble_nine_point(g, kappa_cells=kc)
geom = assemble_flux_balance(g.nodes(), kc)
print("flux balance vs closed form:", np.abs(geom.coeffs - closed.coeffs).max())

# a mildly perturbed mesh passes the corner check
P = g.nodes().copy()
P[1:-1, 1:-1] += np.random.default_rng(1).uniform(-0.2, 0.2, P[1:-1, 1:-1].shape) * [g.hx, g.hy]
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", MeshQualityWarning)
    distorted = assemble_flux_balance(P, kc)
print("warnings on the perturbed mesh:", [str(w.message) for w in caught])
A = distorted.to_sparse()
print("asymmetry of the distorted operator:", abs(A - A.T).max())

# dragging one node across its neighbours trips it
P[20, 15] += (0.8 * g.hx, 0.8 * g.hy)
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", MeshQualityWarning)
    assemble_flux_balance(P, kc)
print("after dragging one node:", [str(w.message) for w in caught])

write_matrix_market(closed, "/tmp/nine_point.mtx", comment="three materials, harmonic")
print("wrote /tmp/nine_point.mtx")
