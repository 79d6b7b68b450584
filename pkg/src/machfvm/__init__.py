"""MACH-like finite volume schemes for diffusion problems with material interfaces.

The package assembles the nine-point vertex-centered scheme on structured
grids and its five-point "x" form for the two-material model on the unit
square, solves the systems by conjugate gradients or a sine-transform
direct method, and measures truncation and global errors against
manufactured solutions.
"""

from .assembly import (
    StencilOperator,
    apply_stencil,
    assemble_five_point,
    assemble_flux_balance,
    assemble_nine_point,
    green_gauss_gradient,
    write_matrix_market,
    parity_blocks,
)
from .materials import (
    AverageStrategy,
    MaterialPartition,
    Rect,
    Subdomain,
    cell_kappa,
    kappa_at,
    simplified_partition,
)
from .mesh import (
    Grid,
    NodeClass,
    build_grid,
    build_simplified_grid,
    classify_node,
    control_volume,
)
from .solver import SolveOptions, solve, solve_cg, solve_dst_direct, solve_tridiagonal

__version__ = "0.1.0"

__all__ = [
    "StencilOperator",
    "apply_stencil",
    "assemble_five_point",
    "assemble_flux_balance",
    "assemble_nine_point",
    "green_gauss_gradient",
    "write_matrix_market",
    "parity_blocks",
    "AverageStrategy",
    "MaterialPartition",
    "Rect",
    "Subdomain",
    "cell_kappa",
    "kappa_at",
    "simplified_partition",
    "Grid",
    "NodeClass",
    "build_grid",
    "build_simplified_grid",
    "classify_node",
    "control_volume",
    "SolveOptions",
    "solve",
    "solve_cg",
    "solve_dst_direct",
    "solve_tridiagonal",
]
