"""Max-norm errors and grid-refinement studies for the two-material model."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ..assembly import assemble_five_point
from ..materials import AverageStrategy
from ..mesh import Grid, build_simplified_grid
from ..solver import SolveOptions, solve
from .exact import ExactSolutionSpec, builtin_example

__all__ = [
    "ConvergenceReport",
    "StudyAborted",
    "max_norm_error",
    "solve_example",
    "convergence_study",
    "format_float",
]


def format_float(v: float) -> str:
    """Locale-free scientific notation with 12 significant digits."""
    return f"{v:.11e}"


def max_norm_error(computed: np.ndarray, spec: ExactSolutionSpec, grid: Grid) -> float:
    exact = spec.sample(grid)
    computed = np.asarray(computed, dtype=float)
    if computed.shape != exact.shape:
        raise ValueError(f"field shape {computed.shape} does not match grid {exact.shape}")
    return float(np.max(np.abs(exact - computed)))


@dataclass
class ConvergenceReport:
    example: str
    kappa_minus: float
    strategy: str
    solver: str
    Ns: list[int] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)

    @property
    def ratios(self) -> list[float]:
        e = self.errors
        return [e[n - 1] / e[n] for n in range(1, len(e))]

    def rows(self) -> list[tuple[int, float, float | None]]:
        r = [None] + self.ratios
        return list(zip(self.Ns, self.errors, r))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# example={self.example} kappa_minus={format_float(self.kappa_minus)} "
                  f"strategy={self.strategy} solver={self.solver}\n")
        buf.write("N,error_max,ratio\n")
        for N, err, ratio in self.rows():
            buf.write(f"{N},{format_float(err)},{'' if ratio is None else format_float(ratio)}\n")
        return buf.getvalue()


class StudyAborted(RuntimeError):
    """A solve failed mid-study; ``report`` holds the rows finished so far."""

    def __init__(self, message: str, report: ConvergenceReport):
        super().__init__(message)
        self.report = report


def solve_example(spec: ExactSolutionSpec, N: int, strategy: AverageStrategy | str,
                  solver: str = "dst", tol: float = 1e-12):
    """Assemble and solve one refinement level; returns ``(grid, operator, u_h)``."""
    strategy = AverageStrategy.parse(strategy)
    grid = build_simplified_grid(N)
    kstar = strategy.interface_kappa(spec.kappa_minus)
    op = assemble_five_point(grid, spec.kappa_minus, kstar, spec)
    uh = solve(op, SolveOptions(method=solver, tol=tol))
    return grid, op, uh


def convergence_study(example: int | ExactSolutionSpec, strategy: AverageStrategy | str,
                      solver: str = "dst", Ns=(33, 67, 135, 271), *,
                      kappa_minus: float | None = None, tol: float = 1e-12) -> ConvergenceReport:
    """Solve on each N and tabulate the max-norm error and successive ratios."""
    Ns = [int(n) for n in Ns]
    for a, b in zip(Ns, Ns[1:]):
        if b != 2 * a + 1:
            raise ValueError(f"refinement must follow N -> 2N + 1, got {a} -> {b}")
    spec = example if isinstance(example, ExactSolutionSpec) else builtin_example(example, kappa_minus)
    strategy = AverageStrategy.parse(strategy)
    report = ConvergenceReport(spec.name, spec.kappa_minus, strategy.value, solver)
    for N in Ns:
        try:
            grid, _, uh = solve_example(spec, N, strategy, solver, tol)
        except Exception as exc:  # keep the finished rows
            raise StudyAborted(f"solve failed at N={N}: {exc}", report) from exc
        report.Ns.append(N)
        report.errors.append(max_norm_error(uh, spec, grid))
    return report
