"""``mach-fvm`` command line front end.

Runs are described by a flat ``key = value`` file with a single ``[run]``
section and/or command line flags; flags win over file values.  Every
command writes one CSV table (to ``--out`` or stdout).

Exit codes: 0 success, 1 solver failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import io
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import (
    DEFAULT_KAPPA_MINUS,
    StudyAborted,
    builtin_example,
    convergence_study,
    format_float,
    solve_example,
    truncation_residual,
)
from .assembly import apply_stencil, assemble_nine_point
from .materials import AverageStrategy, MaterialPartition, Rect, Subdomain
from .mesh import build_grid, classify_node
from .solver import ConvergenceError, SolveOptions, SolverError, solve
from .spectral import interface_margins

__all__ = ["ConfigError", "RunConfig", "parse_config", "run", "main"]

COMMANDS = ("solve", "study", "truncation", "diagnostics")
STRATEGIES = ("arithmetic", "harmonic")
SOLVERS = ("cg", "dst")
KEYS = ("command", "example", "kappa_minus", "strategy", "solver", "Ns", "tol", "output",
        "subdomains", "source")
REQUIRED = ("command", "example", "Ns")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    example: int | str
    kappa_minus: float
    strategy: str
    solver: str
    Ns: tuple[int, ...]
    tol: float = 1e-12
    output: str | None = None
    subdomains: tuple[tuple[float, float, float, float, float], ...] = ()
    source: float = 1.0


def _parse_ns(text: str) -> tuple[int, ...]:
    try:
        Ns = tuple(int(s) for s in str(text).replace(" ", "").split(",") if s)
    except ValueError:
        raise ConfigError(f"Ns must be a comma separated list of integers, got {text!r}") from None
    if not Ns:
        raise ConfigError("Ns is empty")
    for N in Ns:
        if N % 2 == 0:
            raise ConfigError(f"N must be odd, got N={N}")
        if N < 3:
            raise ConfigError(f"N must be at least 3, got N={N}")
    return Ns


def _parse_float(key: str, text) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {text!r}") from None


def _parse_subdomains(text: str):
    out = []
    for entry in str(text).split(";"):
        entry = entry.strip()
        if not entry:
            continue
        try:
            box, kappa = entry.split(":")
            x0, x1, y0, y1 = (float(v) for v in box.split(","))
            out.append((x0, x1, y0, y1, float(kappa)))
        except ValueError:
            raise ConfigError(f"bad subdomain {entry!r}; expected x0,x1,y0,y1:kappa") from None
    if not out:
        raise ConfigError("subdomains is empty")
    return tuple(out)


def _read_file(source: str) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str  # keys are case sensitive
    try:
        cp.read_string(source)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if cp.sections() != ["run"]:
        raise ConfigError(f"config needs exactly one [run] section, found {cp.sections()}")
    return dict(cp.items("run"))


def parse_config(source: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Validate a ``[run]`` document merged with flag ``overrides``."""
    raw = _read_file(source) if source else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key: {key}")

    command = str(raw["command"]).strip()
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    ex = str(raw["example"]).strip()
    if ex in ("1", "2"):
        example: int | str = int(ex)
    elif ex == "custom":
        example = ex
    else:
        raise ConfigError(f"unknown example {ex!r}")
    strategy = str(raw.get("strategy", "harmonic")).strip().lower()
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    default_solver = "cg" if example == "custom" else "dst"
    solver = str(raw.get("solver", default_solver)).strip().lower()
    if solver not in SOLVERS:
        raise ConfigError(f"unknown solver {solver!r}")
    Ns = _parse_ns(raw["Ns"])
    if command == "study":
        for a, b in zip(Ns, Ns[1:]):
            if b != 2 * a + 1:
                raise ConfigError(f"study grids must follow N -> 2N + 1, got {a} -> {b}")
    elif len(Ns) != 1:
        raise ConfigError(f"{command} takes a single N, got {len(Ns)}")

    if "kappa_minus" in raw:
        kappa_minus = _parse_float("kappa_minus", raw["kappa_minus"])
    elif example in DEFAULT_KAPPA_MINUS:
        kappa_minus = DEFAULT_KAPPA_MINUS[example]
    else:
        kappa_minus = 1.0
    if not kappa_minus >= 1.0:
        raise ConfigError(f"kappa_minus must be >= 1, got {kappa_minus}")
    tol = _parse_float("tol", raw.get("tol", 1e-12))
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")

    subdomains: tuple = ()
    if example == "custom":
        if command != "solve":
            raise ConfigError("example=custom is only available for the solve command")
        if solver != "cg":
            raise ConfigError("the dst solver needs a built-in example; use solver=cg")
        if "subdomains" not in raw:
            raise ConfigError("missing required key: subdomains (needed for example=custom)")
        subdomains = _parse_subdomains(raw["subdomains"])
    elif "subdomains" in raw:
        raise ConfigError("subdomains only apply to example=custom")
    source_value = _parse_float("source", raw.get("source", 1.0))
    output = raw.get("output")
    return RunConfig(command, example, kappa_minus, strategy, solver, Ns, tol,
                     str(output) if output else None, subdomains, source_value)


# ---------------------------------------------------------------------------


def _meta(cfg: RunConfig, **extra) -> str:
    items = {"command": cfg.command, "example": cfg.example,
             "kappa_minus": format_float(cfg.kappa_minus), "strategy": cfg.strategy,
             "solver": cfg.solver, **extra}
    return "# " + " ".join(f"{k}={v}" for k, v in items.items()) + "\n"


def _csv_line(*values) -> str:
    out = []
    for v in values:
        if isinstance(v, (float, np.floating)):
            out.append(format_float(float(v)))
        else:
            out.append("" if v is None else str(v))
    return ",".join(out) + "\n"


def _residual_field(op, uh) -> np.ndarray:
    r = np.abs(apply_stencil(op, uh) - op.rhs)
    bnorm = np.linalg.norm(op.rhs)
    return r / bnorm if bnorm > 0 else r


def _run_solve(cfg: RunConfig, buf: io.StringIO) -> None:
    N = cfg.Ns[0]
    if cfg.example == "custom":
        subs = tuple(Subdomain((Rect(x0, x1, y0, y1),), k) for x0, x1, y0, y1, k in cfg.subdomains)
        part = MaterialPartition(subs)
        d = part.domain
        grid = build_grid((d.x0, d.x1, d.y0, d.y1), N, N)
        value = cfg.source
        op = assemble_nine_point(grid, part, cfg.strategy, lambda x, y: np.full(np.shape(x), value))
        uh = solve(op, SolveOptions("cg", cfg.tol))
        exact = None
    else:
        spec = builtin_example(cfg.example, cfg.kappa_minus)
        grid, op, uh = solve_example(spec, N, cfg.strategy, cfg.solver, cfg.tol)
        exact = spec.sample(grid)
    res = _residual_field(op, uh)
    buf.write(_meta(cfg, N=N))
    buf.write("i,j,x,y,u_exact,u_h,abs_err,residual\n")
    xs, ys = grid.x(), grid.y()
    for i in range(grid.nx + 1):
        for j in range(grid.ny + 1):
            ue = None if exact is None else exact[i, j]
            err = None if exact is None else abs(exact[i, j] - uh[i, j])
            buf.write(_csv_line(i, j, xs[i], ys[j], ue, uh[i, j], err, res[i, j]))


def _run_truncation(cfg: RunConfig, buf: io.StringIO) -> None:
    N = cfg.Ns[0]
    spec = builtin_example(cfg.example, cfg.kappa_minus)
    grid, op, _ = solve_example(spec, N, cfg.strategy, cfg.solver, cfg.tol)
    R = truncation_residual(grid, op, spec)
    h = grid.h
    buf.write(_meta(cfg, N=N))
    buf.write("i,j,node_class,R,R_over_h,R_over_h2,R_over_h4\n")
    for i in range(1, N):
        for j in range(1, N):
            r = R[i, j]
            buf.write(_csv_line(i, j, classify_node(grid, i, j).value, r, r / h, r / h**2, r / h**4))


def _run_diagnostics(cfg: RunConfig, buf: io.StringIO) -> None:
    N = cfg.Ns[0]
    kstar = AverageStrategy.parse(cfg.strategy).interface_kappa(cfg.kappa_minus)
    t = interface_margins(cfg.kappa_minus, kstar, N)
    buf.write(_meta(cfg, N=N, kappa_star=format_float(kstar)))
    cols = ("cos", "lambda_1", "lambda_kminus", "delta_1", "delta_kminus",
            "monotone_margin", "lower_margin")
    buf.write("k,cos_kpih,lambda_1,lambda_kminus,delta_1,delta_kminus,monotone_margin,lower_margin\n")
    for n, k in enumerate(t["k"]):
        buf.write(_csv_line(int(k), *(t[c][n] for c in cols)))


def _run_study(cfg: RunConfig, buf: io.StringIO) -> None:
    report = convergence_study(cfg.example, cfg.strategy, cfg.solver, cfg.Ns,
                               kappa_minus=cfg.kappa_minus, tol=cfg.tol)
    buf.write(report.to_csv())


_RUNNERS = {"solve": _run_solve, "study": _run_study,
            "truncation": _run_truncation, "diagnostics": _run_diagnostics}


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    buf = io.StringIO()
    try:
        _RUNNERS[cfg.command](cfg, buf)
    except StudyAborted as exc:
        _emit(cfg, exc.report.to_csv())
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(cfg, buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mach-fvm", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", help="solve | study | truncation | diagnostics")
    p.add_argument("--config", metavar="PATH", help="key=value file with a [run] section")
    p.add_argument("--example", help="1, 2 or custom")
    p.add_argument("--kappa-minus", dest="kappa_minus")
    p.add_argument("--strategy", help="arithmetic | harmonic")
    p.add_argument("--solver", help="cg | dst")
    p.add_argument("--ns", dest="Ns", metavar="LIST", help="comma separated odd grid sizes")
    p.add_argument("--out", dest="output", metavar="PATH")
    p.add_argument("--tol")
    p.add_argument("--subdomains", help="x0,x1,y0,y1:kappa;... (example=custom)")
    p.add_argument("--source", help="constant source term (example=custom)")
    return p


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    path = args.pop("config")
    try:
        text = None
        if path:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg = parse_config(text, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
