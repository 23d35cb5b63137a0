"""Command-line front end: ``swwlab list|eval|verify|symmetry``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 partial convergence (field still written, with flags), 4 every
grid time is singular for the rotating-frame map.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, TextIO

import numpy as np

from .catalog.families import (
    FAMILY_INFO,
    Family,
    FieldResult,
    SolutionDescriptor,
    eval_grid,
    local_field,
    make_solution,
)
from .catalog.presets import PRESETS
from .catalog.profiles import ProfileFn
from .core import Grid, PhysParams, Point
from .errors import ConfigError, DegenerateSamples, SwwlabError
from .rsww import RswwSolution, TimeShift
from .symmetry import (
    Y_IDS,
    conditional_fields_for,
    random_samples,
    reference_table,
    structure_constants,
)
from .verify import SystemKind, jacobian_rank, solution_residual, spacetime_jacobian, trace_form_residual

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_PARTIAL = 3
EXIT_SINGULAR = 4

CSV_HEADER = ("t", "x", "y", "u", "v", "h", "r1", "r2", "converged", "catastrophe")
_SINGULAR_SIN = 1e-12


# ----------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 50
    stride: int = 8
    catastrophe_tol: float = 1e-8


@dataclass(frozen=True)
class RotationConfig:
    enabled: bool = False
    shift: Optional[float] = None


@dataclass(frozen=True)
class VerifyConfig:
    fd_step: float = 1e-3
    tol: float = 1e-6
    samples: int = 50
    seed: int = 0


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    """A validated run description; build it with ``RunConfig.from_dict``."""

    solution: SolutionDescriptor
    params: PhysParams
    grid: Grid
    solver: SolverConfig = field(default_factory=SolverConfig)
    rsww: RotationConfig = field(default_factory=RotationConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("config must be a JSON object")
        _reject_unknown(data, {"solution", "params", "grid", "solver", "rsww", "verify", "output"}, "config")
        for key in ("solution", "grid"):
            if key not in data:
                raise ConfigError(f"config needs a '{key}' section")
        params = _params(data.get("params", {}))
        solver = _section(SolverConfig, data.get("solver", {}), "solver")
        rsww = _section(RotationConfig, data.get("rsww", {}), "rsww")
        verify = _section(VerifyConfig, data.get("verify", {}), "verify")
        output = _section(OutputConfig, data.get("output", {}), "output")
        _check_positive(solver.tol, "solver.tol")
        _check_positive(solver.catastrophe_tol, "solver.catastrophe_tol")
        if solver.max_iter < 1 or solver.stride < 1:
            raise ConfigError("solver.max_iter and solver.stride must be >= 1")
        _check_positive(verify.fd_step, "verify.fd_step")
        _check_positive(verify.tol, "verify.tol")
        if verify.samples < 1:
            raise ConfigError("verify.samples must be >= 1")
        if output.format not in ("csv", "plotdata"):
            raise ConfigError(f"output.format must be 'csv' or 'plotdata', got {output.format!r}")
        if rsww.enabled and params.omega <= 0:
            raise ConfigError("rsww.enabled needs params.omega > 0")
        if rsww.shift is not None and not math.isfinite(rsww.shift):
            raise ConfigError("rsww.shift must be finite")
        return cls(_solution(data["solution"], params), params, _grid(data["grid"]), solver, rsww, verify, output)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @property
    def system(self) -> SystemKind:
        return SystemKind.RSWW if self.rsww.enabled else SystemKind.SWW

    def evaluable(self):
        """The solution to evaluate: the catalog descriptor or its rotating-frame lift."""
        if not self.rsww.enabled:
            return self.solution
        shift = TimeShift(self.rsww.shift) if self.rsww.shift is not None else None
        return RswwSolution(self.solution, self.params.omega, shift)


def _reject_unknown(data: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _check_positive(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be positive, got {value}")


def _section(cls, data: Any, name: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"'{name}' must be an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    _reject_unknown(data, set(names), name)
    kwargs = {}
    for key, value in data.items():
        default = names[key].default
        kwargs[key] = _coerce(value, default, f"{name}.{key}")
    return cls(**kwargs)


def _coerce(value: Any, default: Any, where: str) -> Any:
    if value is None:
        if default is None:
            return None
        raise ConfigError(f"{where} may not be null")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{where} must be an integer")
        return int(value)
    if isinstance(default, float) or (default is None and isinstance(value, (int, float))):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if isinstance(default, str) or default is None:
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    raise ConfigError(f"cannot interpret {where}")  # pragma: no cover


def _params(data: Any) -> PhysParams:
    if not isinstance(data, Mapping):
        raise ConfigError("'params' must be an object")
    _reject_unknown(data, {"g", "omega"}, "params")
    try:
        return PhysParams(
            g=_coerce(data.get("g", 9.81), 1.0, "params.g"),
            omega=_coerce(data.get("omega", 0.0), 1.0, "params.omega"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _grid(data: Any) -> Grid:
    if not isinstance(data, Mapping):
        raise ConfigError("'grid' must be an object")
    _reject_unknown(data, {"t", "x", "y"}, "grid")
    axes = []
    for name in ("t", "x", "y"):
        if name not in data:
            raise ConfigError(f"grid needs axis '{name}'")
        spec = data[name]
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            axes.append((float(spec), float(spec), 1))
            continue
        if not (isinstance(spec, Sequence) and len(spec) == 3):
            raise ConfigError(f"grid.{name} must be a number or [lo, hi, n]")
        lo, hi, n = spec
        axes.append((_coerce(lo, 1.0, f"grid.{name}[0]"), _coerce(hi, 1.0, f"grid.{name}[1]"),
                     _coerce(n, 1, f"grid.{name}[2]")))
    try:
        return Grid(*axes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _solution(data: Any, params: PhysParams) -> SolutionDescriptor:
    if not isinstance(data, Mapping):
        raise ConfigError("'solution' must be an object")
    if "preset" in data:
        _reject_unknown(data, {"preset"}, "solution")
        name = data["preset"]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
        return PRESETS[name].descriptor(params)
    _reject_unknown(data, {"family", "constants", "profiles", "label"}, "solution")
    if "family" not in data:
        raise ConfigError("solution needs a 'family' (or a 'preset')")
    try:
        family = Family(data["family"])
    except ValueError:
        raise ConfigError(f"unknown family {data['family']!r}") from None
    constants = data.get("constants", {})
    profiles = data.get("profiles", {})
    if not isinstance(constants, Mapping) or not isinstance(profiles, Mapping):
        raise ConfigError("solution.constants and solution.profiles must be objects")
    consts = {k: _coerce(v, 1.0, f"solution.constants.{k}") for k, v in constants.items()}
    profs = {k: ProfileFn.from_dict(v) for k, v in profiles.items()}
    try:
        return make_solution(family, consts, profs, params, str(data.get("label", "")))
    except (SwwlabError, ValueError) as exc:
        raise ConfigError(f"invalid solution: {exc}") from exc


# ----------------------------------------------------------------------------
# Field output


def _num(x: float) -> str:
    """Shortest round-trip decimal (``repr``) of a float; non-finite as ``nan``/``inf``."""
    return repr(float(x))


def field_rows(result: FieldResult, rank: int):
    """Rows of (t, x, y, u, v, h, r1, r2, converged, catastrophe) in row-major order."""
    grid = result.grid
    axes = (grid.axis("t"), grid.axis("x"), grid.axis("y"))
    for idx in np.ndindex(*grid.shape):
        pt = (axes[0][idx[0]], axes[1][idx[1]], axes[2][idx[2]])
        u, v, h = result.states[idx]
        r1, r2 = result.invariants[idx]
        yield pt, (u, v, h), (r1, r2 if rank == 2 else None), bool(result.converged[idx]), bool(result.catastrophe[idx])


def write_csv(result: FieldResult, rank: int, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pt, s, (r1, r2), conv, cat in field_rows(result, rank):
        w.writerow([*map(_num, pt), *map(_num, s), _num(r1), "" if r2 is None else _num(r2), int(conv), int(cat)])


def write_plotdata(result: FieldResult, rank: int, out: TextIO) -> None:
    """One block per t-slice (blank line between x-scanlines, two between slices)."""
    grid = result.grid
    nt, nx, ny = grid.shape
    rows = list(field_rows(result, rank))
    for it in range(nt):
        if it:
            out.write("\n\n")
        out.write(f"# t = {_num(grid.axis('t')[it])}\n# x y u v h r1 r2 converged catastrophe\n")
        for ix in range(nx):
            if ix:
                out.write("\n")
            for iy in range(ny):
                pt, s, (r1, r2), conv, cat = rows[(it * nx + ix) * ny + iy]
                vals = [*map(_num, pt[1:]), *map(_num, s), _num(r1), "nan" if r2 is None else _num(r2)]
                out.write(" ".join(vals) + f" {int(conv)} {int(cat)}\n")


def read_field_csv(source: str | Path | TextIO) -> dict[str, np.ndarray]:
    """Columns of a CSV written by ``swwlab eval`` (empty r2 reads as NaN)."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_field_csv(fh)
    reader = csv.reader(source)
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    cols: dict[str, list[float]] = {k: [] for k in CSV_HEADER}
    for row in reader:
        for key, val in zip(CSV_HEADER, row):
            cols[key].append(float(val) if val != "" else math.nan)
    return {k: np.array(v) for k, v in cols.items()}


def table_field(columns: Mapping[str, np.ndarray], atol: float = 1e-12):
    """A field ``Point -> (u, v, h)`` that looks states up in an evaluated table."""
    pts = np.column_stack([columns["t"], columns["x"], columns["y"]])
    states = np.column_stack([columns["u"], columns["v"], columns["h"]])

    def lookup(pt: Point):
        d = np.max(np.abs(pts - np.asarray(pt, dtype=float)), axis=1)
        i = int(np.argmin(d))
        if d[i] > atol * max(1.0, float(np.max(np.abs(pt)))):
            raise KeyError(f"point {tuple(pt)} is not in the table")
        return tuple(states[i])

    return lookup


# ----------------------------------------------------------------------------
# Commands


def cmd_list(family: Optional[str] = None, out: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    if family is None:
        width = max(len(f.value) for f in Family)
        for fam in Family:
            info = FAMILY_INFO[fam]
            out.write(f"{fam.value:<{width}}  ({info.origin})\n")
        return EXIT_OK
    try:
        fam = Family(family)
    except ValueError:
        sys.stderr.write(f"unknown family {family!r}; known: {', '.join(f.value for f in Family)}\n")
        return EXIT_USAGE
    info = FAMILY_INFO[fam]
    out.write(f"{fam.value}  ({info.origin})\n")
    out.write(f"  {info.summary}\n")
    out.write(f"  rank: {info.rank}\n")
    consts = ", ".join(f"{k}={v:g}" for k, v in info.constants.items()) or "none"
    out.write(f"  constants (defaults): {consts}\n")
    out.write(f"  profiles: {', '.join(info.profiles) or 'none'}\n")
    if info.optional_profiles:
        out.write(f"  optional profiles: {', '.join(info.optional_profiles)}\n")
    return EXIT_OK


def _all_times_singular(cfg: RunConfig) -> bool:
    if not cfg.rsww.enabled:
        return False
    w = cfg.params.omega
    t0 = cfg.rsww.shift if cfg.rsww.shift is not None else math.pi / (2 * w)
    return all(abs(math.sin(w * (t + t0))) <= _SINGULAR_SIN for t in cfg.grid.axis("t"))


def evaluate(cfg: RunConfig) -> FieldResult:
    s = cfg.solver
    return eval_grid(cfg.evaluable(), cfg.grid, tol=s.tol, max_iter=s.max_iter, stride=s.stride,
                     catastrophe_tol=s.catastrophe_tol)


def cmd_eval(cfg: RunConfig, out: Optional[TextIO] = None) -> int:
    if _all_times_singular(cfg):
        sys.stderr.write("every grid time is singular for the rotating-frame map (sin = 0)\n")
        return EXIT_SINGULAR
    result = evaluate(cfg)
    writer = write_csv if cfg.output.format == "csv" else write_plotdata
    rank = cfg.solution.rank
    if out is not None:
        writer(result, rank, out)
    elif cfg.output.path:
        with open(cfg.output.path, "w", newline="") as fh:
            writer(result, rank, fh)
    else:
        writer(result, rank, sys.stdout)
    failed = int(np.sum(~result.converged))
    if failed:
        sys.stderr.write(f"{failed} of {result.converged.size} cells did not converge\n")
        return EXIT_PARTIAL
    return EXIT_OK


@dataclass
class VerifyReport:
    samples: int
    evaluated: int
    max_residual: float
    max_trace: Optional[float]
    max_dc: Optional[float]
    ranks: list[int]
    expected_rank: Optional[int]
    tol: float

    @property
    def passed(self) -> bool:
        if self.evaluated == 0:
            return False
        checks = [self.max_residual, self.max_trace, self.max_dc]
        if any(c is not None and not (c <= self.tol) for c in checks):
            return False
        if self.expected_rank is not None and any(r != self.expected_rank for r in self.ranks):
            return False
        return True

    def lines(self) -> list[str]:
        out = [f"points: {self.evaluated} of {self.samples} sampled points evaluated",
               f"max PDE residual: {self.max_residual:.3e} (tol {self.tol:g})"]
        if self.max_trace is not None:
            out.append(f"max trace-form residual: {self.max_trace:.3e}")
        if self.max_dc is not None:
            out.append(f"max conditional-symmetry invariance residual: {self.max_dc:.3e}")
        if self.ranks:
            counts = {r: self.ranks.count(r) for r in sorted(set(self.ranks))}
            want = "" if self.expected_rank is None else f" (expected {self.expected_rank})"
            out.append(f"Jacobian ranks: {counts}{want}")
        out.append("PASS" if self.passed else "FAIL")
        return out


def run_verify(cfg: RunConfig, expected_rank: Optional[int] = None) -> VerifyReport:
    """Residual, trace-form, conditional-symmetry and rank checks at random grid-box points."""
    v = cfg.verify
    rng = np.random.default_rng(v.seed)
    lo = np.array([min(a[0], a[1]) for a in (cfg.grid.t, cfg.grid.x, cfg.grid.y)], dtype=float)
    hi = np.array([max(a[0], a[1]) for a in (cfg.grid.t, cfg.grid.x, cfg.grid.y)], dtype=float)
    sol = cfg.evaluable()
    system = cfg.system
    fields = conditional_fields_for(cfg.solution) if system is SystemKind.SWW else None
    residuals, traces, dcs, ranks = [], [], [], []
    for _ in range(v.samples):
        pt = Point(*map(float, lo + (hi - lo) * rng.random(3)))
        try:
            rep = solution_residual(sol, pt, cfg.params, system, v.fd_step)
        except SwwlabError:
            continue
        residuals.append(rep.max_abs)
        if system is SystemKind.SWW:
            try:
                f = local_field(sol, pt, max(v.fd_step**4 * 1e-2, 1e-13))
                traces.append(trace_form_residual(f, pt, cfg.params, v.fd_step))
                if fields is not None:
                    centre, J = spacetime_jacobian(f, pt, v.fd_step)
                    dcs.append(float(np.max(np.abs(J @ np.atleast_2d(fields(centre)).T))))
                if expected_rank is not None:
                    ranks.append(jacobian_rank(f, pt, step=v.fd_step)[0])
            except SwwlabError:
                continue
    return VerifyReport(
        samples=v.samples,
        evaluated=len(residuals),
        max_residual=max(residuals) if residuals else math.nan,
        max_trace=max(traces) if traces else None,
        max_dc=max(dcs) if dcs else None,
        ranks=ranks,
        expected_rank=expected_rank,
        tol=v.tol,
    )


def cmd_verify(cfg: RunConfig, expected_rank: Optional[int] = None, out: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    report = run_verify(cfg, expected_rank)
    for line in report.lines():
        out.write(line + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_symmetry(omega: float, samples: int, tol: float, seed: int = 0, out: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    if not (math.isfinite(omega) and omega > 0):
        sys.stderr.write(f"omega must be positive, got {omega}\n")
        return EXIT_USAGE
    try:
        table = structure_constants(omega, random_samples(np.random.default_rng(seed), samples))
    except DegenerateSamples as exc:
        sys.stderr.write(f"DegenerateSamples: {exc}\n")
        return EXIT_USAGE
    ref = reference_table(omega)
    dev = float(np.max(np.abs(table.coeffs - ref)))
    out.write(f"commutators of Y1..Y9 at omega = {omega:g} from {samples} sample points\n")
    for i in range(9):
        for j in range(i + 1, 9):
            terms = [f"{c:+.9g} {Y_IDS[k]}" for k, c in enumerate(table.coeffs[i, j]) if abs(c) > tol]
            if terms:
                out.write(f"[{Y_IDS[i]}, {Y_IDS[j]}] = {' '.join(terms)}\n")
    out.write(f"closure residual: {table.closure_residual:.3e}\n")
    out.write(f"max deviation from reference table: {dev:.3e} (tol {tol:g})\n")
    ok = dev <= tol and table.closure_residual <= tol
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_VERIFY


# ----------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swwlab", description="Exact Riemann-invariant solutions of the shallow water equations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_list = sub.add_parser("list", help="list solution families")
    p_list.add_argument("--family", help="show the constants and profile slots of one family")

    for name, helptext in (("eval", "evaluate a solution on a grid"), ("verify", "check a solution numerically")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--tol", type=float, help="override the solver (eval) or residual (verify) tolerance")
        p.add_argument("--omega", type=float, help="override params.omega")
        if name == "eval":
            p.add_argument("--out", help="output path (default: config output.path or stdout)")
            p.add_argument("--format", choices=("csv", "plotdata"), help="output format")
        else:
            p.add_argument("--fd-step", type=float, help="finite-difference step")
            p.add_argument("--samples", type=int, help="number of random sample points")
            p.add_argument("--expect-rank", type=int, choices=(0, 1, 2), help="required Jacobian rank")

    p_sym = sub.add_parser("symmetry", help="recompute the commutation table of the symmetry algebra")
    p_sym.add_argument("--omega", type=float, default=0.5)
    p_sym.add_argument("--samples", type=int, default=20)
    p_sym.add_argument("--tol", type=float, default=1e-6)
    p_sym.add_argument("--seed", type=int, default=0)
    return parser


def _load(args) -> RunConfig:
    with open(args.config) if args.config != "-" else io.StringIO(sys.stdin.read()) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if args.omega is not None:
        data = dict(data)
        data["params"] = {**data.get("params", {}), "omega": args.omega}
    cfg = RunConfig.from_dict(data)
    if args.command == "eval":
        if args.tol is not None:
            cfg = cfg.replace(solver=dataclasses.replace(cfg.solver, tol=args.tol))
        if args.out is not None or args.format is not None:
            cfg = cfg.replace(output=OutputConfig(args.out or cfg.output.path, args.format or cfg.output.format))
    else:
        changes = {k: val for k, val in (("tol", args.tol), ("fd_step", args.fd_step), ("samples", args.samples))
                   if val is not None}
        if changes:
            cfg = cfg.replace(verify=dataclasses.replace(cfg.verify, **changes))
        v = cfg.verify
        if not (v.tol > 0 and v.fd_step > 0 and v.samples >= 1):
            raise ConfigError("--tol and --fd-step must be positive and --samples >= 1")
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list(args.family)
    if args.command == "symmetry":
        return cmd_symmetry(args.omega, args.samples, args.tol, args.seed)
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_USAGE
    if args.command == "eval":
        return cmd_eval(cfg)
    return cmd_verify(cfg, args.expect_rank)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
