"""Command-line front end.

Each subcommand writes a comma-separated table preceded by ``#`` header
lines recording the version, the config and every resolved parameter.
Numbers are written with 17 significant digits so repeated runs are
byte-identical.

Exit status: 0 success, 1 usage, 2 config parse error, 3 physics error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, checks, config, cooling, dynamics, spectrum, supermodes
from .errors import ConfigError, InstabilityError, PhysicsError

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PHYSICS = 0, 1, 2, 3

#: Shipped config -> command that reproduces the corresponding figure.
FIGURES = {
    "fig2a": ("eigen_sweep", None),
    "fig2b": ("eigen_sweep", "kappa_a_over_kappa_m:0:2:1001"),
    "fig4a": ("spectrum", None),
    "fig4b": ("spectrum", None),
    "fig5a": ("cooling_rate", None),
    "fig5b": ("cooling_rate", None),
    "fig6a": ("phonon_vs_nth", None),
    "fig6b": ("phonon_vs_nth", None),
    "fig7a": ("phonon_vs_detuning", None),
    "fig7b": ("phonon_vs_detuning", None),
    "fig8": ("field_sweep", None),
    "fig9": ("evolve", None),
}

#: Allowed sweep axes per command; the first entry is the default grid.
AXES = {
    "eigen_sweep": {"J_over_kappa_m": (0.0, 1.0, 1001), "kappa_a_over_kappa_m": (0.0, 2.0, 1001)},
    "spectrum": {"omega_over_omega_b": (0.5, 1.5, 4001)},
    "cooling_rate": {"detuning_over_omega_b": (-2.0, 0.0, 2001)},
    "phonon_vs_nth": {"log10_n_th": (0.0, 6.0, 601), "n_th": (0.0, 1e6, 1001)},
    "phonon_vs_detuning": {"detuning_over_omega_b": (-2.0, 0.0, 2001)},
    "field_sweep": {"H_mT": (350.0, 372.0, 4401)},
    "evolve": {"t_seconds": (0.0, 2e-5, 401)},
    "check": {},
}
COMMANDS = tuple(AXES)


@dataclass
class RunConfig:
    command: str
    params_file: str
    overrides: list = field(default_factory=list)
    output: str | None = None
    grid: str | None = None
    dump_cov: bool = False


class UsageError(Exception):
    pass


def fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def parse_grid(text, command):
    """``AXIS:START:STOP:N`` -> (axis, array)."""
    axes = AXES[command]
    if text is None:
        axis = next(iter(axes))
        start, stop, n = axes[axis]
    else:
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"--grid must be AXIS:START:STOP:N, got {text!r}")
        axis = parts[0]
        if axis not in axes:
            raise UsageError(f"axis {axis!r} not valid for {command}; choose from {sorted(axes)}")
        try:
            start, stop, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise UsageError(f"bad grid numbers in {text!r}") from None
    if n < 1:
        raise UsageError("grid needs at least one point")
    if n > 1 and not stop > start:
        raise UsageError("grid stop must exceed start")
    return axis, np.linspace(start, stop, n)


def _header(rc, inputs, axis, grid):
    lines = [
        f"# magnocool {__version__}",
        f"# command: {rc.command}",
        f"# config: {rc.params_file}",
    ]
    lines += [f"# override: {o}" for o in rc.overrides]
    for key in sorted(inputs.resolved):
        lines.append(f"# param {key} = {fmt(inputs.resolved[key])}")
    if axis is not None:
        lines.append(f"# grid: {axis} {fmt(grid[0])} {fmt(grid[-1])} {grid.size}")
    return lines


def _require_n_th(inputs):
    if inputs.n_th is None:
        raise UsageError("this command needs n_th (or temperature) in the config or via --set")
    return inputs.n_th


def _eigen_rows(inputs, axis, grid):
    p = inputs.params
    sweep_axis = "CouplingJ" if axis == "J_over_kappa_m" else "GainKappaA"
    sw = supermodes.sweep_eigenvalues(sweep_axis, grid * p.kappa_m, p)
    notes = [
        f"# axis: {axis}",
        "# eigenfrequencies: (xi - omega_0)/kappa_m",
    ]
    rows = []
    for k, x in enumerate(grid):
        xp = (sw.xi_plus[k] - p.omega_a) / p.kappa_m
        xm = (sw.xi_minus[k] - p.omega_a) / p.kappa_m
        rows.append((x, xp.real, xp.imag, xm.real, xm.imag, sw.phases[k].value))
    return notes, ["axis", "re_xi_plus", "im_xi_plus", "re_xi_minus", "im_xi_minus", "phase"], rows


def _spectrum_rows(inputs, axis, grid):
    p = inputs.params
    sw = spectrum.spectrum_sweep(p, grid * p.omega_b, inputs.form)
    notes = ["# units: rad/s (force spectrum times x_zpf^2)"]
    if sw.pole.any():
        notes.append(f"# poles at omega_over_omega_b = {' '.join(fmt(x) for x in grid[sw.pole])}")
    if np.any(sw.s_ff[~sw.pole] < 0):
        notes.append("# warning: negative spectral density present")
    rows = list(zip(grid, sw.s_ff, sw.term_thermal, sw.term_cavity))
    return notes, ["omega_over_omega_b", "s_ff", "term_thermal", "term_cavity"], rows


def _cooling_rate_rows(inputs, axis, grid):
    p = inputs.params
    sw = spectrum.cooling_rate_sweep(p, grid * p.omega_b, inputs.form)
    notes = ["# units: rad/s"]
    if sw.pole.any():
        notes.append(f"# poles at detuning_over_omega_b = {' '.join(fmt(x) for x in grid[sw.pole])}")
    rows = list(zip(grid, sw.a_plus, sw.a_minus, sw.gamma_net, sw.gamma_selfenergy, sw.delta_omega_b))
    cols = ["detuning_over_omega_b", "a_plus", "a_minus", "gamma_net", "gamma_selfenergy", "delta_omega_b"]
    return notes, cols, rows


def _failure_notes(failed, label):
    if not failed:
        return []
    kinds = sorted({k for _, k in failed})
    return [f"# undefined n_f at {len(failed)} {label} points ({', '.join(kinds)})"]


def _nth_rows(inputs, axis, grid):
    p = inputs.params
    n_th = 10.0**grid if axis == "log10_n_th" else grid
    rates = spectrum.scattering_rates(p, inputs.form)
    notes = []
    if rates.negative_spectrum:
        notes.append(f"# warning: negative scattering rate (A_+ = {fmt(rates.a_plus)}, A_- = {fmt(rates.a_minus)})")
    rows = [(n, cooling.final_phonon_number(rates, p.gamma_b, n).n_f) for n in n_th]
    return notes, ["n_th", "n_f"], rows


def _detuning_rows(inputs, axis, grid):
    p = inputs.params
    n_f, failed = cooling.detuning_sweep(p, grid * p.omega_b, _require_n_th(inputs), inputs.form)
    return _failure_notes(failed, "detuning"), ["detuning_over_omega_b", "n_f"], list(zip(grid, n_f))


def _field_rows(inputs, axis, grid):
    h = grid * 1e-3
    sw = cooling.field_sweep(inputs.sphere, inputs.params, h, _require_n_th(inputs), inputs.form)
    notes = ["# omega_L and omega_a fixed; omega_m = gyro_ratio * H"]
    notes += _failure_notes(sw.failed, "field")
    return notes, ["H_mT", "n_f"], list(zip(grid, sw.n_f))


def _evolve_rows(inputs, axis, grid, dump_cov=False):
    n_th = _require_n_th(inputs)
    v0 = dynamics.initial_covariance(n_th, hot_magnon=inputs.hot_magnon)
    notes = []
    error = None
    try:
        states = dynamics.evolve_covariance(inputs.params, n_th, grid, v0=v0)
    except InstabilityError as exc:
        states, error = exc.states, exc
        notes.append(f"# diverged: {exc}")
    cols = ["t_seconds", "n_phonon"]
    iu = np.triu_indices(6)
    if dump_cov:
        cols += [f"v{i}{j}" for i, j in zip(*iu)]
    rows = []
    for s in states:
        row = [s.time, s.n_phonon]
        if dump_cov:
            row += list(s.cov[iu])
        rows.append(tuple(row))
    return notes, cols, rows, error


def render(rc: RunConfig):
    """Run a command and return ``(text, exit_status)``."""
    inputs = config.load(rc.params_file, rc.overrides)
    if rc.command == "check":
        out = [f"# magnocool {__version__} check on {rc.params_file}"]
        bad = False
        for name, status, detail in checks.run_checks(inputs):
            out.append(f"{status} {name}: {detail}")
            bad |= status == "FAIL"
        return "\n".join(out) + "\n", (EXIT_PHYSICS if bad else EXIT_OK)

    axis, grid = parse_grid(rc.grid, rc.command)
    error = None
    if rc.command == "evolve":
        notes, cols, rows, error = _evolve_rows(inputs, axis, grid, rc.dump_cov)
    else:
        producer = {
            "eigen_sweep": _eigen_rows,
            "spectrum": _spectrum_rows,
            "cooling_rate": _cooling_rate_rows,
            "phonon_vs_nth": _nth_rows,
            "phonon_vs_detuning": _detuning_rows,
            "field_sweep": _field_rows,
        }[rc.command]
        notes, cols, rows = producer(inputs, axis, grid)
    buf = io.StringIO()
    for line in _header(rc, inputs, axis, grid) + notes:
        buf.write(line + "\n")
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue(), (EXIT_PHYSICS if error else EXIT_OK)


def run(rc: RunConfig, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text, status = render(rc)
    except ConfigError as exc:
        print(f"magnocool: config error: {exc}", file=stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"magnocool: {exc}", file=stderr)
        return EXIT_USAGE
    except InstabilityError as exc:
        print(f"magnocool: unstable drift: no steady state ({exc})", file=stderr)
        return EXIT_PHYSICS
    except PhysicsError as exc:
        print(f"magnocool: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_PHYSICS
    if rc.output:
        with open(rc.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if status != EXIT_OK and rc.command == "evolve":
        print("magnocool: covariance diverged (unstable drift); partial trajectory written", file=stderr)
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    parser = _Parser(prog="magnocool", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"magnocool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file path or bundled name (e.g. fig4a)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if name != "check":
            p.add_argument("--grid", default=None, metavar="AXIS:START:STOP:N")
        if name == "evolve":
            p.add_argument("--dump-cov", action="store_true", help="append the 21 covariance entries")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    rc = RunConfig(
        command=args.command,
        params_file=args.config,
        overrides=list(args.overrides),
        output=args.out,
        grid=getattr(args, "grid", None),
        dump_cov=getattr(args, "dump_cov", False),
    )
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
