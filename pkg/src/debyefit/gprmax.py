"""Hashtag-command front end emitting FDTD-ready material definitions.

Parses one-line material commands of the form

    #havriliak_negami: 1e7 1e11 0.91 0.45 2.7 5.9 9.4e-10 0.1 1 0 5 Kelley

(band, relaxation parameters, conductivity, relative permeability, magnetic
loss, pole count, identifier, optional RNG seed), fits the requested Debye
expansion, and emits the matching `#material` / `#add_dispersion_debye`
pair.  Conductivity, permeability and magnetic loss are never fitted; their
input tokens pass through verbatim.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass

import numpy as np

from .dispersion import (
    TWO_PI,
    CrimComponent,
    CrimParams,
    HavriliakNegamiParams,
    JonscherParams,
    evaluate_model,
    load_raw_csv,
    make_log_grid,
)
from .fitting import (
    ERROR_FLOOR,
    MAX_POLES,
    FitConfig,
    FitReport,
    eval_expansion,
    fit,
)

OPTIMIZERS = ("pso", "de", "da")


class CommandError(ValueError):
    """Malformed or out-of-range hashtag command."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class RawDataRef:
    """Deferred pointer to a measured-data CSV; loaded at run time."""

    path: str


@dataclass(frozen=True)
class MaterialCommand:
    kind: str
    f_min_hz: float
    f_max_hz: float
    model: HavriliakNegamiParams | JonscherParams | CrimParams | RawDataRef
    sigma: float
    mu_r: float
    magnetic_loss: float
    n_poles: int
    material_id: str
    seed: int | None
    prop_tokens: tuple[str, str, str]  # sigma, mu_r, magnetic loss, verbatim
    tokens: tuple[str, ...]            # every field token, verbatim


@dataclass(frozen=True)
class CliOptions:
    optimizer: str = "pso"
    grid_points: int = 50
    csv_dir: str | None = None
    quiet: bool = False


@dataclass(frozen=True)
class MaterialOutput:
    material_line: str
    dispersion_line: str
    csv_paths: tuple[str, ...]
    report: FitReport


class _Fields:
    """Positional token reader producing 1-based error positions."""

    def __init__(self, kind: str, tokens: list[str]):
        self.kind = kind
        self.tokens = tokens
        self.pos = 0

    def fail(self, message: str):
        raise CommandError(f"#{self.kind}: {message}")

    def take(self, name: str) -> str:
        self.pos += 1
        if self.pos > len(self.tokens):
            self.fail(f"missing field at position {self.pos} ({name})")
        return self.tokens[self.pos - 1]

    def number(self, name: str) -> float:
        token = self.take(name)
        try:
            return float(token)
        except ValueError:
            self.fail(f"field {self.pos} ({name}) must be a number, got {token!r}")

    def integer(self, name: str) -> int:
        token = self.take(name)
        try:
            return int(token)
        except ValueError:
            self.fail(f"field {self.pos} ({name}) must be an integer, got {token!r}")

    def check(self, ok: bool, name: str, requirement: str):
        if not ok:
            self.fail(f"field {self.pos} ({name}) {requirement}")


def _parse_band(fields: _Fields) -> tuple[float, float]:
    f_min = fields.number("lower frequency bound")
    fields.check(f_min > 0.0, "lower frequency bound", "must be positive")
    f_max = fields.number("upper frequency bound")
    fields.check(f_max > f_min, "upper frequency bound", "must exceed the lower bound")
    return f_min, f_max


def _parse_tail(fields: _Fields) -> dict:
    """Shared trailing fields: sigma, mu_r, magnetic loss, poles, id, seed."""
    sigma_token = fields.take("conductivity")
    sigma = _to_number(fields, sigma_token, "conductivity")
    fields.check(sigma >= 0.0, "conductivity", "must be >= 0")
    mu_token = fields.take("relative permeability")
    mu_r = _to_number(fields, mu_token, "relative permeability")
    fields.check(mu_r >= 1.0, "relative permeability", "must be >= 1")
    loss_token = fields.take("magnetic loss")
    magnetic_loss = _to_number(fields, loss_token, "magnetic loss")
    fields.check(magnetic_loss >= 0.0, "magnetic loss", "must be >= 0")
    n_poles = fields.integer("number of poles")
    fields.check(n_poles == -1 or 1 <= n_poles <= MAX_POLES,
                 "number of poles", f"must lie in [1, {MAX_POLES}] or be -1")
    material_id = fields.take("material identifier")
    seed = None
    if fields.pos < len(fields.tokens):
        seed = fields.integer("seed")
        fields.check(seed >= 0, "seed", "must be >= 0")
    if fields.pos < len(fields.tokens):
        fields.fail(f"unexpected field at position {fields.pos + 1}: "
                    f"{fields.tokens[fields.pos]!r}")
    return {
        "sigma": sigma, "mu_r": mu_r, "magnetic_loss": magnetic_loss,
        "n_poles": n_poles, "material_id": material_id, "seed": seed,
        "prop_tokens": (sigma_token, mu_token, loss_token),
    }


def _to_number(fields: _Fields, token: str, name: str) -> float:
    try:
        return float(token)
    except ValueError:
        fields.fail(f"field {fields.pos} ({name}) must be a number, got {token!r}")


def _parse_havriliak_negami(tokens: list[str]) -> MaterialCommand:
    fields = _Fields("havriliak_negami", tokens)
    f_min, f_max = _parse_band(fields)
    alpha = fields.number("alpha")
    fields.check(0.0 < alpha <= 1.0, "alpha", "must lie in (0, 1]")
    beta = fields.number("beta")
    fields.check(0.0 < beta <= 1.0, "beta", "must lie in (0, 1]")
    eps_inf = fields.number("eps_inf")
    fields.check(eps_inf >= 1.0, "eps_inf", "must be >= 1")
    delta_eps = fields.number("delta_eps")
    fields.check(delta_eps > 0.0, "delta_eps", "must be positive")
    tau = fields.number("relaxation time")
    fields.check(tau > 0.0, "relaxation time", "must be positive")
    tail = _parse_tail(fields)
    model = HavriliakNegamiParams(eps_inf, delta_eps, tau, alpha, beta)
    return MaterialCommand(kind="havriliak_negami", f_min_hz=f_min, f_max_hz=f_max,
                           model=model, tokens=tuple(tokens), **tail)


def _parse_jonscher(tokens: list[str]) -> MaterialCommand:
    fields = _Fields("jonscher", tokens)
    f_min, f_max = _parse_band(fields)
    eps_inf = fields.number("eps_inf")
    fields.check(eps_inf >= 1.0, "eps_inf", "must be >= 1")
    amplitude = fields.number("amplitude")
    fields.check(amplitude > 0.0, "amplitude", "must be positive")
    f_ref = fields.number("reference frequency")
    fields.check(f_ref > 0.0, "reference frequency", "must be positive")
    exponent = fields.number("loss exponent")
    fields.check(0.0 <= exponent <= 1.0, "loss exponent", "must lie in [0, 1]")
    tail = _parse_tail(fields)
    model = JonscherParams(eps_inf, amplitude, TWO_PI * f_ref, exponent)
    return MaterialCommand(kind="jonscher", f_min_hz=f_min, f_max_hz=f_max,
                           model=model, tokens=tuple(tokens), **tail)


def _parse_crim(tokens: list[str]) -> MaterialCommand:
    fields = _Fields("crim", tokens)
    f_min, f_max = _parse_band(fields)
    shape_a = fields.number("shape factor")
    fields.check(shape_a != 0.0, "shape factor", "must be nonzero")
    count = fields.integer("component count")
    fields.check(count >= 1, "component count", "must be >= 1")
    fractions = []
    for i in range(count):
        fraction = fields.number(f"fraction {i + 1}")
        fields.check(0.0 < fraction <= 1.0, f"fraction {i + 1}", "must lie in (0, 1]")
        fractions.append(fraction)
    total = sum(fractions)
    if abs(total - 1.0) > 1e-9:
        fields.fail(f"volumetric fractions must sum to 1, got {total!r}")
    components = []
    for i in range(count):
        eps_inf = fields.number(f"component {i + 1} eps_inf")
        fields.check(eps_inf >= 1.0, f"component {i + 1} eps_inf", "must be >= 1")
        delta_eps = fields.number(f"component {i + 1} delta_eps")
        fields.check(delta_eps > 0.0, f"component {i + 1} delta_eps", "must be positive")
        tau = fields.number(f"component {i + 1} relaxation time")
        fields.check(tau > 0.0, f"component {i + 1} relaxation time", "must be positive")
        components.append(CrimComponent(fractions[i], eps_inf, delta_eps, tau))
    tail = _parse_tail(fields)
    model = CrimParams(shape_a, tuple(components))
    return MaterialCommand(kind="crim", f_min_hz=f_min, f_max_hz=f_max,
                           model=model, tokens=tuple(tokens), **tail)


def _parse_raw_data(tokens: list[str]) -> MaterialCommand:
    fields = _Fields("raw_data", tokens)
    f_min, f_max = _parse_band(fields)
    path = fields.take("data file path")
    tail = _parse_tail(fields)
    return MaterialCommand(kind="raw_data", f_min_hz=f_min, f_max_hz=f_max,
                           model=RawDataRef(path), tokens=tuple(tokens), **tail)


_COMMAND_PARSERS = {
    "havriliak_negami": _parse_havriliak_negami,
    "jonscher": _parse_jonscher,
    "crim": _parse_crim,
    "raw_data": _parse_raw_data,
}


def parse_command(line: str) -> MaterialCommand:
    """Parse one hashtag material command into its typed form."""
    text = line.strip()
    head, sep, rest = text.partition(":")
    head = head.strip()
    if not text.startswith("#") or not sep:
        raise CommandError(f"expected '#<command>: <fields...>', got {text!r}")
    kind = head[1:]
    parser = _COMMAND_PARSERS.get(kind)
    if parser is None:
        known = ", ".join(f"#{name}" for name in _COMMAND_PARSERS)
        raise CommandError(f"unknown command {head!r} (known: {known})")
    return parser(rest.split())


def format_command(cmd: MaterialCommand) -> str:
    """Reassemble the hashtag line; tokens come back verbatim."""
    return f"#{cmd.kind}: " + " ".join(cmd.tokens)


def format_value(x: float) -> str:
    """Five significant digits: plain decimal for |x| in [1e-3, 1e4),
    exponent notation (unpadded exponent) otherwise."""
    if x == 0.0:
        return "0.0000"
    mantissa, _, exponent = f"{x:.4e}".partition("e")
    power = int(exponent)
    if -3 <= power <= 3:
        return f"{x:.{4 - power}f}"
    return f"{mantissa}e{power}"


def _resolve_model(cmd: MaterialCommand):
    if isinstance(cmd.model, RawDataRef):
        return load_raw_csv(cmd.model.path)
    return cmd.model


def _write_artifacts(cmd: MaterialCommand, options: CliOptions, model,
                     report: FitReport) -> tuple[str, ...]:
    os.makedirs(options.csv_dir, exist_ok=True)
    grid = make_log_grid(cmd.f_min_hz, cmd.f_max_hz, options.grid_points)
    target = evaluate_model(model, grid)
    fitted = eval_expansion(report.expansion, grid)
    rel_real = 100.0 * np.abs(fitted.eps_real - target.eps_real) \
        / np.maximum(np.abs(target.eps_real), ERROR_FLOOR)
    rel_imag = 100.0 * np.abs(fitted.eps_imag - target.eps_imag) \
        / np.maximum(np.abs(target.eps_imag), ERROR_FLOOR)

    spectrum_path = os.path.join(options.csv_dir, f"spectrum_{cmd.material_id}.csv")
    with open(spectrum_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["frequency_hz", "eps_real_target", "eps_imag_target",
                         "eps_real_fit", "eps_imag_fit", "rel_err_real", "rel_err_imag"])
        for row in zip(grid.frequencies_hz, target.eps_real, target.eps_imag,
                       fitted.eps_real, fitted.eps_imag, rel_real, rel_imag):
            writer.writerow([repr(value) for value in row])

    convergence_path = os.path.join(options.csv_dir, f"convergence_{cmd.material_id}.csv")
    with open(convergence_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "best_cost"])
        for iteration, best_cost in report.convergence:
            writer.writerow([iteration, repr(best_cost)])
    return (spectrum_path, convergence_path)


def run_command(cmd: MaterialCommand, options: CliOptions = CliOptions()) -> MaterialOutput:
    """Fit one parsed command and format its output lines."""
    model = _resolve_model(cmd)
    config = FitConfig(f_min_hz=cmd.f_min_hz, f_max_hz=cmd.f_max_hz,
                       n_poles=cmd.n_poles, optimizer=options.optimizer,
                       n_points=options.grid_points, seed=cmd.seed)
    report = fit(model, config)
    expansion = report.expansion

    material_line = (f"#material: {format_value(expansion.eps_inf)} "
                     f"{' '.join(cmd.prop_tokens)} {cmd.material_id}")
    pairs = " ".join(f"{format_value(d)} {format_value(t)}"
                     for d, t in zip(expansion.delta_eps, expansion.tau))
    dispersion_line = (f"#add_dispersion_debye: {expansion.n_poles} "
                       f"{pairs} {cmd.material_id}")

    csv_paths: tuple[str, ...] = ()
    if options.csv_dir:
        csv_paths = _write_artifacts(cmd, options, model, report)
    if not options.quiet:
        print(f"{cmd.material_id}: {options.optimizer}-dls, {expansion.n_poles} poles, "
              f"err_real {report.err_real:.2f}%, err_imag {report.err_imag:.2f}%, "
              f"err_total {report.err_total:.2f}%, {report.duration:.2f} s, "
              f"seed {report.seed_used}", file=sys.stderr)
    return MaterialOutput(material_line=material_line, dispersion_line=dispersion_line,
                          csv_paths=csv_paths, report=report)


def run_file(path, options: CliOptions = CliOptions(), out=None,
             errors: list | None = None) -> list[MaterialOutput]:
    """Process every hashtag line of a command file in order.

    Blank lines and lines starting with `--` are ignored.  The first parse
    error aborts with its line number (CommandError).  Failures while
    fitting or writing artifacts are reported per line, appended to
    `errors` as (line_no, exception), and processing continues.
    """
    out = sys.stdout if out is None else out
    collected = errors if errors is not None else []
    outputs: list[MaterialOutput] = []
    with open(path, encoding="utf-8") as handle:
        lines = handle.readlines()
    for line_no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("--"):
            continue
        try:
            cmd = parse_command(text)
        except CommandError as exc:
            exc.line_no = line_no
            raise
        try:
            output = run_command(cmd, options)
        except (ValueError, OSError) as exc:
            collected.append((line_no, exc))
            print(f"{path}:{line_no}: {exc}", file=sys.stderr)
            continue
        outputs.append(output)
        print(output.material_line, file=out)
        print(output.dispersion_line, file=out)
    return outputs


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # config errors exit 1, not argparse's 2
        raise CommandError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="debyefit",
        description="Fit multi-pole Debye expansions to dielectric material "
                    "commands and emit #material / #add_dispersion_debye lines.")
    parser.add_argument("--input", required=True, help="command file, one hashtag line per material")
    parser.add_argument("--output", help="write output lines here instead of stdout")
    parser.add_argument("--optimizer", choices=OPTIMIZERS, default="pso",
                        help="global search backend (default: pso)")
    parser.add_argument("--grid-points", type=int, default=50,
                        help="log-spaced frequency samples across the band (default: 50)")
    parser.add_argument("--csv-dir", help="also write spectrum_<id>.csv and convergence_<id>.csv here")
    parser.add_argument("--quiet", action="store_true", help="suppress per-material progress lines")
    return parser


def main(argv=None) -> int:
    """Entry point: 0 on success, 1 on parse/config errors, 2 on I/O errors."""
    try:
        args = _build_parser().parse_args(argv)
    except CommandError as exc:
        print(f"debyefit: {exc}", file=sys.stderr)
        return 1
    if args.grid_points < 2:
        print("debyefit: --grid-points must be >= 2", file=sys.stderr)
        return 1
    options = CliOptions(optimizer=args.optimizer, grid_points=args.grid_points,
                         csv_dir=args.csv_dir, quiet=args.quiet)
    failures: list = []
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as out:
                run_file(args.input, options, out=out, errors=failures)
        else:
            run_file(args.input, options, out=sys.stdout, errors=failures)
    except CommandError as exc:
        where = f"{args.input}:{exc.line_no}: " if exc.line_no else ""
        print(f"debyefit: {where}{exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"debyefit: {exc}", file=sys.stderr)
        return 2
    if any(isinstance(exc, OSError) for _, exc in failures):
        return 2
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
