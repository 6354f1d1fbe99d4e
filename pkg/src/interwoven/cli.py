"""Command-line front end.

Every command writes CSV (one ``#`` metadata line, one header line) or JSON
with sorted keys. Output depends only on the arguments, so repeated runs
are byte-identical. Exit status: 0 success, 2 configuration error, 3
domain or solver error.

Options may also come from a flat ``key = value`` file given with
``interwoven --config FILE <command>``; keys are option names
(``mass-ratio = 0.001``). Command-line flags take precedence over the file.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .constants import OMEGA, TABULATED_RATIOS, scaling_factor, tetramer_level_count, three_body_s, \
    trimer_level_count
from .eigensolver import BoundaryConditions, EnergyLadder, RadialProblem, bound_states, geometric_window, level_count
from .errors import InterwovenError
from .potential import EPSILON_REFERENCE, SystemParams, coulomb_coefficient, default_epsilon_grid, \
    fit_epsilon, kappa_closed_form, potential_profile, radial_scale, solve_kappa
from .spectrum import adiabatic_table, fixed_points, ratio_table, scaling_curve

RATIO_TOLERANCE = 1e-3
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


class ConfigError(click.UsageError):
    exit_code = EXIT_CONFIG


def read_config(path: str | Path) -> dict[str, object]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, object] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if value.lower() in ("true", "yes", "on"):
            out[key] = True
        elif value.lower() in ("false", "no", "off"):
            out[key] = False
        else:
            out[key] = value
    return out


def _fmt(value: float, precision: int) -> str:
    return format(float(value), f".{precision}g")


def _meta(command: str, **items) -> str:
    parts = [f"interwoven {__version__}", command]
    parts += [f"{k}={v}" for k, v in items.items() if v is not None]
    return " ".join(parts)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _csv(rows, header, comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _params(mass_ratio, nbosons, scattering_length, unitary, rstar) -> SystemParams:
    if unitary and scattering_length is not None:
        raise ConfigError("--unitary and --scattering-length are mutually exclusive")
    a = math.inf if scattering_length is None else scattering_length
    return SystemParams(mass_ratio, nbosons, a=a, Rstar=rstar)


def _rc_values(text: str | None) -> list[str]:
    if not text:
        raise ConfigError("--rc-list is required (comma-separated cutoffs)")
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    try:
        [float(t) for t in items]
    except ValueError as exc:
        raise ConfigError(f"bad --rc-list entry: {exc}") from exc
    return items


def output_options(f):
    f = click.option("--precision", type=click.IntRange(1, 17), default=10, show_default=True,
                     help="Significant digits in numeric output.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")(f)
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(f)
    return f


def system_options(default_n: int = 3):
    def deco(f):
        f = click.option("--rstar", type=float, default=0.0, show_default=True,
                         help="Effective-range length of a narrow resonance.")(f)
        f = click.option("--unitary", is_flag=True, default=False, help="Infinite scattering length (default).")(f)
        f = click.option("--scattering-length", type=float, default=None, help="Light-heavy scattering length a.")(f)
        f = click.option("--nbosons", type=click.IntRange(3, None), default=default_n, show_default=True,
                         help="Total number of particles N (two heavy plus N-2 light).")(f)
        f = click.option("--mass-ratio", type=float, default=0.001, show_default=True,
                         help="Light/heavy mass ratio A.")(f)
        return f
    return deco


def wall_options(f):
    f = click.option("--r-long", type=float, default=1000.0, show_default=True, help="Long-range cutoff.")(f)
    f = click.option("--r-short", type=float, default=1.0, show_default=True, help="Short-range wall.")(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="interwoven")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Flat key = value file supplying option defaults.")
@click.pass_context
def cli(ctx, config_path):
    """Interwoven Efimov-like spectra of heavy-heavy-light few-body systems."""
    if config_path is None:
        return
    values = read_config(config_path)
    sub = cli.commands.get(ctx.invoked_subcommand)
    if sub is None:
        return
    known = {p.name for p in sub.params}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"config keys not accepted by '{ctx.invoked_subcommand}': {', '.join(unknown)}")
    ctx.default_map = {ctx.invoked_subcommand: values}


@cli.command()
@output_options
def constants(fmt, out, precision):
    """Omega constant, fitted epsilon and the Coulomb-like coefficient."""
    grid = default_epsilon_grid()
    eps_fit = fit_epsilon(1.0, grid)
    exact = np.array([solve_kappa(R, 1.0).kappa for R in grid])
    resid_fit = float(np.max(np.abs(kappa_closed_form(grid, 1.0, eps_fit) / exact - 1.0)))
    resid_pub = float(np.max(np.abs(kappa_closed_form(grid, 1.0, EPSILON_REFERENCE) / exact - 1.0)))
    rows = [
        ("gamma", OMEGA, abs(OMEGA - math.exp(-OMEGA)), "residual |gamma - exp(-gamma)|"),
        ("epsilon_fit", eps_fit, resid_fit, "max relative error of the closed form on the fit grid"),
        ("epsilon_reference", EPSILON_REFERENCE, resid_pub, "max relative error of the closed form on the fit grid"),
        ("coulomb_coefficient", coulomb_coefficient(OMEGA, EPSILON_REFERENCE), None,
         "2 gamma (1 + epsilon - gamma) with epsilon_reference"),
        ("coulomb_coefficient_fit", coulomb_coefficient(OMEGA, eps_fit), None,
         "2 gamma (1 + epsilon - gamma) with epsilon_fit"),
    ]
    if fmt == "json":
        payload = {name: {"value": float(v), "residual": None if r is None else float(r), "note": note}
                   for name, v, r, note in rows}
        text = _json(payload)
    else:
        text = _csv([(n, _fmt(v, precision), "" if r is None else _fmt(r, 3), note) for n, v, r, note in rows],
                    ["quantity", "value", "residual", "note"], _meta("constants"))
    _emit(text, out)


@cli.command()
@click.argument("which", type=click.Choice(["table1", "table2"]), default="table2")
@click.option("--nbosons", type=click.IntRange(3, None), default=6, show_default=True,
              help="Largest N for table2.")
@output_options
def table(which, nbosons, fmt, out, precision):
    """Reproduce the scaling-factor tables with per-cell deviations."""
    if which == "table1":
        rows = adiabatic_table()
    else:
        rows = ratio_table(sorted(TABULATED_RATIOS, reverse=True), nbosons)
    if fmt == "json":
        text = _json([{"quantity": r.label, "A": r.A, "computed": r.computed, "reference": r.reference,
                       "deviation": r.deviation} for r in rows])
    else:
        blank = lambda v: "" if v is None else _fmt(v, precision)
        text = _csv([(r.label, repr(r.A), _fmt(r.computed, precision), blank(r.reference), blank(r.deviation))
                     for r in rows], ["quantity", "A", "computed", "reference", "deviation"],
                    _meta("table", which=which))
    _emit(text, out)


@cli.command()
@system_options()
@wall_options
@click.option("--points", type=click.IntRange(2, None), default=200, show_default=True,
              help="Log-spaced radii between the walls.")
@click.option("--thresholds", type=click.IntRange(0, None), default=3, show_default=True,
              help="Number of trimer threshold columns E3_n.")
@output_options
def potential(mass_ratio, nbosons, scattering_length, unitary, rstar, r_short, r_long, points, thresholds,
              fmt, out, precision):
    """Tabulate the effective potential with trimer thresholds for plotting.

    E_eff is in units hbar^2/(2 m_light L^2); V_radial = E_eff / (2A) is the
    potential of the radial equation. Threshold columns E3_n hold the deepest
    three-body level between the walls followed by its geometric ladder.
    """
    params = _params(mass_ratio, nbosons, scattering_length, unitary, rstar)
    _check_walls(r_short, r_long)
    grid = np.geomspace(r_short, r_long, points)
    prof = potential_profile(params, grid)
    extra = {"V_radial": prof.radial_values()}
    if thresholds:
        p3 = SystemParams(params.A, 3, a=params.a, Rstar=params.Rstar)
        prof3 = potential_profile(p3, prof.grid)
        hi = prof3.grid[-1]
        ladder = bound_states(RadialProblem(BoundaryConditions(r_short, hi), profile=prof3), 1)
        if len(ladder):
            s0 = three_body_s(params.A)
            scale = radial_scale(params.A)
            for n in range(thresholds):
                extra[f"E3_{n}"] = -ladder.levels[0] * math.exp(-2 * math.pi * n / s0.s) / scale
    prof = type(prof)(prof.params, prof.grid, prof.values, prof.threshold, prof.merge_radius, extra)
    meta = _meta("potential", A=mass_ratio, N=nbosons, a=params.a, rstar=rstar, r_short=r_short, r_long=r_long)
    if fmt == "json":
        cols = {"R": prof.grid, "E_eff": prof.values, "threshold": np.full_like(prof.grid, prof.threshold)}
        cols.update({k: np.broadcast_to(v, prof.grid.shape) for k, v in extra.items()})
        text = _json({"meta": meta, "merge_radius": prof.merge_radius,
                      "columns": {k: [float(_fmt(x, precision)) for x in v] for k, v in cols.items()}})
    else:
        text = prof.to_csv(precision, header_comment=meta)
    _emit(text, out)


def _check_walls(r_short, r_long):
    if not 0.0 < r_short < r_long:
        raise ConfigError(f"need 0 < --r-short < --r-long, got {r_short}, {r_long}")


def spectrum_payload(params: SystemParams, r_short: float, r_long: float, max_levels: int, precision: int) -> dict:
    """Bound states for ``params`` between the walls, with a geometric-ratio check."""
    bc = BoundaryConditions(r_short, r_long)
    if params.unitary and params.Rstar == 0.0:
        s = scaling_factor(params.A, params.N)
        ladder = bound_states(RadialProblem.unitary(s, bc), max_levels)
        s_val, source, ratio = s.s, s.source, s.ratio
    else:
        grid = np.geomspace(r_short, r_long, 4000)
        prof = potential_profile(params, grid)
        if prof.grid[-1] < r_long:
            bc = BoundaryConditions(r_short, float(prof.grid[-1]))
        ladder = bound_states(RadialProblem(bc, profile=prof), max_levels)
        s_val, source, ratio = None, None, None
    payload = ladder.to_dict(precision)
    payload["s"] = s_val
    payload.update(A=params.A, N=params.N, s_source=source, geometric_ratio=ratio, rstar=params.Rstar,
                   scattering_length=None if params.unitary else params.a)
    payload["ratio_check"] = verify_ratios(payload)
    return payload


def verify_ratios(payload: dict, tolerance: float = RATIO_TOLERANCE) -> dict:
    """Compare adjacent-level ratios with the geometric ratio for levels far from both walls."""
    ratio = payload.get("geometric_ratio")
    levels = np.array([lv["B"] for lv in payload["levels"]], dtype=float)
    if ratio is None or len(levels) < 2:
        return {"tolerance": tolerance, "checked_pairs": 0, "max_relative_deviation": None, "passed": True}
    r_long = payload["r_long"] if payload["r_long"] is not None else math.inf
    lad = EnergyLadder(levels, tuple(range(len(levels))), "numerov", None, payload["r_short"], r_long)
    window = set(geometric_window(lad).tolist())
    idx = [i for i in sorted(window) if i + 1 in window]
    if not idx:
        return {"tolerance": tolerance, "checked_pairs": 0, "max_relative_deviation": None, "passed": True}
    dev = max(abs(levels[i] / levels[i + 1] / ratio - 1.0) for i in idx)
    return {"tolerance": tolerance, "checked_pairs": len(idx), "max_relative_deviation": float(_fmt(dev, 6)),
            "passed": bool(dev < tolerance)}


@cli.command()
@system_options(default_n=4)
@wall_options
@click.option("--max-levels", type=click.IntRange(1, None), default=50, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")
@click.option("--precision", type=click.IntRange(1, 17), default=10, show_default=True)
def spectrum(mass_ratio, nbosons, scattering_length, unitary, rstar, r_short, r_long, max_levels, fmt, out,
             precision):
    """Bound levels of the N-body radial equation between two walls (JSON).

    At unitarity with no effective range the pure 1/R^2 problem with s_N is
    solved; otherwise the tabulated effective potential is used. After
    writing, the file is read back and the ratios of levels far from both
    walls are checked against e^(2 pi/s_N).
    """
    params = _params(mass_ratio, nbosons, scattering_length, unitary, rstar)
    _check_walls(r_short, r_long)
    payload = spectrum_payload(params, r_short, r_long, max_levels, precision)
    text = _json(payload)
    _emit(text, out)
    check = verify_ratios(json.loads(Path(out).read_text() if out else text))
    if not check["passed"]:
        click.echo(f"ratio check failed: max relative deviation {check['max_relative_deviation']}", err=True)
        sys.exit(EXIT_DOMAIN)


@cli.command("scaling-curve")
@click.option("--mass-ratio", type=float, default=0.001, show_default=True)
@click.option("--nbosons", type=click.IntRange(3, None), default=4, show_default=True)
@click.option("--r-short", type=float, default=1.0, show_default=True)
@click.option("--rc-list", type=str, default=None, help="Comma-separated long-range cutoffs.")
@click.option("--triple", type=str, default="tracked", show_default=True,
              help="Levels used for X, Y: tracked, deepest, or an index n.")
@output_options
def scaling_curve_cmd(mass_ratio, nbosons, r_short, rc_list, triple, fmt, out, precision):
    """Ratios X = B(n)/B(n+1), Y = B(n+1)/B(n+2) against the long-range cutoff."""
    items = _rc_values(rc_list)
    if triple not in ("tracked", "deepest"):
        try:
            triple = int(triple)
        except ValueError as exc:
            raise ConfigError("--triple must be tracked, deepest or a non-negative integer") from exc
    curve = scaling_curve(mass_ratio, nbosons, r_short, [float(t) for t in items], triple=triple)
    labels = {float(t): t for t in items}
    refs = fixed_points(mass_ratio)
    if fmt == "json":
        payload = {
            "N": curve.N, "s": curve.s, "fixed_point": curve.fixed_point, "level_index": curve.level_indices[0],
            "points": [{"Rc": labels[Rc], "X": X, "Y": Y} for Rc, X, Y in curve.points],
            "reference": [{"N": N, "fixed_point": fp} for N, fp in refs],
            "skipped": [{"Rc": labels.get(Rc, Rc), "reason": why} for Rc, why in curve.skipped],
        }
        text = _json(json.loads(json.dumps(payload), parse_float=lambda v: float(_fmt(float(v), precision))))
    else:
        rows = [(N, "inf", _fmt(fp, precision), _fmt(fp, precision), _fmt(fp, precision)) for N, fp in refs]
        rows += [(curve.N, labels[Rc], _fmt(X, precision), _fmt(Y, precision), _fmt(curve.fixed_point, precision))
                 for Rc, X, Y in curve.points]
        meta = _meta("scaling-curve", A=mass_ratio, N=nbosons, r_short=r_short, triple=triple,
                     level_index=curve.level_indices[0])
        text = _csv(rows, ["N", "Rc", "X", "Y", "fixed_point"], meta)
    _emit(text, out)


@cli.command("count-levels")
@system_options()
@click.option("--r-short", type=float, default=1.0, show_default=True, help="Short-range wall (r1 or r2).")
@click.option("--r-long", type=float, default=None,
              help="Long-range cutoff; defaults to |a| for N=3 and 1/sqrt(B3) for N=4.")
@click.option("--b3", type=float, default=None, help="Ground trimer binding (N=4 formula).")
@output_options
def count_levels(mass_ratio, nbosons, scattering_length, unitary, rstar, r_short, r_long, b3, fmt, out, precision):
    """Level counts from the closed-form formulas next to the eigensolver count."""
    params = _params(mass_ratio, nbosons, scattering_length, unitary, rstar)
    s = scaling_factor(params.A, params.N)
    formula = None
    if params.N == 3 and not params.unitary:
        formula = trimer_level_count(params.a, r_short, s)
        r_long = r_long if r_long is not None else abs(params.a)
    elif params.N == 4 and b3 is not None:
        formula = tetramer_level_count(b3, r_short, s)
        r_long = r_long if r_long is not None else 1.0 / math.sqrt(b3)
    if r_long is None:
        raise ConfigError("give --r-long (or --scattering-length for N=3, --b3 for N=4)")
    _check_walls(r_short, r_long)
    phase = math.floor(s.s / math.pi * math.log(r_long / r_short))
    solver = level_count(RadialProblem.unitary(s, BoundaryConditions(r_short, r_long)))
    row = {"N": params.N, "s": s.s, "r_short": r_short, "r_long": r_long, "formula": formula,
           "phase_count": phase, "eigensolver": solver}
    if fmt == "json":
        text = _json(row)
    else:
        text = _csv([[row["N"], _fmt(s.s, precision), _fmt(r_short, precision), _fmt(r_long, precision),
                      "" if formula is None else formula, phase, solver]],
                    ["N", "s", "r_short", "r_long", "formula", "phase_count", "eigensolver"],
                    _meta("count-levels", A=mass_ratio))
    _emit(text, out)


def main(argv=None) -> int:
    """Entry point; returns the process exit status."""
    try:
        result = cli.main(args=argv, prog_name="interwoven", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (InterwovenError, ValueError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DOMAIN
    except SystemExit as exc:
        return int(exc.code or 0)
    return result if isinstance(result, int) else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
