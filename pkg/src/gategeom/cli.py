"""Command-line interface.

Numeric output uses 12 significant digits; every command that prints a
structured result also takes ``--json``.  Exit codes: 0 success, 1
failed verification or internal inconsistency, 2 bad input, 3 I/O
trouble.
"""
from __future__ import annotations

import json
import os
import re
import sys

import click
import numpy as np

from . import __version__
from .coords import CanonicalCoords, in_weyl_chamber
from .errors import RangeError, ValidationError
from .gates import NAMED_GATE_POINTS, matrix_from_json_dict, require_unitary
from .invariants import (
    canonical_coords,
    g_from_c,
    makhlin_invariants,
    project_su4,
    validate_invariant_ranges,
)
from .geometry import weyl_density
from .sampling import (
    SamplerConfig,
    export_csv,
    export_jsonl,
    sample_canonical,
    sample_gates,
    summarize_samples,
)
from .verify import run_checks
from . import volumes as vol

_FMT = "%.12g"

#: Agreement bands for the multi-method volume reports: deterministic
#: routes must match to this relative tolerance, Monte Carlo to this
#: many standard errors.
_AGREE_REL = 1e-5
_AGREE_SIGMA = 3.0


def _fmt(x) -> str:
    return _FMT % float(x)


def _default_threads() -> int:
    return os.cpu_count() or 1


_ANGLE_RE = re.compile(r"^(-?)(\d+\.?\d*|\.\d+)?\*?pi(?:/(\d+\.?\d*|\.\d+))?$")


def parse_angle(text: str) -> float:
    """Parse an angle given as a float or in pi notation (pi/4, 3pi/8, -pi)."""
    s = str(text).strip().lower().replace(" ", "")
    m = _ANGLE_RE.match(s)
    if m:
        sign = -1.0 if m.group(1) else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * coef * np.pi / den
    try:
        return float(s)
    except ValueError:
        raise click.BadParameter(f"cannot parse angle {text!r}") from None


def _parse_triple(text: str, what: str = "coordinates") -> tuple[float, float, float]:
    parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) != 3:
        raise click.BadParameter(f"{what} must be three comma-separated values")
    return tuple(parse_angle(p) for p in parts)


def _read_matrix(source: str) -> np.ndarray:
    if source == "-":
        obj = json.load(sys.stdin)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    return require_unitary(matrix_from_json_dict(obj), what="input matrix")


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    for key, value in payload.items():
        if isinstance(value, (list, tuple)):
            click.echo(f"{key} = " + " ".join(_fmt(v) for v in value))
        elif isinstance(value, bool):
            click.echo(f"{key} = {'yes' if value else 'no'}")
        elif isinstance(value, (int, float)):
            click.echo(f"{key} = {_fmt(value)}")
        else:
            click.echo(f"{key} = {value}")


class _Cli(click.Group):
    """Translates library errors into the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except ValueError as exc:  # ValidationError and friends
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            ctx.exit(3)
        except RuntimeError as exc:  # ConsistencyError: internal breakage
            click.echo(f"internal consistency failure: {exc}", err=True)
            ctx.exit(1)


@click.group(cls=_Cli)
@click.version_option(__version__, prog_name="gategeom")
def cli():
    """Invariant geometry of two-qubit gates."""


def _class_report(c: CanonicalCoords) -> dict:
    g = g_from_c(c.as_array())
    return {
        "c": [float(v) for v in c.as_tuple()],
        "g": [float(v) for v in g],
        "perfect_entangler": bool(vol.is_perfect_entangler(c.as_array())),
        "density": float(weyl_density(c.as_array())),
    }


def _coords_option(coords: str) -> CanonicalCoords:
    c = _parse_triple(coords)
    if not in_weyl_chamber(*c):
        raise ValidationError(
            f"coordinates {c} lie outside the chamber; canonicalize a matrix instead"
        )
    return CanonicalCoords(*c)


@cli.command()
@click.argument("matrix", required=False)
@click.option("--coords", help="chamber coordinates c1,c2,c3 instead of a matrix file")
@click.option("--json", "as_json", is_flag=True, help="emit JSON")
def invariants(matrix, coords, as_json):
    """Full local-class report of a gate (JSON matrix file, '-' for stdin).

    Prints the invariant triple g, the chamber coordinates c, the global
    phase chi, the perfect-entangler verdict and the chamber density at
    the class point.
    """
    if (matrix is None) == (coords is None):
        raise click.UsageError("provide exactly one of MATRIX or --coords")
    if coords is not None:
        report = _class_report(_coords_option(coords))
    else:
        U = _read_matrix(matrix)
        g = makhlin_invariants(U)
        c = canonical_coords(U)
        _, phase = project_su4(U)
        report = _class_report(c)
        report["g"] = list(g.as_tuple())
        report["chi"] = phase.chi
        report = {k: report[k] for k in ("g", "c", "chi", "perfect_entangler", "density")}
    _emit(report, as_json)


@cli.command()
@click.argument("matrix")
@click.option("--json", "as_json", is_flag=True, help="emit JSON")
def canonicalize(matrix, as_json):
    """Canonical chamber coordinates and global phase of a gate."""
    U = _read_matrix(matrix)
    _, phase = project_su4(U)
    c = canonical_coords(U)
    _emit({"c": list(c.as_tuple()), "chi": phase.chi}, as_json)


@cli.command()
@click.argument("matrix", required=False)
@click.option("--coords", help="chamber coordinates c1,c2,c3 instead of a matrix file")
@click.option("--json", "as_json", is_flag=True, help="emit JSON")
def classify(matrix, coords, as_json):
    """Coordinates, invariants and perfect-entangler status of a class."""
    if (matrix is None) == (coords is None):
        raise click.UsageError("provide exactly one of MATRIX or --coords")
    c = _coords_option(coords) if coords is not None else canonical_coords(_read_matrix(matrix))
    _emit(_class_report(c), as_json)


@cli.group()
def volume():
    """Masses of distinguished regions under the invariant measure."""


def _parse_methods(text: str, allowed: tuple[str, ...]) -> list[str]:
    if text.strip().lower() == "all":
        return list(allowed)
    methods = [m.strip().lower() for m in text.split(",") if m.strip()]
    if not methods:
        raise click.BadParameter("no methods given")
    for m in methods:
        if m not in allowed:
            raise click.BadParameter(f"unknown method {m!r}; choose from {', '.join(allowed)} or all")
    return list(dict.fromkeys(methods))


def _volume_report(results: dict, notes: dict, as_json: bool) -> None:
    """Print per-method values plus an agreement flag when comparable."""
    checks = []
    if "closed" in results and "quadrature" in results:
        closed, quad = results["closed"].value, results["quadrature"].value
        checks.append(abs(quad - closed) <= _AGREE_REL * max(abs(closed), 1e-300))
    if "mc" in results:
        ref = results.get("closed", results.get("quadrature"))
        if ref is not None:
            mc = results["mc"]
            band = _AGREE_SIGMA * max(mc.error_estimate or 0.0, 1e-300)
            checks.append(abs(mc.value - ref.value) <= band)
    payload = {}
    for name, res in results.items():
        payload[name] = res.value
        if res.error_estimate is not None:
            payload[f"{name}_error"] = res.error_estimate
    for name, note in notes.items():
        payload[name] = note
    if checks:
        payload["agreement"] = all(checks)
    _emit(payload, as_json)


_METHODS_HELP = "comma-separated subset of {%s}, or 'all'"


def _volume_options(defaults: str, allowed: str):
    def wrap(fn):
        for opt in reversed(
            [
                click.option(
                    "--methods",
                    default=defaults,
                    show_default=True,
                    help=_METHODS_HELP % allowed,
                ),
                click.option("--samples", type=int, default=200_000, show_default=True),
                click.option("--seed", type=int, default=0, show_default=True),
                click.option("--threads", type=int, default=None, help="MC workers [default: cores]"),
                click.option("--json", "as_json", is_flag=True, help="emit JSON"),
            ]
        ):
            fn = opt(fn)
        return fn

    return wrap


def _mc(region: vol.Region, samples: int, seed: int, threads: int | None) -> vol.VolumeResult:
    return vol.region_volume_mc(
        region, samples=samples, seed=seed, worker_count=threads or _default_threads()
    )


@volume.command("pe")
@click.option("--resolution", type=int, default=300, show_default=True)
@_volume_options("closed,quadrature", "closed, quadrature, mc")
def volume_pe(resolution, methods, samples, seed, threads, as_json):
    """Mass of the perfect-entangler wedge."""
    results = {}
    for m in _parse_methods(methods, ("closed", "quadrature", "mc")):
        if m == "mc":
            results[m] = _mc(vol.Region("pe"), samples, seed, threads)
        else:
            results[m] = vol.pe_volume(m, resolution=resolution)
    _volume_report(results, {}, as_json)


@volume.command("cube")
@click.option("--gate", type=click.Choice(sorted(NAMED_GATE_POINTS)), help="named center")
@click.option("--center", help="cube center c1,c2,c3 (pi notation ok)")
@click.option("--side", required=True, help="cube side length (pi notation ok)")
@click.option("--clip", type=click.Choice(["none", "chamber"]), default="none", show_default=True)
@click.option("--order", type=int, default=20, show_default=True, help="quadrature order")
@_volume_options("closed,quadrature", "closed, quadrature, mc")
def volume_cube(gate, center, side, clip, order, methods, samples, seed, threads, as_json):
    """Mass of a coordinate cube.

    With the default clip=none this is the unclipped absolute-density
    integral the closed forms compute; clip=chamber counts only the
    chamber share (no closed forms there).
    """
    if (gate is None) == (center is None):
        raise click.UsageError("provide exactly one of --gate or --center")
    ctr = NAMED_GATE_POINTS[gate] if gate else _parse_triple(center, "center")
    a = parse_angle(side)
    wanted = _parse_methods(methods, ("closed", "quadrature", "mc"))
    if "closed" in wanted and clip != "none":
        raise click.UsageError("closed cube forms exist only for clip=none")
    results, notes = {}, {}
    for m in wanted:
        if m == "closed":
            try:
                results[m] = vol.VolumeResult(vol.cube_volume_closed(ctr, a), "closed")
            except RangeError as exc:
                if len(wanted) == 1:
                    raise
                notes[m] = f"unavailable ({exc})"
        elif m == "quadrature":
            results[m] = vol.VolumeResult(
                vol.cube_volume_quadrature(ctr, a, order=order, clip=clip), "quadrature"
            )
        else:
            mode = "unclipped" if clip == "none" else "chamber"
            results[m] = _mc(vol.Region("cube_c", tuple(ctr), a, clip=mode), samples, seed, threads)
    _volume_report(results, notes, as_json)


@volume.command("cylinder")
@click.option("--center", required=True, help="axis position g1,g2,g3 in invariant space")
@click.option("--radius", required=True, type=float)
@click.option("--height", required=True, type=float)
@_volume_options("closed,quadrature", "closed, quadrature, mc")
def volume_cylinder(center, radius, height, methods, samples, seed, threads, as_json):
    """Mass of a g3-aligned cylinder in invariant space."""
    parts = [p for p in center.split(",") if p.strip()]
    if len(parts) != 3:
        raise click.BadParameter("center must be g1,g2,g3")
    ctr = tuple(float(p) for p in parts)
    validate_invariant_ranges(*ctr)
    results = {}
    for m in _parse_methods(methods, ("closed", "quadrature", "mc")):
        if m == "closed":
            results[m] = vol.VolumeResult(vol.cylinder_volume_g(ctr[:2], radius, height), "closed")
        elif m == "quadrature":
            results[m] = vol.VolumeResult(
                vol.cylinder_volume_quadrature(ctr[:2], radius, height), "quadrature"
            )
        else:
            results[m] = _mc(vol.Region("cylinder_g", ctr, radius, height), samples, seed, threads)
    _volume_report(results, {}, as_json)


@volume.command("sphere")
@click.option("--radius", required=True, type=float)
@_volume_options("closed,quadrature", "closed, quadrature, mc")
def volume_sphere(radius, methods, samples, seed, threads, as_json):
    """Mass of an origin-centred sphere in invariant space."""
    results = {}
    for m in _parse_methods(methods, ("closed", "quadrature", "mc")):
        if m == "closed":
            results[m] = vol.VolumeResult(vol.origin_volume_g("sphere", radius), "closed")
        elif m == "quadrature":
            results[m] = vol.VolumeResult(vol.origin_volume_quadrature("sphere", radius), "quadrature")
        else:
            results[m] = _mc(vol.Region("sphere_g", (0.0, 0.0, 0.0), radius), samples, seed, threads)
    _volume_report(results, {}, as_json)


@cli.command()
@click.option("-n", "--count", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--method",
    type=click.Choice(["matrix-oracle", "coordinate-density"]),
    default="matrix-oracle",
    show_default=True,
)
@click.option("--threads", type=int, default=None, help="worker threads [default: cores]")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "jsonl", "summary"]),
    default="csv",
    show_default=True,
)
@click.option("-o", "--output", default="-", show_default=True, help="output file, '-' for stdout")
def sample(count, seed, method, threads, fmt, output):
    """Draw random gates under the invariant measure."""
    cfg = SamplerConfig(
        seed=seed,
        worker_count=threads or _default_threads(),
        method=method.replace("-", "_"),
    )
    if fmt == "jsonl":
        export_jsonl(sys.stdout if output == "-" else output, sample_gates(count, cfg))
        return
    coords = sample_canonical(count, cfg)
    if fmt == "summary":
        text = json.dumps(summarize_samples(coords), indent=2, sort_keys=True) + "\n"
        if output == "-":
            click.echo(text, nl=False)
        else:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        return
    export_csv(sys.stdout if output == "-" else output, coords)


@cli.group()
def mesh():
    """Point meshes for plotting the chamber and its densities."""


@mesh.command("weyl-c")
@click.option("--resolution", type=int, default=25, show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def mesh_weyl_c(resolution, output):
    """Chamber membership grid with PE flags, CSV c1,c2,c3,is_pe."""
    rows = [
        (c1, c2, c3, int(vol.is_perfect_entangler(np.array([c1, c2, c3]))))
        for c1, c2, c3 in _chamber_grid(resolution)
    ]
    _write_rows(output, "c1,c2,c3,is_pe", rows)


@mesh.command("weyl-g")
@click.option("--resolution", type=int, default=25, show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def mesh_weyl_g(resolution, output):
    """Image of the chamber grid in invariant space, CSV g1,g2,g3."""
    pts = np.array(_chamber_grid(resolution))
    g = g_from_c(pts)
    _write_rows(output, "g1,g2,g3", [tuple(row) for row in g])


@mesh.command("density-slice")
@click.option("--c3", "c3_text", default="0", show_default=True, help="slice height (pi notation ok)")
@click.option("--resolution", type=int, default=61, show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def mesh_density_slice(c3_text, resolution, output):
    """Constant-c3 slice of the chamber density, CSV c1,c2,density.

    Points outside the chamber get density zero (the marginal density is
    supported on the chamber).
    """
    if resolution < 2:
        raise ValidationError("mesh resolution must be at least 2")
    c3 = parse_angle(c3_text)
    if not 0.0 <= c3 <= np.pi / 2:
        raise ValidationError("slice height must lie in [0, pi/2]")
    rows = []
    for a in np.linspace(0.0, np.pi, resolution):
        for b in np.linspace(0.0, np.pi / 2, resolution):
            inside = in_weyl_chamber(a, b, c3)
            dens = float(weyl_density(np.array([a, b, c3]))) if inside else 0.0
            rows.append((a, b, dens))
    _write_rows(output, "c1,c2,density", rows)


def _chamber_grid(resolution: int) -> list[tuple[float, float, float]]:
    if resolution < 2:
        raise ValidationError("mesh resolution must be at least 2")
    ax1 = np.linspace(0.0, np.pi, 2 * resolution - 1)
    ax2 = np.linspace(0.0, np.pi / 2, resolution)
    return [
        (a, b, c)
        for a in ax1
        for b in ax2
        for c in ax2
        if in_weyl_chamber(a, b, c)
    ]


def _write_rows(output: str, header: str, rows) -> None:
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if output == "-":
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


@cli.command()
@click.option("--level", type=click.Choice(["quick", "full"]), default="quick", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--only", multiple=True, help="run only checks whose name contains this")
@click.option("--json", "as_json", is_flag=True, help="emit a JSON summary")
@click.pass_context
def verify(ctx, level, seed, only, as_json):
    """Run the self-verification battery; nonzero exit on any failure."""
    results = run_checks(level, seed=seed, names=list(only) or None)
    if not results:
        click.echo("error: no checks match the given names", err=True)
        ctx.exit(2)
    n_passed = sum(1 for r in results if r.passed)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "level": level,
                    "seed": seed,
                    "passed": n_passed == len(results),
                    "checks": [
                        {
                            "name": r.name,
                            "passed": r.passed,
                            "detail": r.detail,
                            "duration": r.duration,
                        }
                        for r in results
                    ],
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            click.echo(f"{status}  {r.name:28s} {r.duration:7.2f}s  {r.detail}")
        click.echo(f"{n_passed}/{len(results)} checks passed")
    if n_passed != len(results):
        ctx.exit(1)


main = cli

if __name__ == "__main__":
    main()
