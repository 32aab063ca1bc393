"""Command line front end.

Exit codes: 0 success or extendible, 2 input error, 3 not extendible,
4 conflicting evidence.
"""
from __future__ import annotations

import csv
import functools
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np
from numpy.polynomial import polynomial as npoly

from . import __version__
from .argument import probe_harness, winding_number
from .cauchy import BoundarySamples, ProbeConfig, compute_moments, reconstruct
from .errors import MerextError
from .fileio import (atomic_write, csv_text, dumps_json, load_domain, read_json, read_samples,
                     write_csv, write_json, write_samples)
from .generators import GeneratorSpec
from .poles import DetectConfig, ExtensionReport, detect

EXIT_OK, EXIT_INPUT, EXIT_NOT_EXTENDIBLE, EXIT_CONFLICT = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    nodes: int | None = None
    n_poles: int = 1
    tol_rel: float = 1e-8
    band: float | None = None
    mismatch_tol: float = 1e-6
    rho_min: float = 1e-6
    cluster: float = 1e-3
    trials: int = 200
    complexity: int = 3
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_rel", "mismatch_tol", "rho_min", "cluster"):
            if not getattr(self, name) > 0:
                raise click.BadParameter(f"{name} must be positive")
        if self.band is not None and not self.band > 0:
            raise click.BadParameter("band must be positive")
        if self.nodes is not None and (self.nodes < 4 or self.nodes & (self.nodes - 1)):
            raise click.BadParameter("--nodes must be a power of two")

    def detect_config(self) -> DetectConfig:
        return DetectConfig(tol_rel=self.tol_rel, mismatch_tol=self.mismatch_tol,
                            cluster_factor=self.cluster, probes=ProbeConfig())


def exit_code(report: ExtensionReport) -> int:
    if report.extendible:
        return EXIT_OK
    return EXIT_CONFLICT if report.conflicting else EXIT_NOT_EXTENDIBLE


def input_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MerextError as exc:
            click.echo(f"{exc.code}: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            click.echo(f"InputError: {exc}", err=True)
            sys.exit(EXIT_INPUT)
    return wrapper


domain_opt = click.option("--domain", "domain_file", required=True, type=click.Path(exists=True),
                          help="Domain JSON file.")
samples_opt = click.option("--samples", "samples_file", required=True, type=click.Path(exists=True),
                           help="Samples CSV aligned with the domain grid.")
nodes_opt = click.option("--nodes", type=int, default=None, help="Override nodes per curve.")
band_opt = click.option("--band", type=float, default=None, help="Near-boundary band width.")
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                       help="Output file (stdout if omitted).")


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        click.echo(text, nl=False)


def _load(domain_file, samples_file, nodes, band):
    domain = load_domain(domain_file, nodes, band)
    return domain, read_samples(samples_file, domain)


@click.group()
@click.version_option(__version__)
def main():
    """Meromorphic extendibility of boundary data on multiply connected domains."""


@main.command("domain-check")
@domain_opt
@nodes_opt
@band_opt
@input_errors
def domain_check(domain_file, nodes, band):
    """Validate a domain file and summarize it."""
    d = load_domain(domain_file, nodes, band)
    fixes = d.orientation_fixes
    msg = f"m={d.m}, outer={d.outer_index}, orientation normalized"
    msg += f" ({fixes} curve{'s' if fixes != 1 else ''} reversed)"
    if d.m > 1:
        msg += f", min inter-curve distance={d.min_separation:.6g}"
    click.echo(msg + f", band={d.band:.6g}")


def _generator(text: str) -> GeneratorSpec:
    p = Path(text)
    data = read_json(p) if p.exists() else json.loads(text)
    return GeneratorSpec.from_dict(data)


@main.command()
@domain_opt
@click.option("--generator", "generator", required=True,
              help="Generator spec as inline JSON or a path to a JSON file.")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Samples CSV to write.")
@nodes_opt
@band_opt
@input_errors
def synth(domain_file, generator, out, nodes, band):
    """Sample a synthetic function on the grid and write a ground-truth sidecar."""
    d = load_domain(domain_file, nodes, band)
    spec = _generator(generator)
    samples = BoundarySamples.from_function(d, spec.function())
    sidecar = Path(out).with_suffix(".truth.json")
    write_samples(out, samples)
    write_json(sidecar, {"generator": spec.to_dict(), **spec.truth(d)})
    click.echo(f"wrote {out} and {sidecar}")


@main.command()
@domain_opt
@samples_opt
@click.option("--count", "J", type=int, default=10, show_default=True, help="Number of moments.")
@nodes_opt
@band_opt
@out_opt
@click.option("--format", "fmt_", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
@input_errors
def moments(domain_file, samples_file, J, nodes, band, out, fmt_):
    """Moments c_1..c_J of the boundary data."""
    d, f = _load(domain_file, samples_file, nodes, band)
    c = compute_moments(d, f, J).values
    if fmt_ == "json":
        text = dumps_json({"moments": [{"j": j, "re": v.real, "im": v.imag}
                                       for j, v in enumerate(c, 1)]})
    else:
        text = csv_text(["j", "re", "im"], [(j, v.real, v.imag) for j, v in enumerate(c, 1)])
    _emit(text, out)


def _detect_options(fn):
    for opt in reversed([
        click.option("--n-poles", "n_poles", type=int, default=1, show_default=True,
                     help="Upper bound N on the number of poles."),
        click.option("--tol", "tol", type=float, default=1e-8, show_default=True,
                     help="Relative tolerance of the extension test."),
        click.option("--mismatch-tol", type=float, default=1e-6, show_default=True,
                     help="Relative tolerance on the boundary mismatch."),
        click.option("--cluster", type=float, default=1e-3, show_default=True,
                     help="Root clustering factor."),
    ]):
        fn = opt(fn)
    return fn


@main.command("detect")
@domain_opt
@samples_opt
@_detect_options
@nodes_opt
@band_opt
@out_opt
@click.option("--poles-csv", type=click.Path(dir_okay=False), default=None,
              help="Also write pole locations as CSV.")
@click.option("--format", "fmt_", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@input_errors
def detect_cmd(domain_file, samples_file, n_poles, tol, mismatch_tol, cluster, nodes, band, out,
               poles_csv, fmt_):
    """Detect a meromorphic extension with at most N poles."""
    cfg = RunConfig(nodes=nodes, n_poles=n_poles, tol_rel=tol, band=band,
                    mismatch_tol=mismatch_tol, cluster=cluster)
    d, f = _load(domain_file, samples_file, nodes, band)
    report = detect(d, f, n_poles, cfg.detect_config())
    rows = [(z.real, z.imag, m) for z, m in report.poles]
    if fmt_ == "json":
        text = dumps_json(report.to_dict())
    else:
        r = report.to_dict()
        text = csv_text(["verdict", "n_poles", "conflicting", "holo", "tail_max", "mismatch"],
                        [(r["verdict"], n_poles, r["conflicting_evidence"], report.holo_residual,
                          float(np.max(np.abs(report.tail))),
                          math.nan if report.mismatch is None else report.mismatch)])
    if poles_csv:
        write_csv(poles_csv, ["re", "im", "multiplicity"], rows)
    _emit(text, out)
    sys.exit(exit_code(report))


@main.command()
@domain_opt
@samples_opt
@nodes_opt
@band_opt
@input_errors
def winding(domain_file, samples_file, nodes, band):
    """Winding number of the boundary data around the origin."""
    d, f = _load(domain_file, samples_file, nodes, band)
    click.echo(str(winding_number(d, f)))


@main.command()
@domain_opt
@samples_opt
@click.option("--n-poles", "n_poles", type=int, default=1, show_default=True)
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--complexity", type=int, default=3, show_default=True,
              help="Largest number of poles per probe function.")
@click.option("--rho-min", type=float, default=1e-6, show_default=True,
              help="Admissibility floor relative to max |Pf+Q|.")
@nodes_opt
@band_opt
@out_opt
@click.option("--format", "fmt_", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@input_errors
def probe(domain_file, samples_file, n_poles, trials, seed, complexity, rho_min, nodes, band, out,
          fmt_):
    """Check W(Pf+Q) >= -N on seeded random probes."""
    RunConfig(nodes=nodes, n_poles=n_poles, rho_min=rho_min, trials=trials, seed=seed,
              complexity=complexity, band=band)
    d, f = _load(domain_file, samples_file, nodes, band)
    rep = probe_harness(d, f, n_poles, trials, seed, complexity, rho_min)
    if fmt_ == "json":
        r = rep.to_dict()
        r["conclusion"] = ("violations found: not extendible with this N" if rep.violations
                           else "no violations (inconclusive)")
        text = dumps_json(r)
    else:
        text = csv_text(["trial", "complexity", "winding"],
                        [(w["trial"], w["complexity"], w["winding"]) for w in rep.windings])
    _emit(text, out)


def _parse_point(text: str) -> complex:
    text = text.strip()
    if "," in text:
        re, im = text.split(",", 1)
        return complex(float(re), float(im))
    return complex(text.replace(" ", "").replace("i", "j"))


@main.command("reconstruct")
@domain_opt
@samples_opt
@click.option("--report", "report_file", required=True, type=click.Path(exists=True),
              help="Report JSON written by detect.")
@click.option("--point", "points", multiple=True, help="Evaluation point 're,im' (repeatable).")
@click.option("--points-file", type=click.Path(exists=True), default=None,
              help="CSV with columns re,im.")
@nodes_opt
@band_opt
@out_opt
@input_errors
def reconstruct_cmd(domain_file, samples_file, report_file, points, points_file, nodes, band, out):
    """Evaluate the detected extension at interior points."""
    d, f = _load(domain_file, samples_file, nodes, band)
    rep = read_json(report_file)
    if rep.get("Q_coeffs"):
        Q = np.array([complex(a, b) for a, b in rep["Q_coeffs"]])
    else:
        roots = [complex(p["re"], p["im"]) for p in rep.get("poles", [])
                 for _ in range(p["multiplicity"])]
        Q = npoly.polyfromroots(roots) if roots else np.ones(1, dtype=complex)
    zs = [_parse_point(p) for p in points]
    if points_file:
        with open(points_file, newline="") as fh:
            zs += [complex(float(r["re"]), float(r["im"])) for r in csv.DictReader(fh)]
    if not zs:
        raise click.UsageError("give at least one --point or --points-file")
    rows = []
    for z in zs:
        try:
            v = reconstruct(d, f, Q, z)
            rows.append((z.real, z.imag, v.real, v.imag, "ok"))
        except (MerextError, ValueError) as exc:
            code = exc.code if isinstance(exc, MerextError) else "NotInDomain"
            rows.append((z.real, z.imag, "", "", code))
    _emit(csv_text(["re", "im", "value_re", "value_im", "status"], rows), out)


def _parse_range(text: str) -> range:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


@main.command()
@domain_opt
@samples_opt
@click.option("--n-range", default="0:4", show_default=True, help="Inclusive range lo:hi of N.")
@click.option("--tol", "tol", type=float, default=1e-8, show_default=True)
@click.option("--mismatch-tol", type=float, default=1e-6, show_default=True)
@click.option("--cluster", type=float, default=1e-3, show_default=True)
@nodes_opt
@band_opt
@out_opt
@click.option("--format", "fmt_", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
@input_errors
def sweep(domain_file, samples_file, n_range, tol, mismatch_tol, cluster, nodes, band, out, fmt_):
    """Run detect over a range of N; plot-ready diagnostics."""
    cfg = RunConfig(nodes=nodes, tol_rel=tol, mismatch_tol=mismatch_tol, cluster=cluster, band=band)
    d, f = _load(domain_file, samples_file, nodes, band)
    rows = []
    for N in _parse_range(n_range):
        rep = detect(d, f, N, cfg.detect_config())
        sv = rep.candidate.singular_values
        rows.append({"N": N, "verdict": rep.verdict,
                     "min_singular_value": float(sv.min()) if sv.size else math.nan,
                     "holo_residual": rep.holo_residual,
                     "tail_residual_max": float(np.max(np.abs(rep.tail)))})
    if fmt_ == "json":
        text = dumps_json({"sweep": rows})
    else:
        header = ["N", "verdict", "min_singular_value", "holo_residual", "tail_residual_max"]
        text = csv_text(header, [[r[h] for h in header] for r in rows])
    _emit(text, out)


if __name__ == "__main__":
    main()
