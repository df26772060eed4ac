"""Command-line front end.

Verbs: simulate, growth-sweep, kernel-sweep, blowup, plot.  Every verb takes
--config PATH and --out DIR; sweeps add --jobs N, randomized experiments add
--seed U64 (an override for the config's seed).

Exit codes: 0 all asserted checks passed; 1 the run completed but a bound
check failed; 2 the config or artifacts failed validation (a machine-readable
JSON reason goes to stderr).
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .config import (ConfigError, load_config, load_document,
                     parse_growth_sweep, parse_kernel_sweep)
from .dkg import ConfigurationError
from .experiments import blowup_campaign, growth_sweep, kernel_sweep, run

_U64 = click.IntRange(0, 2 ** 64 - 1)


def _fail(kind: str, reason: str):
    click.echo(json.dumps({"error": kind, "reason": reason}), err=True)
    sys.exit(2)


def _guarded(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ConfigError, ConfigurationError) as e:
            _fail("validation", str(e))
    return wrapper


def _finish(result):
    for r in result.reports:
        claim = getattr(r, "claim", "blow-up-virial")
        status = "PASS" if r.passed else "FAIL"
        if not getattr(r, "asserted", True):
            status = "RECORDED"
        click.echo(f"{status:8s} {claim}  worst={getattr(r, 'worst_ratio', '-')}")
    click.echo(f"artifacts in {result.out_dir}")
    sys.exit(result.code)


@click.group()
def main():
    """Lattice Schrödinger / Klein-Gordon simulation and bound verification."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run config JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Artifact directory.")
@click.option("--seed", type=_U64, default=None, help="Override the initial-data seed.")
@_guarded
def simulate(config_path, out_dir, seed):
    """Run one configured evolution and verify its in-run bounds."""
    cfg = load_config(config_path)
    if seed is not None and cfg.initial.get("kind") != "random":
        raise ConfigError("--seed override given, but the initial data carries no seed")
    _finish(run(cfg, out_dir, seed=seed))


@main.command("growth-sweep")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Sweep config JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Artifact directory.")
@click.option("--seed", type=_U64, default=None, help="Override the sweep seed.")
@click.option("--jobs", type=click.IntRange(1, 256), default=1, help="Worker processes.")
@_guarded
def growth_sweep_cmd(config_path, out_dir, seed, jobs):
    """Measure linear-flow lp growth against its exponential envelopes."""
    doc = load_document(config_path)
    if seed is not None:
        doc = {**doc, "seed": seed}
    _finish(growth_sweep(parse_growth_sweep(doc), out_dir, jobs=jobs))


@main.command("kernel-sweep")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Sweep config JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Artifact directory.")
@click.option("--jobs", type=click.IntRange(1, 256), default=1, help="Worker processes.")
@_guarded
def kernel_sweep_cmd(config_path, out_dir, jobs):
    """Sweep l1 kernel norms of (1-Delta_h)^(-alpha) across h."""
    _finish(kernel_sweep(parse_kernel_sweep(load_document(config_path)), out_dir, jobs=jobs))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run config JSON (model dkg, lambda -1).")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Artifact directory.")
@_guarded
def blowup(config_path, out_dir):
    """Focusing blow-up campaign with virial monitor and defocusing control."""
    _finish(blowup_campaign(load_config(config_path), out_dir))


@main.command("plot")
@click.option("--config", "run_dir", required=True, type=click.Path(),
              help="Artifact directory (or its run_metadata.json).")
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Figure directory (default: <artifacts>/plots).")
def plot(run_dir, out_dir):
    """Render the figures for an existing artifact directory."""
    from .plots import ArtifactError, emit_plots  # matplotlib import is heavy

    try:
        paths = emit_plots(run_dir, out_dir)
    except ArtifactError as e:
        _fail("artifact", str(e))
        return
    for p in paths:
        click.echo(f"wrote {p}")
    sys.exit(0)


if __name__ == "__main__":
    main()
