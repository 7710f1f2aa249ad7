"""Command-line interface.

Exit codes follow one contract everywhere: 0 on success, 2 on any input
parse/validation problem, 3 on mathematical degeneracy (singular
systems, uninformed parameters, excessive Monte Carlo failures).
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import io
from .errors import (AllReplicatesFailed, DegenerateSystem, ExcessiveFailures,
                     InputError, InsufficientReplication, NotObservational,
                     SingularInformation, SingularScatter, Unidentifiable)
from .fisher import cramer_rao, design_score, fisher_intervention, fisher_observational
from .likelihood import loglik
from .mle import fit
from .montecarlo import run_mc
from .sampler import DesignSpec, sample

_DEGENERACY_ERRORS = (DegenerateSystem, Unidentifiable, SingularScatter,
                      NotObservational, SingularInformation,
                      InsufficientReplication, AllReplicatesFailed,
                      ExcessiveFailures)


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except _DEGENERACY_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
    return wrapper


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _emit(doc):
    click.echo(json.dumps(_jsonify(doc), indent=2))


@click.group()
def main():
    """Gaussian DAG models: simulation, estimation and design scoring."""


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("design", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, required=True, help="Master RNG seed.")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Destination CSV path.")
@click.option("--no-timestamp", is_flag=True,
              help="Omit the written-at comment for byte-stable output.")
@_exit_codes
def simulate(model, design, seed, out, no_timestamp):
    """Draw a dataset from MODEL under DESIGN and write it to --out."""
    params = io.load_model(model)
    spec = io.load_design(design)
    data = sample(params, spec, seed)
    io.write_dataset(out, data, seed=seed, timestamp=not no_timestamp)
    click.echo(f"N={data.n}")
    for j, n_j in enumerate(data.node_counts(), start=1):
        click.echo(f"N_{j}={n_j}")


@main.command(name="fit")
@click.argument("graph_or_model", type=click.Path(exists=True, dir_okay=False))
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--least-squares", is_flag=True,
              help="On a degenerate system, report the minimum-norm "
                   "solution with the affected edges flagged.")
@click.option("--bias-correct", is_flag=True,
              help="Also report noise scales rescaled by n/(n-1); this "
                   "is not the maximum-likelihood value.")
@_exit_codes
def fit_cmd(graph_or_model, data, least_squares, bias_correct):
    """Closed-form maximum-likelihood fit of DATA on a known graph."""
    dag = io.load_graph(graph_or_model)
    dataset = io.load_dataset(data)
    if dataset.p != dag.p:
        raise InputError(f"dataset has {dataset.p} value columns, graph "
                         f"has p={dag.p}", path=data, field="header")
    result = fit(dag, dataset, least_squares=least_squares,
                 bias_correct=bias_correct)
    unidentified = sorted(k for k, ok in result.identifiability.items() if not ok)
    doc = {
        "m_hat": result.m_hat,
        "sigma_hat": result.sigma_hat,
        "w_hat": {f"{i},{j}": v for (i, j), v in sorted(
            result.w_hat.items(), key=lambda kv: (kv[0][1], kv[0][0]))},
        "loglik": result.loglik_at_max,
        "identifiability": result.identifiability,
    }
    if bias_correct:
        doc["sigma_hat_corrected"] = result.sigma_hat_corrected
    if unidentified and not least_squares:
        click.echo(f"error: parameters not identified by the data: "
                   f"{', '.join(unidentified)}", err=True)
        sys.exit(3)
    _emit(doc)


@main.command(name="fisher")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("design_or_n")
@click.option("--crbound", is_flag=True,
              help="Also emit the inverse matrix and sd vector.")
@click.option("--score", type=click.Choice(["d-opt", "a-opt"]),
              help="Print a single design-score line instead.")
@_exit_codes
def fisher_cmd(model, design_or_n, crbound, score):
    """Information matrix of MODEL for a design file or observational N."""
    params = io.load_model(model)
    try:
        n = int(design_or_n)
    except ValueError:
        n = None
    if n is not None:
        if n < 2:
            raise InputError(f"observational sample size must be >= 2, got {n}")
        if score is not None:
            spec = DesignSpec.observational(n)
            click.echo(f"{score} {design_score(params, spec, score):.10g}")
            return
        fm = fisher_observational(params, n)
    else:
        spec = io.load_design(design_or_n)
        if score is not None:
            click.echo(f"{score} {design_score(params, spec, score):.10g}")
            return
        fm = fisher_intervention(params, spec)
    doc = {"params_order": list(fm.params_order), "info": fm.info}
    if crbound:
        bound = cramer_rao(fm)
        doc["crbound_cov"] = bound.cov
        doc["crbound_sd"] = bound.sd
    _emit(doc)


@main.command(name="mc")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("design", type=click.Path(exists=True, dir_okay=False))
@click.option("--reps", type=int, required=True,
              help="Number of replicates (at least 2).")
@click.option("--seed", type=int, required=True, help="Master RNG seed.")
@_exit_codes
def mc_cmd(model, design, reps, seed):
    """Replicated simulate-and-fit study with Cramér-Rao comparison."""
    if reps < 2:
        raise InputError(f"reps must be >= 2, got {reps}")
    params = io.load_model(model)
    spec = io.load_design(design)
    report = run_mc(params, spec, reps=reps, seed=seed)
    try:
        crbound_sd = cramer_rao(fisher_intervention(params, spec)).sd
    except (SingularInformation, InsufficientReplication):
        crbound_sd = None
    _emit({
        "reps": report.reps,
        "failures": report.failures,
        "seed": report.seed,
        "params_order": list(report.params_order),
        "estimator_mean": report.estimator_mean,
        "estimator_sd": report.estimator_sd,
        "estimator_cov": report.estimator_cov,
        "crbound_sd": crbound_sd,
    })


@main.command(name="loglik")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@_exit_codes
def loglik_cmd(model, data):
    """Exact log-likelihood of DATA under MODEL."""
    params = io.load_model(model)
    dataset = io.load_dataset(data)
    if dataset.p != params.dag.p:
        raise InputError(f"dataset has {dataset.p} value columns, model "
                         f"has p={params.dag.p}", path=data, field="header")
    click.echo(f"{loglik(params, dataset):.10g}")


if __name__ == "__main__":
    main()
