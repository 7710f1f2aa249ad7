"""File formats: model documents, design documents and dataset CSV.

Model and design files are JSON; all node indices at this boundary are
1-based.  Datasets are comma-separated text with header
``x1,...,xp,do`` where the ``do`` cell is empty for observational rows
or holds ``INDEX=VALUE`` pairs joined by ``;`` (no spaces).  Lines
starting with ``#`` are metadata comments and are ignored on read.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

import numpy as np

from .errors import GbnError, InputError
from .graph import DagStructure, build_dag
from .model import GbnParams, InterventionTarget
from .sampler import NORMAL_METHOD, RNG_ALGORITHM, Dataset, DesignSpec

CLAMP_ATOL = 1e-12


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(str(exc), path=path) from exc
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, path=path, line=exc.lineno) from exc


def _require(doc, key, path):
    if key not in doc:
        raise InputError("missing required key", path=path, field=key)
    return doc[key]


def load_graph(path) -> DagStructure:
    """Read the graph portion (p, edges) of a model or graph file."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise InputError("expected a JSON object", path=path)
    p = _require(doc, "p", path)
    edges = _require(doc, "edges", path)
    try:
        return build_dag(p, [tuple(e) for e in edges])
    except (GbnError, TypeError, ValueError) as exc:
        raise InputError(str(exc), path=path, field="edges") from exc


def load_model(path) -> GbnParams:
    """Read a full model file: graph plus (m, sigma, w)."""
    doc = _load_json(path)
    dag = load_graph(path)
    m = _require(doc, "m", path)
    sigma = _require(doc, "sigma", path)
    w_doc = _require(doc, "w", path)
    if not isinstance(w_doc, dict):
        raise InputError("expected a map from 'i,j' to weight",
                         path=path, field="w")
    w = {}
    for key, value in w_doc.items():
        try:
            i, j = (int(t) for t in key.split(","))
        except ValueError as exc:
            raise InputError(f"bad edge key {key!r}; expected 'i,j'",
                             path=path, field="w") from exc
        w[(i, j)] = float(value)
    try:
        return GbnParams(dag=dag, m=m, sigma=sigma, w=w)
    except (GbnError, ValueError) as exc:
        raise InputError(str(exc), path=path, field="m/sigma/w") from exc


def is_model_file(path) -> bool:
    doc = _load_json(path)
    return isinstance(doc, dict) and {"m", "sigma", "w"} <= set(doc)


def save_model(path, params: GbnParams) -> None:
    doc = {
        "p": params.dag.p,
        "edges": [list(e) for e in params.dag.edges],
        "m": list(params.m),
        "sigma": list(params.sigma),
        "w": {f"{i},{j}": v for (i, j), v in sorted(params.w.items(),
                                                    key=lambda kv: (kv[0][1],
                                                                    kv[0][0]))},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_design(path) -> DesignSpec:
    """Read a design file: a JSON list of {targets, reps} conditions."""
    doc = _load_json(path)
    if not isinstance(doc, list):
        raise InputError("expected a JSON list of conditions", path=path)
    if not doc:
        raise InputError("design has no conditions", path=path)
    conditions = []
    for c, cond in enumerate(doc, start=1):
        if not isinstance(cond, dict) or "reps" not in cond:
            raise InputError(f"condition {c} must be an object with "
                             "'targets' and 'reps'", path=path)
        targets_doc = cond.get("targets", {})
        try:
            target = InterventionTarget(
                {int(k): float(v) for k, v in targets_doc.items()})
        except (GbnError, ValueError) as exc:
            raise InputError(f"condition {c}: {exc}", path=path,
                             field="targets") from exc
        reps = cond["reps"]
        if not isinstance(reps, int) or reps < 1:
            raise InputError(f"condition {c}: reps must be a positive "
                             f"integer, got {reps!r}", path=path, field="reps")
        conditions.append((target, reps))
    return DesignSpec(tuple(conditions))


def save_design(path, design: DesignSpec) -> None:
    doc = [{"targets": {str(n): v for n, v in target.targets.items()},
            "reps": reps} for target, reps in design.conditions]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _parse_do_cell(cell, p, path, lineno):
    if cell == "":
        return InterventionTarget()
    pairs = {}
    for token in cell.split(";"):
        if "=" not in token:
            raise InputError(f"bad do token {token!r}; expected INDEX=VALUE",
                             path=path, line=lineno, field="do")
        idx_s, val_s = token.split("=", 1)
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError as exc:
            raise InputError(f"bad do token {token!r}", path=path,
                             line=lineno, field="do") from exc
        if not (1 <= idx <= p):
            raise InputError(f"do index {idx} out of range for p={p}",
                             path=path, line=lineno, field="do")
        if idx in pairs:
            raise InputError(f"node {idx} clamped twice in one do cell",
                             path=path, line=lineno, field="do")
        pairs[idx] = val
    return InterventionTarget(pairs)


def load_dataset(path) -> Dataset:
    """Read a dataset CSV, validating clamp declarations against values."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(str(exc), path=path) from exc

    header = None
    header_line = 0
    rows, targets = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            header_line = lineno
            p = len(header) - 1
            expected = [f"x{j}" for j in range(1, p + 1)] + ["do"]
            if p < 1 or header != expected:
                raise InputError(
                    f"bad header {line!r}; expected 'x1,...,xp,do'",
                    path=path, line=lineno, field="header")
            continue
        cells = line.split(",")
        if len(cells) != p + 1:
            raise InputError(f"expected {p + 1} cells, found {len(cells)}",
                             path=path, line=lineno)
        try:
            values = [float(c) for c in cells[:p]]
        except ValueError as exc:
            raise InputError(f"bad numeric cell: {exc}", path=path,
                             line=lineno) from exc
        target = _parse_do_cell(cells[p], p, path, lineno)
        for node, clamp in target.targets.items():
            if abs(values[node - 1] - clamp) > CLAMP_ATOL:
                raise InputError(
                    f"x{node}={values[node - 1]!r} disagrees with declared "
                    f"clamp {clamp!r}", path=path, line=lineno, field="do")
            values[node - 1] = clamp
        rows.append(values)
        targets.append(target)

    if header is None:
        raise InputError("file has no header line", path=path,
                         line=header_line or 1, field="header")
    if not rows:
        raise InputError("file has no data rows", path=path)
    return Dataset(x=np.array(rows), targets=tuple(targets))


def format_dataset(dataset: Dataset, seed=None, timestamp: bool = True) -> str:
    """Render a dataset in the CSV format, with metadata comments."""
    out = ["# gbn dataset"]
    meta = f"# rng={RNG_ALGORITHM} normals={NORMAL_METHOD}"
    if seed is not None:
        meta += f" seed={seed}"
    out.append(meta)
    if timestamp:
        out.append(f"# written={datetime.now(timezone.utc).isoformat()}")
    out.append(",".join([f"x{j}" for j in range(1, dataset.p + 1)] + ["do"]))
    for k in range(dataset.n):
        cells = [repr(float(v)) for v in dataset.x[k]]
        do = ";".join(f"{n}={v!r}" for n, v in dataset.targets[k].targets.items())
        out.append(",".join(cells + [do]))
    return "\n".join(out) + "\n"


def write_dataset(path, dataset: Dataset, seed=None,
                  timestamp: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_dataset(dataset, seed=seed, timestamp=timestamp))
