"""Seeded ensemble experiments comparing BBNs with the hypernetworks extending them.

Every replicate draws its randomness from a ``SeedSequence`` keyed by
``(master_seed, experiment, k, l, replicate)``, so results do not depend on
worker count or on how many other replicates run. Within a replicate the
BBN and the BH share the originating BN, the initial V state and (for
fragility) the perturbation stream.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from boolhyper.attractor import find_attractor
from boolhyper.engine import PerturbationSchedule, Trajectory, project_v, simulate
from boolhyper.errors import DomainError
from boolhyper.metrics import complexity, fragility, overlap
from boolhyper.netgen import BipartiteNetwork, BooleanNetwork, extend_to_hypernetwork, generate_bn, to_bipartite
from boolhyper.stats import describe, mann_whitney_u

log = logging.getLogger(__name__)

EXPERIMENTS = ("equivalence", "overlap", "attractor", "complexity", "fragility")
_TAG_CODES = {name: i for i, name in enumerate(EXPERIMENTS)}

TOOL_NAME = "boolhyper"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 50
    k_values: tuple[int, ...] = (2,)
    l_values: tuple[int, ...] = (1,)
    replicates: int = 200
    half_steps: int = 400
    attractor_cap: int = 5000
    perturb_x: int = 20
    perturb_events: int = 400
    perturb_every: int = 1
    vertex_set: str = "all"
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "l_values", tuple(int(v) for v in self.l_values))
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")
        if not self.k_values or not self.l_values:
            raise DomainError("k_values and l_values must be nonempty")
        if min(self.k_values) < 1 or min(self.l_values) < 1:
            raise DomainError("all k and l must be >= 1")
        if max(self.k_values) > self.n or max(self.l_values) > self.n:
            raise DomainError(f"k and l must not exceed n={self.n}")
        if self.half_steps < 1 or self.attractor_cap < 1:
            raise DomainError("half_steps and attractor_cap must be >= 1")
        if self.vertex_set not in ("all", "V"):
            raise DomainError("vertex_set must be 'all' or 'V'")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")

    @classmethod
    def defaults(cls, experiment: str, **overrides) -> "ExperimentConfig":
        """Ensemble sizes and horizons used for each published experiment."""
        grid = {"k_values": (1, 2, 3, 4), "l_values": (1, 2, 3, 4)}
        base = {
            "equivalence": {"n": 50, "k_values": (2,), "l_values": (1,), "half_steps": 200},
            "overlap": {"n": 50, "half_steps": 400, **grid},
            "attractor": {"n": 50, "k_values": (2,), "l_values": (2, 3), "attractor_cap": 5000},
            "complexity": {"n": 100, "half_steps": 800, **grid},
            "fragility": {"n": 50, "half_steps": 800, "perturb_x": 20, "perturb_events": 400, **grid},
        }[experiment]
        return cls(experiment=experiment, **{**base, **overrides})

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["k_values"] = list(self.k_values)
        d["l_values"] = list(self.l_values)
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        """Config from a mapping; omitted fields take that experiment's defaults."""
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in doc:
            raise DomainError("config needs an 'experiment' key")
        if doc["experiment"] not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {doc['experiment']!r}; choose from {EXPERIMENTS}")
        rest = {key: value for key, value in doc.items() if key != "experiment"}
        return cls.defaults(doc["experiment"], **rest)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid config JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise DomainError("config must be a JSON object")
        try:
            return cls.from_dict(doc)
        except TypeError as exc:
            raise DomainError(f"bad config value: {exc}") from exc


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    columns: list[str]
    rows: list[dict[str, Any]]
    cells: list[dict[str, Any]]
    totals: dict[str, Any] = field(default_factory=dict)

    def cell(self, k: int, l: int) -> dict[str, Any]:
        for c in self.cells:
            if c["k"] == k and c["l"] == l:
                return c
        raise KeyError((k, l))

    def provenance(self) -> dict:
        from boolhyper import __version__

        return {"tool": TOOL_NAME, "version": __version__, "config": self.config.to_dict()}

    def summary_json(self) -> str:
        doc = {**self.provenance(), "cells": self.cells, "totals": self.totals}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def rows_csv(self) -> str:
        buf = io.StringIO()
        prov = self.provenance()
        buf.write(f"# {prov['tool']} {prov['version']}\n")
        buf.write(f"# config: {json.dumps(prov['config'], sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_csv_value(row[c]) for c in self.columns])
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(self.summary_json())
        (out / "rows.csv").write_text(self.rows_csv())


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


def replicate_seed(master_seed: int, experiment: str, k: int, l: int, r: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(_TAG_CODES[experiment], k, l, r))


@dataclass
class _Replicate:
    """Paired networks and shared randomness for one replicate."""

    bn: BooleanNetwork
    bbn: BipartiteNetwork
    bh: BipartiteNetwork
    initial_v: np.ndarray
    perturb_seed: int


def _prepare(cfg: ExperimentConfig, k: int, l: int, r: int) -> _Replicate:
    net_ss, init_ss, pert_ss = replicate_seed(cfg.master_seed, cfg.experiment, k, l, r).spawn(3)
    net_rng = np.random.default_rng(net_ss)
    bn = generate_bn(cfg.n, k, net_rng)
    bbn = to_bipartite(bn)
    bh = extend_to_hypernetwork(bbn, l, net_rng)
    initial_v = np.random.default_rng(init_ss).integers(0, 2, size=cfg.n, dtype=np.uint8)
    perturb_seed = int(pert_ss.generate_state(1, dtype=np.uint64)[0])
    return _Replicate(bn, bbn, bh, initial_v, perturb_seed)


def trajectories_match(bn: BooleanNetwork, bbn: BipartiteNetwork, initial_v, bn_steps: int) -> bool:
    """True when the BBN's V projection reproduces the BN trajectory exactly."""
    bn_traj = simulate(bn, initial_v, bn_steps)
    bbn_traj = simulate(bbn, initial_v, 2 * bn_steps)
    return project_v(bbn_traj, bbn) == bn_traj


def _row_equivalence(cfg, k, l, r, rep):
    return {"match": trajectories_match(rep.bn, rep.bbn, rep.initial_v, cfg.half_steps // 2)}


def _row_overlap(cfg, k, l, r, rep):
    a = simulate(rep.bbn, rep.initial_v, cfg.half_steps)
    b = simulate(rep.bh, rep.initial_v, cfg.half_steps)
    return {"overlap": overlap(a, b)}


def _row_attractor(cfg, k, l, r, rep):
    row = {}
    for name, net in (("bbn", rep.bbn), ("bh", rep.bh)):
        res = find_attractor(net, rep.initial_v, cfg.attractor_cap)
        row[f"transient_{name}"] = res.transient
        row[f"period_{name}"] = res.period
        row[f"resolved_{name}"] = res.resolved
    return row


def _row_complexity(cfg, k, l, r, rep):
    c_bbn = complexity(simulate(rep.bbn, rep.initial_v, cfg.half_steps), cfg.vertex_set).complexity
    c_bh = complexity(simulate(rep.bh, rep.initial_v, cfg.half_steps), cfg.vertex_set).complexity
    return {"complexity_bbn": c_bbn, "complexity_bh": c_bh, "difference": c_bh - c_bbn}


def _row_fragility(cfg, k, l, r, rep):
    schedule = PerturbationSchedule(cfg.perturb_x, cfg.perturb_every, cfg.perturb_events, rep.perturb_seed)
    f_bbn = fragility(rep.bbn, rep.initial_v, schedule, cfg.half_steps, cfg.vertex_set)
    f_bh = fragility(rep.bh, rep.initial_v, schedule, cfg.half_steps, cfg.vertex_set)
    return {
        "complexity_bbn": f_bbn.c_unperturbed,
        "complexity_bh": f_bh.c_unperturbed,
        "delta_c_bbn": f_bbn.delta_c,
        "delta_c_bh": f_bh.delta_c,
        "fragility_bbn": f_bbn.fragility,
        "fragility_bh": f_bh.fragility,
        "difference": f_bh.fragility - f_bbn.fragility,
    }


_ROW_FUNCS: dict[str, Callable] = {
    "equivalence": _row_equivalence,
    "overlap": _row_overlap,
    "attractor": _row_attractor,
    "complexity": _row_complexity,
    "fragility": _row_fragility,
}

_COLUMNS = {
    "equivalence": ["match"],
    "overlap": ["overlap"],
    "attractor": ["transient_bbn", "period_bbn", "resolved_bbn", "transient_bh", "period_bh", "resolved_bh"],
    "complexity": ["complexity_bbn", "complexity_bh", "difference"],
    "fragility": [
        "complexity_bbn",
        "complexity_bh",
        "delta_c_bbn",
        "delta_c_bh",
        "fragility_bbn",
        "fragility_bh",
        "difference",
    ],
}


def run_replicate(cfg: ExperimentConfig, k: int, l: int, r: int) -> dict[str, Any]:
    rep = _prepare(cfg, k, l, r)
    return {"replicate": r, "k": k, "l": l, **_ROW_FUNCS[cfg.experiment](cfg, k, l, r, rep)}


def _run_item(args) -> dict[str, Any]:
    return run_replicate(*args)


def _aggregate(cfg: ExperimentConfig, k: int, l: int, rows: list[dict]) -> dict[str, Any]:
    cell: dict[str, Any] = {"k": k, "l": l, "replicates": len(rows)}
    exp = cfg.experiment
    if exp == "equivalence":
        cell["mismatches"] = sum(not row["match"] for row in rows)
    elif exp == "overlap":
        cell["overlap"] = describe([row["overlap"] for row in rows])
    elif exp == "attractor":
        paired = [row for row in rows if row["resolved_bbn"] and row["resolved_bh"]]
        cell["censored_bbn"] = sum(not row["resolved_bbn"] for row in rows)
        cell["censored_bh"] = sum(not row["resolved_bh"] for row in rows)
        cell["pairs_dropped"] = len(rows) - len(paired)
        bbn = [row["period_bbn"] for row in paired]
        bh = [row["period_bh"] for row in paired]
        diffs = [b - a for a, b in zip(bbn, bh)]
        cell["period_bbn"] = describe(bbn)
        cell["period_bh"] = describe(bh)
        cell["difference"] = describe(diffs)
        cell["difference"]["positive"] = sum(d > 0 for d in diffs)
        cell["difference"]["negative"] = sum(d < 0 for d in diffs)
        if paired:
            u, p = mann_whitney_u(bbn, bh)
            cell["mann_whitney"] = {"u": u, "p": p}
        else:
            cell["mann_whitney"] = None
    else:
        for col in ("complexity_bbn", "complexity_bh", "difference") + (
            ("fragility_bbn", "fragility_bh") if exp == "fragility" else ()
        ):
            cell[col] = describe([row[col] for row in rows])
    return cell


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Run every (k, l) cell of ``cfg``; ``threads > 1`` uses a process pool."""
    cells = [(k, l) for k in cfg.k_values for l in cfg.l_values]
    items = [(cfg, k, l, r) for k, l in cells for r in range(cfg.replicates)]
    log.info("running %s: %d cells x %d replicates", cfg.experiment, len(cells), cfg.replicates)
    if threads > 1 and len(items) > 1:
        chunk = max(1, len(items) // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_item, items, chunksize=chunk))
    else:
        rows = [_run_item(item) for item in items]
    reps = cfg.replicates
    aggregates = [_aggregate(cfg, k, l, rows[i * reps : (i + 1) * reps]) for i, (k, l) in enumerate(cells)]
    totals = {}
    if cfg.experiment == "equivalence":
        totals["mismatches"] = sum(c["mismatches"] for c in aggregates)
    columns = ["replicate", "k", "l", *_COLUMNS[cfg.experiment]]
    return ExperimentReport(cfg, columns, rows, aggregates, totals)


def _runner(experiment: str):
    def run(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
        if cfg.experiment != experiment:
            raise DomainError(f"config is for {cfg.experiment!r}, not {experiment!r}")
        return run_experiment(cfg, threads)

    run.__name__ = f"run_{experiment}"
    run.__doc__ = f"Run a {experiment} experiment (see :func:`run_experiment`)."
    return run


run_equivalence = _runner("equivalence")
run_overlap = _runner("overlap")
run_attractor = _runner("attractor")
run_complexity = _runner("complexity")
run_fragility = _runner("fragility")
