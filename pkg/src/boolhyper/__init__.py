"""Random Boolean networks, their bipartite forms, and Boolean hypernetworks."""

from boolhyper.boolfn import TruthTable, evaluate, identity_table, sample_table, table_count
from boolhyper.netgen import (
    BipartiteNetwork,
    BooleanNetwork,
    extend_to_hypernetwork,
    generate_bn,
    to_bipartite,
    validate,
)
from boolhyper.engine import PerturbationSchedule, Trajectory, half_step, project_v, simulate, step_bn
from boolhyper.attractor import AttractorResult, enumerate_stg, find_attractor
from boolhyper.metrics import complexity, fragility, node_entropy, overlap

__version__ = "0.1.0"

__all__ = [
    "AttractorResult",
    "BipartiteNetwork",
    "BooleanNetwork",
    "PerturbationSchedule",
    "Trajectory",
    "TruthTable",
    "complexity",
    "enumerate_stg",
    "evaluate",
    "extend_to_hypernetwork",
    "find_attractor",
    "fragility",
    "generate_bn",
    "half_step",
    "identity_table",
    "node_entropy",
    "overlap",
    "project_v",
    "sample_table",
    "simulate",
    "step_bn",
    "table_count",
    "to_bipartite",
    "validate",
]
