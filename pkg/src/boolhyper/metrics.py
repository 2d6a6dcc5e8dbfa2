"""Trajectory overlap, per-vertex entropy, complexity and fragility."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from boolhyper.engine import PerturbationSchedule, Trajectory, simulate
from boolhyper.errors import DomainError
from boolhyper.netgen import Network

VertexSet = Literal["all", "V"]


@dataclass(frozen=True)
class ComplexityReport:
    per_vertex_entropy: np.ndarray
    mean_entropy: float
    complexity: float


@dataclass(frozen=True)
class FragilityResult:
    c_unperturbed: float
    c_perturbed: float
    delta_c: float
    fragility: float


def overlap(a: Trajectory, b: Trajectory) -> float:
    """Fraction of (instant, vertex) cells on which two trajectories agree.

    1.0 means identical trajectories, about 0.5 independent ones.
    """
    if a.states.shape != b.states.shape or a.resolution != b.resolution:
        raise DomainError(
            f"trajectory shapes differ: {a.states.shape}/{a.resolution} vs {b.states.shape}/{b.resolution}"
        )
    if len(a) == 0 or a.num_vertices == 0:
        raise DomainError("overlap needs at least one recorded state")
    return 1.0 - np.count_nonzero(a.states != b.states) / a.states.size


def binary_entropy(p1: float | np.ndarray) -> float | np.ndarray:
    """Shannon entropy in bits of a 0/1 variable that is 1 with probability ``p1``."""
    p1 = np.asarray(p1, dtype=float)
    p0 = 1.0 - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p0 > 0, p0 * np.log2(p0), 0.0) + np.where(p1 > 0, p1 * np.log2(p1), 0.0))
    return h if h.ndim else float(h)


def _entropies(traj: Trajectory) -> np.ndarray:
    rows = traj.sample_rows()
    if len(rows) == 0:
        raise DomainError("trajectory is empty")
    return binary_entropy(rows.mean(axis=0))


def node_entropy(traj: Trajectory, vertex: int) -> float:
    """Entropy of one vertex's occupancy over the post-update instants of ``traj``."""
    if not 0 <= vertex < traj.num_vertices:
        raise DomainError(f"unknown vertex {vertex}")
    rows = traj.sample_rows()
    if len(rows) == 0:
        raise DomainError("trajectory is empty")
    return float(binary_entropy(rows[:, vertex].mean()))


def complexity(traj: Trajectory, vertex_set: VertexSet = "all") -> ComplexityReport:
    """Mean vertex entropy ``E`` and complexity ``4 E (1 - E)``."""
    if vertex_set == "all":
        columns = slice(None)
    elif vertex_set == "V":
        columns = slice(0, traj.n)
    else:
        raise DomainError(f"vertex_set must be 'all' or 'V', got {vertex_set!r}")
    per_vertex = _entropies(traj)[columns]
    if per_vertex.size == 0:
        raise DomainError("empty vertex set")
    mean = float(per_vertex.mean())
    return ComplexityReport(per_vertex, mean, 4.0 * mean * (1.0 - mean))


def fragility(
    net: Network,
    initial_v: Sequence[int] | np.ndarray,
    schedule: PerturbationSchedule,
    steps: int,
    vertex_set: VertexSet = "all",
) -> FragilityResult:
    """Complexity response to the perturbations in ``schedule``.

    Fragility is ``-(C_perturbed - C_unperturbed) * x / N``; negative values
    mean the perturbations raised complexity (antifragile).
    """
    c0 = complexity(simulate(net, initial_v, steps), vertex_set).complexity
    c1 = complexity(simulate(net, initial_v, steps, schedule), vertex_set).complexity
    scale = schedule.x / net.num_vertices
    return FragilityResult(c0, c1, c1 - c0, (c0 - c1) * scale)
