"""Synchronous BN updates and alternating E/V updates for bipartite networks.

A bipartite run of ``steps`` half-steps records one state per half-step:
index 0 is the E-phase computed from the initial V assignment, index 1 the
following V-phase, and so on. One E-phase plus one V-phase is a macro step
and corresponds to one BN step.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from boolhyper.errors import DomainError
from boolhyper.netgen import BipartiteNetwork, BooleanNetwork, Network

Phase = Literal["E", "V"]


class _Layer:
    """Vectorised evaluation of one group of vertices sharing an in-degree."""

    __slots__ = ("start", "stop", "inputs", "flat", "offsets", "weights")

    def __init__(self, start, rows, tables):
        degree = len(rows[0]) if rows else 0
        if any(len(r) != degree for r in rows) or any(t.arity != degree for t in tables):
            raise DomainError("network has irregular in-degrees; run validate() first")
        self.start = start
        self.stop = start + len(rows)
        self.inputs = np.array(rows, dtype=np.intp).reshape(len(rows), degree)
        self.flat = np.concatenate([t.outputs for t in tables]) if tables else np.zeros(0, np.uint8)
        self.offsets = np.arange(len(rows), dtype=np.intp) << degree
        self.weights = (1 << np.arange(degree - 1, -1, -1)).astype(np.intp)

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self.flat[self.offsets + s[self.inputs] @ self.weights]


def _layers(net: Network) -> tuple[_Layer, ...]:
    cached = net.__dict__.get("_layers")
    if cached is None:
        if isinstance(net, BooleanNetwork):
            cached = (_Layer(0, net.inputs, net.tables),)
        else:
            cached = (_Layer(0, net.v_inputs, net.v_tables), _Layer(net.n, net.e_inputs, net.e_tables))
        net.__dict__["_layers"] = cached
    return cached


def _as_bits(bits, length: int, what: str) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size != length:
        raise DomainError(f"{what} has length {arr.size}, expected {length}")
    if np.any(arr > 1):
        raise DomainError(f"{what} must contain only 0/1")
    return arr


@dataclass(frozen=True)
class PerturbationSchedule:
    """Flip ``x`` distinct random vertices at the end of every ``every``-th macro step.

    At most ``total_events`` events fire; the flip positions come from a
    generator seeded with ``seed``, so two runs with equal schedules and
    vertex counts flip the same vertices.
    """

    x: int
    every: int = 1
    total_events: int = 400
    seed: int = 0

    def fires(self, macro_step: int) -> bool:
        return macro_step % self.every == 0 and macro_step // self.every <= self.total_events

    def check(self, num_vertices: int) -> None:
        if not 1 <= self.x <= num_vertices:
            raise DomainError(f"perturbation size x={self.x} outside [1, {num_vertices}]")
        if self.every < 1 or self.total_events < 0:
            raise DomainError("every must be >= 1 and total_events >= 0")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded states, one row per instant.

    ``resolution`` is ``"bn-step"`` (row t = state after t BN steps) or
    ``"half-step"`` (row t = state after half-step t, E-phase at even t).
    ``n`` is the number of V-part vertices; the remaining columns are E.
    """

    states: np.ndarray
    resolution: str
    n: int

    def __post_init__(self):
        if self.resolution not in ("bn-step", "half-step"):
            raise DomainError(f"unknown resolution {self.resolution!r}")
        if self.states.ndim != 2:
            raise DomainError("states must be a 2-D array")

    def __len__(self):
        return self.states.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.n == other.n
            and np.array_equal(self.states, other.states)
        )

    @property
    def num_vertices(self) -> int:
        return self.states.shape[1]

    def phase_of(self, t: int) -> str:
        if self.resolution == "bn-step":
            return "bn"
        return "E" if t % 2 == 0 else "V"

    def sample_rows(self) -> np.ndarray:
        """Rows that follow a V update: BN states after step 1, or odd half-steps.

        A trajectory with no such row falls back to all of its rows.
        """
        rows = self.states[1:] if self.resolution == "bn-step" else self.states[1::2]
        return rows if len(rows) else self.states

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "phase", *range(self.num_vertices)])
        for t, row in enumerate(self.states):
            writer.writerow([t, self.phase_of(t), *row.tolist()])
        return buf.getvalue()

    def to_hex_rows(self) -> list[str]:
        return [state_to_hex(row) for row in self.states]

    @classmethod
    def from_csv(cls, text: str, n: int) -> "Trajectory":
        rows = list(csv.reader(io.StringIO(text)))
        body = rows[1:]
        resolution = "bn-step" if body and body[0][1] == "bn" else "half-step"
        states = np.array([[int(x) for x in r[2:]] for r in body], dtype=np.uint8)
        return cls(states.reshape(len(body), len(rows[0]) - 2), resolution, n)


def state_to_hex(bits: np.ndarray) -> str:
    """Hex of the integer whose bit ``i`` is the state of vertex ``i``."""
    return format(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"), "x")


def state_from_hex(text: str, length: int) -> np.ndarray:
    value = int(text, 16)
    raw = np.frombuffer(value.to_bytes((length + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:length].copy()


def step_bn(net: BooleanNetwork, s) -> np.ndarray:
    s = _as_bits(s, net.n, "state")
    return _layers(net)[0](s)


def half_step(net: BipartiteNetwork, s, phase: Phase) -> np.ndarray:
    s = _as_bits(s, net.n + net.m, "state")
    v_layer, e_layer = _layers(net)
    out = s.copy()
    if phase == "E":
        out[net.n :] = e_layer(s)
    elif phase == "V":
        out[: net.n] = v_layer(s)
    else:
        raise DomainError(f"phase must be 'E' or 'V', got {phase!r}")
    return out


def simulate(
    net: Network,
    initial_v: Sequence[int] | np.ndarray,
    steps: int,
    schedule: Optional[PerturbationSchedule] = None,
) -> Trajectory:
    """Run ``net`` from ``initial_v``.

    For a BN ``steps`` counts BN steps and the result has ``steps + 1`` rows
    (row 0 is the initial state). For a bipartite network ``steps`` counts
    half-steps and the result has ``steps`` rows. Perturbation flips land
    after the update that closes a firing macro step, before it is recorded.
    """
    if steps < 0:
        raise DomainError(f"steps must be >= 0, got {steps}")
    s0 = _as_bits(initial_v, net.n, "initial_v")
    total = net.num_vertices
    flips = None
    if schedule is not None:
        schedule.check(total)
        flips = np.random.default_rng(schedule.seed)

    if isinstance(net, BooleanNetwork):
        (layer,) = _layers(net)
        states = np.empty((steps + 1, total), dtype=np.uint8)
        states[0] = s0
        cur = s0
        for t in range(1, steps + 1):
            cur = layer(cur)
            if flips is not None and schedule.fires(t):
                cur[flips.choice(total, size=schedule.x, replace=False)] ^= 1
            states[t] = cur
        return Trajectory(states, "bn-step", net.n)

    v_layer, e_layer = _layers(net)
    n = net.n
    states = np.empty((steps, total), dtype=np.uint8)
    cur = np.zeros(total, dtype=np.uint8)
    cur[:n] = s0
    for h in range(steps):
        if h % 2 == 0:
            cur[n:] = e_layer(cur)
        else:
            cur[:n] = v_layer(cur)
            if flips is not None and schedule.fires((h + 1) // 2):
                cur[flips.choice(total, size=schedule.x, replace=False)] ^= 1
        states[h] = cur
    return Trajectory(states, "half-step", n)


def project_v(traj: Trajectory, net: BipartiteNetwork) -> Trajectory:
    """V-part at the initial assignment and after every V-phase, as BN steps."""
    if traj.resolution != "half-step":
        raise DomainError("project_v needs a half-step trajectory")
    if len(traj) == 0:
        raise DomainError("cannot project an empty trajectory")
    if traj.num_vertices != net.n + net.m:
        raise DomainError("trajectory does not belong to this network")
    v = traj.states[:, : net.n]
    return Trajectory(np.concatenate([v[:1], v[1::2]]), "bn-step", net.n)
