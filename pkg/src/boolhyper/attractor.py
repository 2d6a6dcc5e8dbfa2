"""Attractor detection by first-repeat hashing, and an exhaustive STG oracle.

Both work in macro steps. For a bipartite network the macro state is the
V-part: the E-part after an E-phase is a function of it, so equal V-parts
mean equal post-E-phase states and identical futures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from boolhyper.engine import _as_bits, _layers
from boolhyper.errors import DomainError
from boolhyper.netgen import BipartiteNetwork, BooleanNetwork, Network


@dataclass(frozen=True)
class AttractorResult:
    transient: Optional[int]
    period: Optional[int]
    resolved: bool
    cap: int

    def as_dict(self) -> dict:
        return {"transient": self.transient, "period": self.period, "resolved": self.resolved, "cap": self.cap}


def macro_stepper(net: Network):
    """Return a function mapping a macro state to the next one."""
    if isinstance(net, BooleanNetwork):
        return _layers(net)[0]
    v_layer, e_layer = _layers(net)
    n = net.n
    buf = np.zeros(net.n + net.m, dtype=np.uint8)

    def step(v):
        buf[:n] = v
        buf[n:] = e_layer(buf)
        return v_layer(buf)

    return step


def find_attractor(net: Network, initial_v: Sequence[int] | np.ndarray, cap: int) -> AttractorResult:
    """Transient and period of the orbit from ``initial_v``, searching ``cap`` macro steps."""
    if cap < 1:
        raise DomainError(f"cap must be >= 1, got {cap}")
    step = macro_stepper(net)
    cur = _as_bits(initial_v, net.n, "initial_v")
    seen = {cur.tobytes(): 0}
    for t in range(1, cap + 1):
        cur = step(cur)
        key = cur.tobytes()
        first = seen.get(key)
        if first is not None:
            return AttractorResult(first, t - first, True, cap)
        seen[key] = t
    return AttractorResult(None, None, False, cap)


@dataclass(frozen=True)
class Attractor:
    period: int
    basin_size: int
    states: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class StateTransitionGraph:
    """Full successor map over macro states encoded as integers (vertex i = bit i)."""

    bits: int
    successor: np.ndarray
    on_cycle: np.ndarray
    attractor_of: np.ndarray
    attractors: tuple[Attractor, ...]

    def summary(self) -> list[tuple[int, int]]:
        return sorted((a.period, a.basin_size) for a in self.attractors)

    def landing(self, initial_v) -> tuple[int, int]:
        """``(transient, period)`` of the orbit starting at ``initial_v``."""
        code = encode_state(initial_v)
        transient = 0
        while not self.on_cycle[code]:
            code = int(self.successor[code])
            transient += 1
        return transient, self.attractors[self.attractor_of[code]].period


def encode_state(bits) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def _apply(columns: np.ndarray, rows, tables) -> np.ndarray:
    # columns: (num_states, num_sources) -> (num_states, len(rows))
    out = np.empty((columns.shape[0], len(rows)), dtype=np.uint8)
    for i, (row, table) in enumerate(zip(rows, tables)):
        index = np.zeros(columns.shape[0], dtype=np.int64)
        for src in row:
            index = (index << 1) | columns[:, src]
        out[:, i] = table.outputs[index]
    return out


def enumerate_stg(net: Network, max_bits: int = 20) -> StateTransitionGraph:
    """Build the macro-step successor of every state and find every cycle.

    Successors are evaluated straight from the truth tables, independently
    of the simulation engine.
    """
    bits = net.state_bits
    if bits > max_bits:
        raise DomainError(f"state space of {bits} bits exceeds max_bits={max_bits}")
    size = 1 << bits
    codes = np.arange(size, dtype=np.int64)
    states = ((codes[:, None] >> np.arange(bits)) & 1).astype(np.int64)

    if isinstance(net, BooleanNetwork):
        nxt = _apply(states, net.inputs, net.tables)
    else:
        e_vals = _apply(states, net.e_inputs, net.e_tables).astype(np.int64)
        full = np.concatenate([states, e_vals], axis=1)
        nxt = _apply(full, net.v_inputs, net.v_tables)
    successor = (nxt.astype(np.int64) << np.arange(bits)).sum(axis=1)

    # Iterative walk over the functional graph. colour 0 = unseen,
    # 1 = on the current path, 2 = finished.
    colour = np.zeros(size, dtype=np.int8)
    attractor_of = np.full(size, -1, dtype=np.int64)
    on_cycle = np.zeros(size, dtype=bool)
    cycles: list[list[int]] = []
    succ = successor.tolist()
    for start in range(size):
        if colour[start]:
            continue
        path = []
        node = start
        while colour[node] == 0:
            colour[node] = 1
            path.append(node)
            node = succ[node]
        if colour[node] == 1:
            cycle = path[path.index(node):]
            ident = len(cycles)
            cycles.append(cycle)
            on_cycle[cycle] = True
        else:
            ident = int(attractor_of[node])
        attractor_of[path] = ident
        colour[path] = 2

    basins = np.bincount(attractor_of, minlength=len(cycles))
    attractors = tuple(
        Attractor(period=len(c), basin_size=int(basins[i]), states=tuple(c)) for i, c in enumerate(cycles)
    )
    return StateTransitionGraph(bits, successor, on_cycle, attractor_of, attractors)
