"""Random Boolean networks, bipartite conversion and hypernetwork extension.

Vertex ids are 0-based. In a bipartite network the V-part holds ids
``0..n-1`` and the E-part ids ``n..n+m-1``; ``v_inputs`` therefore contains
global E ids and ``e_inputs`` contains V ids.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from boolhyper.boolfn import MAX_ARITY, TruthTable, identity_table, sample_tables
from boolhyper.errors import DomainError

Inputs = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class BooleanNetwork:
    n: int
    k: int
    inputs: Inputs
    tables: tuple[TruthTable, ...]

    @property
    def m(self) -> int:
        return self.n * self.k

    @property
    def num_vertices(self) -> int:
        return self.n

    @property
    def state_bits(self) -> int:
        return self.n

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Directed ``(source, target)`` edges, grouped by target in input order."""
        return [(src, dst) for dst, srcs in enumerate(self.inputs) for src in srcs]


@dataclass(frozen=True)
class BipartiteNetwork:
    n: int
    m: int
    k: int
    l: int
    v_inputs: Inputs
    e_inputs: Inputs
    v_tables: tuple[TruthTable, ...]
    e_tables: tuple[TruthTable, ...]
    e_labels: tuple[tuple[int, int], ...]

    @property
    def num_vertices(self) -> int:
        return self.n + self.m

    @property
    def state_bits(self) -> int:
        # Every post-E-phase state is fixed by the V-part.
        return self.n

    def e_target(self, e_id: int) -> int:
        """V vertex fed by E vertex ``e_id`` (global id)."""
        return self.e_labels[e_id - self.n][1]


Network = Union[BooleanNetwork, BipartiteNetwork]


def generate_bn(n: int, k: int, rng: np.random.Generator) -> BooleanNetwork:
    """Kauffman NK network: ``k`` distinct random inputs per vertex, random tables.

    Self-inputs are allowed. Each input list is stored in ascending id order.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 1 <= k <= MAX_ARITY:
        raise DomainError(f"k must be in [1, {MAX_ARITY}], got {k}")
    if k > n:
        raise DomainError(f"cannot pick k={k} distinct inputs from n={n} vertices")
    # The k smallest of n iid uniform keys index a uniform k-subset.
    picks = np.sort(np.argsort(rng.random((n, n)), axis=1)[:, :k], axis=1)
    inputs = tuple(tuple(row) for row in picks.tolist())
    return BooleanNetwork(n=n, k=k, inputs=inputs, tables=tuple(sample_tables(k, n, rng)))


def to_bipartite(bn: BooleanNetwork) -> BipartiteNetwork:
    """Interpose one identity E vertex on every edge of ``bn``.

    The E vertex for the j-th input of V vertex i gets id ``n + i*k + j``.
    """
    n, k = bn.n, bn.k
    v_inputs = []
    e_inputs = []
    e_labels = []
    for i, srcs in enumerate(bn.inputs):
        base = n + len(e_inputs)
        v_inputs.append(tuple(base + j for j in range(len(srcs))))
        for src in srcs:
            e_inputs.append((src,))
            e_labels.append((src, i))
    ident = identity_table()
    return BipartiteNetwork(
        n=n,
        m=len(e_inputs),
        k=k,
        l=1,
        v_inputs=tuple(v_inputs),
        e_inputs=tuple(e_inputs),
        v_tables=tuple(bn.tables),
        e_tables=(ident,) * len(e_inputs),
        e_labels=tuple(e_labels),
    )


def to_boolean_network(bbn: BipartiteNetwork) -> BooleanNetwork:
    """Collapse every identity E vertex of an l=1 network back into an edge."""
    if bbn.l != 1:
        raise DomainError("only l=1 bipartite networks collapse to a BN")
    inputs = tuple(tuple(bbn.e_inputs[e - bbn.n][0] for e in row) for row in bbn.v_inputs)
    return BooleanNetwork(n=bbn.n, k=bbn.k, inputs=inputs, tables=tuple(bbn.v_tables))


def extend_to_hypernetwork(bbn: BipartiteNetwork, l: int, rng: np.random.Generator) -> BipartiteNetwork:
    """Raise every E vertex's in-degree to ``l`` and give it a fresh random table.

    The original V input stays in position 0; the ``l-1`` added inputs are
    distinct V vertices other than it, in ascending order. ``l=1`` returns
    ``bbn`` itself.
    """
    if bbn.l != 1:
        raise DomainError(f"expected an l=1 network, got l={bbn.l}")
    if not 1 <= l <= MAX_ARITY:
        raise DomainError(f"l must be in [1, {MAX_ARITY}], got {l}")
    if l > bbn.n:
        raise DomainError(f"cannot pick l={l} distinct inputs from n={bbn.n} vertices")
    if l == 1:
        return bbn
    orig = np.array([row[0] for row in bbn.e_inputs], dtype=np.intp)
    keys = rng.random((bbn.m, bbn.n))
    keys[np.arange(bbn.m), orig] = 2.0  # never picked again
    added = np.sort(np.argsort(keys, axis=1)[:, : l - 1], axis=1)
    e_inputs = tuple((o, *row) for o, row in zip(orig.tolist(), added.tolist()))
    e_tables = sample_tables(l, bbn.m, rng)
    return BipartiteNetwork(
        n=bbn.n,
        m=bbn.m,
        k=bbn.k,
        l=l,
        v_inputs=bbn.v_inputs,
        e_inputs=e_inputs,
        v_tables=bbn.v_tables,
        e_tables=tuple(e_tables),
        e_labels=bbn.e_labels,
    )


def _check_rows(rows, tables, degree, lo, hi, part, problems):
    for idx, row in enumerate(rows):
        if len(row) != degree:
            problems.append(f"{part} vertex {idx}: in-degree {len(row)} != {degree}")
        if len(set(row)) != len(row):
            problems.append(f"{part} vertex {idx}: duplicate input ids {list(row)}")
        bad = [x for x in row if not lo <= x < hi]
        if bad:
            problems.append(f"{part} vertex {idx}: input ids {bad} outside [{lo}, {hi})")
    for idx, table in enumerate(tables):
        if idx < len(rows) and table.arity != len(rows[idx]):
            problems.append(f"{part} vertex {idx}: table arity {table.arity} != in-degree {len(rows[idx])}")


def validate(net: Network) -> list[str]:
    """Return a description of every violated structural invariant (empty if valid)."""
    problems: list[str] = []
    if net.n < 1:
        problems.append(f"n must be >= 1, got {net.n}")
    if isinstance(net, BooleanNetwork):
        if len(net.inputs) != net.n or len(net.tables) != net.n:
            problems.append(f"expected {net.n} input lists and tables, got {len(net.inputs)} and {len(net.tables)}")
        _check_rows(net.inputs, net.tables, net.k, 0, net.n, "V", problems)
        return problems

    n, m = net.n, net.m
    if m != n * net.k:
        problems.append(f"m={m} != n*k={n * net.k}")
    if len(net.v_inputs) != n or len(net.v_tables) != n:
        problems.append(f"expected {n} V input lists and tables")
    if len(net.e_inputs) != m or len(net.e_tables) != m or len(net.e_labels) != m:
        problems.append(f"expected {m} E input lists, tables and labels")
    _check_rows(net.v_inputs, net.v_tables, net.k, n, n + m, "V", problems)
    _check_rows(net.e_inputs, net.e_tables, net.l, 0, n, "E", problems)

    out_degree = Counter(e for row in net.v_inputs for e in row)
    for e in range(n, n + m):
        if out_degree.get(e, 0) != 1:
            problems.append(f"E vertex {e}: out-degree {out_degree.get(e, 0)} != 1")
    for i, row in enumerate(net.v_inputs):
        for e in row:
            if n <= e < n + m and e - n < len(net.e_labels):
                src, dst = net.e_labels[e - n]
                if dst != i:
                    problems.append(f"E vertex {e}: label target {dst} but feeds V vertex {i}")
    for j, (row, label) in enumerate(zip(net.e_inputs, net.e_labels)):
        if row and row[0] != label[0]:
            problems.append(f"E vertex {n + j}: first input {row[0]} != label source {label[0]}")
    if net.l == 1:
        ident = identity_table()
        for j, table in enumerate(net.e_tables):
            if table != ident:
                problems.append(f"E vertex {n + j}: l=1 E-table not identity")
    return problems


def to_json_dict(net: Network) -> dict:
    if isinstance(net, BooleanNetwork):
        return {
            "kind": "bn",
            "n": net.n,
            "k": net.k,
            "vertices": [
                {"id": i, "part": "V", "inputs": list(row), "table": t.to_hex()}
                for i, (row, t) in enumerate(zip(net.inputs, net.tables))
            ],
        }
    vertices = [
        {"id": i, "part": "V", "inputs": list(row), "table": t.to_hex()}
        for i, (row, t) in enumerate(zip(net.v_inputs, net.v_tables))
    ]
    vertices += [
        {"id": net.n + j, "part": "E", "inputs": list(row), "table": t.to_hex(), "label": list(label)}
        for j, (row, t, label) in enumerate(zip(net.e_inputs, net.e_tables, net.e_labels))
    ]
    return {"kind": "bipartite", "n": net.n, "k": net.k, "l": net.l, "vertices": vertices}


def from_json_dict(doc: dict) -> Network:
    """Parse the network file format. Structural validity is not checked here."""
    try:
        kind = doc["kind"]
        n, k = int(doc["n"]), int(doc["k"])
        vertices = sorted(doc["vertices"], key=lambda v: int(v["id"]))
        ids = [int(v["id"]) for v in vertices]
        if ids != list(range(len(vertices))):
            raise DomainError("vertex ids must be exactly 0..N-1")

        def rows_and_tables(part):
            rows, tables = [], []
            for v in part:
                row = tuple(int(x) for x in v["inputs"])
                rows.append(row)
                tables.append(TruthTable.from_hex(len(row), str(v["table"])))
            return tuple(rows), tuple(tables)

        if kind == "bn":
            if any(v.get("part", "V") != "V" for v in vertices):
                raise DomainError("bn files hold only V vertices")
            inputs, tables = rows_and_tables(vertices)
            if len(inputs) != n:
                raise DomainError(f"expected {n} vertices, got {len(inputs)}")
            return BooleanNetwork(n=n, k=k, inputs=inputs, tables=tables)
        if kind == "bipartite":
            l = int(doc["l"])
            v_part = [v for v in vertices if v["part"] == "V"]
            e_part = [v for v in vertices if v["part"] == "E"]
            if len(v_part) + len(e_part) != len(vertices) or [int(v["id"]) for v in v_part] != list(range(n)):
                raise DomainError("V-part must hold ids 0..n-1 and every vertex must be V or E")
            v_inputs, v_tables = rows_and_tables(v_part)
            e_inputs, e_tables = rows_and_tables(e_part)
            e_labels = tuple((int(v["label"][0]), int(v["label"][1])) for v in e_part)
            return BipartiteNetwork(
                n=n,
                m=len(e_part),
                k=k,
                l=l,
                v_inputs=v_inputs,
                e_inputs=e_inputs,
                v_tables=v_tables,
                e_tables=e_tables,
                e_labels=e_labels,
            )
        raise DomainError(f"unknown network kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise DomainError(f"malformed network document: {exc!r}") from exc


def dumps(net: Network) -> str:
    """Serialise with one vertex per line."""
    doc = to_json_dict(net)
    vertices = doc.pop("vertices")
    head = json.dumps(doc)[:-1]
    body = ",\n".join("  " + json.dumps(v) for v in vertices)
    return f'{head}, "vertices": [\n{body}\n]}}\n'


def loads(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from exc
    return from_json_dict(doc)


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(dumps(net))


def load_network(path: str | Path) -> Network:
    return loads(Path(path).read_text())
