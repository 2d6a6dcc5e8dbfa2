import dataclasses
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolhyper.boolfn import TruthTable, identity_table
from boolhyper.errors import DomainError
from boolhyper.netgen import (
    BipartiteNetwork,
    BooleanNetwork,
    dumps,
    extend_to_hypernetwork,
    generate_bn,
    loads,
    to_bipartite,
    to_boolean_network,
    validate,
)

from conftest import NOT


def degrees(net: BipartiteNetwork):
    v_in = [len(r) for r in net.v_inputs]
    e_in = [len(r) for r in net.e_inputs]
    e_out = np.bincount([e - net.n for r in net.v_inputs for e in r], minlength=net.m)
    return v_in, e_in, e_out.tolist()


def test_generate_small(rng):
    bn = generate_bn(3, 2, rng)
    assert bn.n == 3 and bn.k == 2 and bn.m == 6
    assert len(bn.edges) == 6
    assert all(len(r) == 2 for r in bn.inputs)
    assert validate(bn) == []


def test_generate_single_vertex(rng):
    bn = generate_bn(1, 1, rng)
    assert bn.inputs == ((0,),)
    assert bn.tables[0].arity == 1


def test_generate_edge_count(rng):
    bn = generate_bn(50, 2, rng)
    assert bn.m == 100 and len(bn.edges) == 100


@pytest.mark.parametrize("n, k", [(50, 51), (0, 1), (3, 0)])
def test_generate_rejects_bad_degree(n, k, rng):
    with pytest.raises(DomainError):
        generate_bn(n, k, rng)


def test_generate_inputs_are_distinct_sorted_and_cover_self_loops():
    rng = np.random.default_rng(3)
    self_loops = 0
    for _ in range(200):
        bn = generate_bn(6, 3, rng)
        for i, row in enumerate(bn.inputs):
            assert list(row) == sorted(set(row))
            self_loops += i in row
    assert self_loops > 0


def test_generate_input_subsets_are_uniform():
    # each vertex's inputs: uniform 2-subset of 4 vertices -> 6 subsets
    rng = np.random.default_rng(11)
    counts = {}
    draws = 0
    for _ in range(3000):
        for row in generate_bn(4, 2, rng).inputs:
            counts[row] = counts.get(row, 0) + 1
            draws += 1
    assert len(counts) == 6
    p = 1 / 6
    sigma = np.sqrt(p * (1 - p) / draws)
    assert all(abs(c / draws - p) < 5 * sigma for c in counts.values())


def test_generate_is_deterministic():
    a = generate_bn(30, 3, np.random.default_rng(99))
    b = generate_bn(30, 3, np.random.default_rng(99))
    assert a == b
    assert dumps(a) == dumps(b)


def test_to_bipartite_counts(rng):
    bn = generate_bn(3, 2, rng)
    bbn = to_bipartite(bn)
    assert (bbn.n, bbn.m, bbn.l) == (3, 6, 1)
    edges = sum(len(r) for r in bbn.v_inputs) + sum(len(r) for r in bbn.e_inputs)
    assert edges == 12
    assert validate(bbn) == []


def test_to_bipartite_preserves_input_order(rng):
    bn = generate_bn(10, 3, rng)
    bbn = to_bipartite(bn)
    for i, row in enumerate(bbn.v_inputs):
        for j, e in enumerate(row):
            assert bbn.e_labels[e - bbn.n] == (bn.inputs[i][j], i)
            assert bbn.e_inputs[e - bbn.n] == (bn.inputs[i][j],)
    assert bbn.v_tables == bn.tables
    assert all(t == identity_table() for t in bbn.e_tables)


def test_to_bipartite_sizes_for_n50_k2_network(rng):
    bbn = to_bipartite(generate_bn(50, 2, rng))
    assert bbn.n == 50 and bbn.m == 100


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 4), st.integers(0, 2**32))
def test_bipartite_round_trip_and_validity(n, k, seed):
    k = min(k, n)
    bn = generate_bn(n, k, np.random.default_rng(seed))
    bbn = to_bipartite(bn)
    assert validate(bbn) == []
    assert bbn.m == n * k
    assert to_boolean_network(bbn) == bn


def test_extend_l1_is_identity(rng):
    bbn = to_bipartite(generate_bn(10, 2, rng))
    assert extend_to_hypernetwork(bbn, 1, rng) is bbn


def test_extend_adds_one_input_each_for_l2(rng):
    bbn = to_bipartite(generate_bn(3, 2, rng))
    bh = extend_to_hypernetwork(bbn, 2, rng)
    assert bh.m == 6
    for old, new in zip(bbn.e_inputs, bh.e_inputs):
        assert new[0] == old[0]
        assert len(new) == 2 and new[1] != new[0]
    assert validate(bh) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 30), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32))
def test_extend_keeps_v_part_and_degrees(n, k, l, seed):
    rng = np.random.default_rng(seed)
    bbn = to_bipartite(generate_bn(n, k, rng))
    bh = extend_to_hypernetwork(bbn, l, rng)
    assert (bh.v_inputs, bh.v_tables, bh.n, bh.m, bh.k) == (bbn.v_inputs, bbn.v_tables, bbn.n, bbn.m, bbn.k)
    v_in, e_in, e_out = degrees(bh)
    assert set(v_in) == {k} and set(e_in) == {l} and set(e_out) == {1}
    assert all(t.arity == l for t in bh.e_tables)
    assert validate(bh) == []


def test_extend_l3_on_n50_network(rng):
    bbn = to_bipartite(generate_bn(50, 2, rng))
    bh = extend_to_hypernetwork(bbn, 3, rng)
    assert all(len(r) == 3 for r in bh.e_inputs)


def test_extend_added_inputs_are_uniform():
    # n=4, original source excluded: the added vertex is uniform over the other 3
    rng = np.random.default_rng(8)
    bn = BooleanNetwork(n=4, k=1, inputs=((0,), (0,), (0,), (0,)), tables=(identity_table(),) * 4)
    bbn = to_bipartite(bn)
    counts = np.zeros(4)
    for _ in range(3000):
        for row in extend_to_hypernetwork(bbn, 2, rng).e_inputs:
            counts[row[1]] += 1
    assert counts[0] == 0
    freq = counts[1:] / counts.sum()
    assert np.all(np.abs(freq - 1 / 3) < 5 * np.sqrt(2 / 9 / counts.sum()))


def test_extend_errors(rng):
    bbn = to_bipartite(generate_bn(3, 2, rng))
    with pytest.raises(DomainError):
        extend_to_hypernetwork(bbn, 4, rng)
    bh = extend_to_hypernetwork(bbn, 2, rng)
    with pytest.raises(DomainError):
        extend_to_hypernetwork(bh, 3, rng)


def test_validate_flags_non_identity_e_table(rng):
    bbn = to_bipartite(generate_bn(5, 2, rng))
    tables = list(bbn.e_tables)
    tables[3] = NOT
    broken = dataclasses.replace(bbn, e_tables=tuple(tables))
    report = validate(broken)
    assert len(report) == 1 and "l=1 E-table not identity" in report[0]


def test_validate_flags_duplicates():
    ident = identity_table()
    zero2 = TruthTable(2, [0, 0, 0, 0])
    bn = BooleanNetwork(n=2, k=2, inputs=((0, 0), (0, 1)), tables=(zero2, zero2))
    report = validate(bn)
    assert any("duplicate" in p for p in report)
    assert validate(BooleanNetwork(n=2, k=1, inputs=((1,), (0,)), tables=(ident, ident))) == []


def test_validate_flags_wrong_degree_and_range():
    ident = identity_table()
    bn = BooleanNetwork(n=2, k=1, inputs=((1,), (5,)), tables=(ident, ident))
    assert any("outside" in p for p in validate(bn))
    bn = BooleanNetwork(n=2, k=1, inputs=((1,), (0, 1)), tables=(ident, ident))
    assert any("in-degree" in p for p in validate(bn))


def test_validate_flags_shared_e_vertex(rng):
    bbn = to_bipartite(generate_bn(3, 2, rng))
    v_inputs = list(bbn.v_inputs)
    v_inputs[1] = (v_inputs[0][0], v_inputs[1][1])
    broken = dataclasses.replace(bbn, v_inputs=tuple(v_inputs))
    assert any("out-degree" in p for p in validate(broken))


@pytest.mark.parametrize("l", [1, 3])
def test_json_round_trip(l, rng):
    bn = generate_bn(8, 3, rng)
    bh = extend_to_hypernetwork(to_bipartite(bn), l, rng)
    for net in (bn, bh):
        text = dumps(net)
        assert loads(text) == net
        assert dumps(loads(text)) == text


def test_json_layout(rng):
    import json

    bbn = to_bipartite(generate_bn(3, 2, rng))
    doc = json.loads(dumps(bbn))
    assert doc["kind"] == "bipartite" and doc["l"] == 1
    ids = [v["id"] for v in doc["vertices"]]
    assert ids == list(range(9))
    e = doc["vertices"][3]
    assert e["part"] == "E" and e["table"] == "2" and len(e["label"]) == 2


@pytest.mark.parametrize(
    "text",
    ["not json", '{"kind": "tree", "n": 1, "k": 1, "vertices": []}', '{"kind": "bn", "n": 1}'],
)
def test_loads_rejects_malformed(text):
    with pytest.raises(DomainError):
        loads(text)
