import dataclasses
import json

import numpy as np
import pytest

from boolhyper.boolfn import TruthTable
from boolhyper.ensemble import (
    ExperimentConfig,
    _Replicate,
    _row_attractor,
    replicate_seed,
    run_attractor,
    run_complexity,
    run_equivalence,
    run_experiment,
    run_fragility,
    run_overlap,
    trajectories_match,
)
from boolhyper.errors import DomainError
from boolhyper.netgen import extend_to_hypernetwork, to_bipartite

from conftest import NOT, const_zero_bn, identity_ring


def small(experiment, **kw):
    base = dict(n=12, k_values=(1, 2), l_values=(1, 2), replicates=4, half_steps=40, attractor_cap=500,
                perturb_x=3, perturb_events=20, master_seed=5)
    base.update(kw)
    return ExperimentConfig(experiment=experiment, **base)


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="nope")
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="overlap", replicates=0)
    with pytest.raises(DomainError):
        ExperimentConfig(experiment="overlap", n=3, l_values=(4,))
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"experiment": "overlap", "bogus": 1})


def test_config_json_round_trip(tmp_path):
    cfg = ExperimentConfig.defaults("fragility", master_seed=9)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.load(path) == cfg


def test_defaults():
    cfg = ExperimentConfig.defaults("complexity")
    assert (cfg.n, cfg.half_steps, cfg.replicates) == (100, 800, 200)
    assert cfg.k_values == (1, 2, 3, 4) and cfg.l_values == (1, 2, 3, 4)
    frag = ExperimentConfig.defaults("fragility")
    assert (frag.perturb_x, frag.perturb_events) == (20, 400)
    assert frag.half_steps >= 2 * frag.perturb_events


def test_seed_derivation_is_keyed():
    a = replicate_seed(1, "overlap", 2, 3, 4).generate_state(4)
    assert np.array_equal(a, replicate_seed(1, "overlap", 2, 3, 4).generate_state(4))
    for other in [(2, "overlap", 2, 3, 4), (1, "complexity", 2, 3, 4), (1, "overlap", 2, 3, 5)]:
        assert not np.array_equal(a, replicate_seed(*other).generate_state(4))


def test_more_replicates_keep_earlier_rows():
    a = run_experiment(small("overlap", replicates=3))
    b = run_experiment(small("overlap", replicates=5))
    rows_b = {(r["k"], r["l"], r["replicate"]): r for r in b.rows}
    for row in a.rows:
        assert rows_b[(row["k"], row["l"], row["replicate"])] == row


def test_equivalence_smallest_case():
    cfg = ExperimentConfig(experiment="equivalence", n=1, k_values=(1,), l_values=(1,), replicates=5, half_steps=20)
    assert run_equivalence(cfg).totals["mismatches"] == 0


def test_equivalence_detects_corruption():
    bn = identity_ring()
    bbn = to_bipartite(bn)
    assert trajectories_match(bn, bbn, [0, 1], 5)
    broken = dataclasses.replace(bbn, e_tables=(NOT,) + bbn.e_tables[1:])
    assert not trajectories_match(bn, broken, [0, 1], 5)


def test_runner_checks_experiment_kind():
    with pytest.raises(DomainError):
        run_overlap(small("complexity"))


def test_aggregate_cell_count():
    rep = run_overlap(small("overlap", k_values=(1, 2, 3), l_values=(1, 2)))
    assert len(rep.cells) == 6
    assert len(rep.rows) == 6 * 4


@pytest.mark.parametrize("experiment", ["overlap", "complexity", "fragility"])
def test_l1_cells_are_exactly_neutral(experiment):
    rep = run_experiment(small(experiment))
    for k in (1, 2):
        cell = rep.cell(k, 1)
        if experiment == "overlap":
            assert cell["overlap"]["mean"] == 1.0
        else:
            assert cell["difference"]["mean"] == 0.0
            assert all(r["difference"] == 0.0 for r in rep.rows if r["l"] == 1)


def test_fragility_rows_sign():
    rep = run_fragility(small("fragility", replicates=6))
    for row in rep.rows:
        for net in ("bbn", "bh"):
            assert np.sign(row[f"fragility_{net}"]) == -np.sign(row[f"delta_c_{net}"])


def test_attractor_report_structure():
    rep = run_attractor(small("attractor", k_values=(2,), l_values=(2, 3), replicates=10))
    cell = rep.cell(2, 3)
    assert cell["period_bbn"]["count"] + cell["pairs_dropped"] == 10
    assert 0.0 <= cell["mann_whitney"]["p"] <= 1.0
    assert rep.columns[:3] == ["replicate", "k", "l"]


def test_attractor_censoring_drops_pairs():
    rep = run_attractor(small("attractor", n=30, k_values=(4,), l_values=(3,), replicates=6, attractor_cap=2))
    cell = rep.cell(4, 3)
    assert cell["pairs_dropped"] == 6 - cell["period_bbn"]["count"]
    assert cell["pairs_dropped"] >= max(cell["censored_bbn"], cell["censored_bh"])


def test_forced_constant_tables_give_fixed_points():
    rng = np.random.default_rng(0)
    bbn = to_bipartite(const_zero_bn(8, 2))
    bh = extend_to_hypernetwork(bbn, 3, rng)
    rep = _Replicate(None, bbn, bh, rng.integers(0, 2, 8, dtype=np.uint8), 0)
    row = _row_attractor(small("attractor"), 2, 3, 0, rep)
    assert row["period_bbn"] == row["period_bh"] == 1


def test_report_files(tmp_path):
    rep = run_complexity(small("complexity"))
    rep.write(tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["tool"] == "boolhyper" and summary["config"]["experiment"] == "complexity"
    assert len(summary["cells"]) == 4
    lines = (tmp_path / "rows.csv").read_text().splitlines()
    assert lines[0].startswith("# boolhyper")
    assert lines[2] == "replicate,k,l,complexity_bbn,complexity_bh,difference"
    assert len(lines) == 3 + 16
    # full precision survives the round trip
    first = rep.rows[0]
    assert float(lines[3].split(",")[3]) == first["complexity_bbn"]


def test_parallel_matches_serial():
    cfg = small("fragility", replicates=3)
    assert run_experiment(cfg, threads=2).rows_csv() == run_experiment(cfg).rows_csv()


def test_partial_config_uses_experiment_defaults():
    cfg = ExperimentConfig.from_dict({"experiment": "complexity", "replicates": 3})
    assert cfg == ExperimentConfig.defaults("complexity", replicates=3)
    assert cfg.n == 100 and cfg.k_values == (1, 2, 3, 4)
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"experiment": "nope"})
