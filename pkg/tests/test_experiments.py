import json

import numpy as np
import pytest

from locgame.errors import BudgetExceeded, InvalidConfig, InvalidPair, TooManyDisconnectedResamples
from locgame.experiments import (
    EXPANSION_HEADER, SYMMDIFF_HEADER, ExperimentConfig, build_manifest, capture_tables,
    default_threads, diameter_check, dump_json, expansion_check, format_csv, mc_capture,
    mc_survival, measure_symmdiff, mix_seed, read_csv, read_manifest, run_trials,
    sample_connected_gnp, solve_small, symmdiff_check, write_results,
)
from locgame.graph import GnpParams, complete_graph, cycle_graph, generate_gnp, path_graph, sphere
from locgame.solver import SolverBudget


def cfg(**kw):
    base = dict(kind="mc-capture", n=40, d=8.0, k=3, trials=5, max_rounds=10, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def stats_bytes(stats):
    tables = capture_tables(stats)
    return dump_json(stats.summary()) + "".join(format_csv(*t) for t in tables.values())


# -- seeds, threads ---------------------------------------------------------------

def test_mix_seed_is_pure_and_spread():
    assert mix_seed(1, 5) == mix_seed(1, 5)
    seeds = {mix_seed(1, t) for t in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert mix_seed(1, 0) != mix_seed(2, 0)


def test_run_trials_keeps_order():
    assert run_trials(lambda t: t * t, 20, threads=4) == [t * t for t in range(20)]


def test_default_threads_env(monkeypatch):
    monkeypatch.delenv("LOCGAME_THREADS", raising=False)
    assert default_threads() == 1
    monkeypatch.setenv("LOCGAME_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("LOCGAME_THREADS", "zero")
    with pytest.raises(InvalidConfig):
        default_threads()


# -- config ----------------------------------------------------------------------

@pytest.mark.parametrize("kw", [
    dict(trials=0), dict(p=0.1), dict(d=None), dict(k_rule="thm61"), dict(k=None),
    dict(threads=0), dict(d=80.0),
])
def test_config_validation(kw):
    with pytest.raises(InvalidConfig):
        cfg(**kw)


def test_config_resolution():
    c = cfg(k=None, k_rule="thm61", n=3000, d=3000 ** 0.7, max_rounds=None, tf_multiplier=2.0)
    assert c.resolve_k() == 157
    assert c.resolve_max_rounds() == 8          # ceil(2 * 3.8488)
    assert cfg(max_rounds=None).resolve_max_rounds() == 1600
    echo = c.echo()
    assert "threads" not in echo and "out" not in echo and echo["k_rule"] == "thm61"


def test_resampling():
    g, attempts = sample_connected_gnp(60, 0.15, 3)
    assert g.n == 60 and attempts >= 0
    with pytest.raises(TooManyDisconnectedResamples):
        sample_connected_gnp(50, 0.001, 3)


# -- Monte Carlo --------------------------------------------------------------------

def test_capture_k_equals_n():
    stats = mc_capture(cfg(k=40))
    assert stats.capture_rate == 1.0 and stats.histogram == {1: 5}


def test_survival_k_equals_n():
    stats = mc_survival(cfg(kind="mc-survival", k=40))
    assert stats.survival_rate == 0.0


def test_capture_stats_invariants():
    stats = mc_capture(cfg(trials=12, k=2, robber="random-robber"))
    assert stats.captures <= stats.trials
    assert sum(stats.histogram.values()) == stats.captures
    assert len(stats.per_trial) == 12


def test_capture_deterministic_and_thread_independent():
    a = stats_bytes(mc_capture(cfg(threads=1)))
    b = stats_bytes(mc_capture(cfg(threads=1)))
    c = stats_bytes(mc_capture(cfg(threads=4)))
    assert a == b == c


def test_survival_records_target_sizes():
    # d^2 / n - 2 log n > 0 here, so the diameter is 2 and the all-2 class is large
    stats = mc_survival(cfg(kind="mc-survival", n=400, d=80.0, k=2, max_rounds=5, trials=4))
    for r in stats.per_trial:
        assert len(r.target_sizes) == r.rounds
        if not r.captured:
            assert min(r.target_sizes) >= 1


# -- structural checks ---------------------------------------------------------------

def test_expansion_complete_graph():
    rows = expansion_check(50, 1.0, 1, 10, 1)
    assert [r[3] for r in rows if r[0] == "vertex"] == [49] * 10
    assert all(r[0] in ("vertex", "pair", "pair-diff") for r in rows)
    assert len(rows[0]) == len(EXPANSION_HEADER)


def test_expansion_empty_and_invalid():
    assert expansion_check(200, 0.05, 1, 0, 1) == []
    with pytest.raises(InvalidConfig):
        expansion_check(200, 0.5, 2, 5, 1)


def test_measure_symmdiff_matches_spheres():
    g = generate_gnp(GnpParams(300, 0.03, 2))
    for x, y in [(0, 1), (4, 200)]:
        for j in (1, 2):
            assert measure_symmdiff(g, x, y, j) == len(sphere(g, x, j) - sphere(g, y, j))
    with pytest.raises(InvalidPair):
        measure_symmdiff(g, 3, 3, 1)


def test_symmdiff_branches():
    rows, summary = symmdiff_check(5000, 3000 / 5000, 1, 5, 1)
    assert summary["branch"] == "polylog" and summary["median_ratio"] is None
    assert all(r[4] is None for r in rows)
    # n = 20000: log n - 4 log log n = 0.74 > c = 0.5
    rows, summary = symmdiff_check(20000, 100 / 20000, 2, 5, 1)
    assert summary["branch"] == "main" and summary["median_ratio"] is not None
    assert len(rows[0]) == len(SYMMDIFF_HEADER)
    assert summary["dense_enough"] is False and "log^3" in summary["note"]
    with pytest.raises(InvalidConfig):
        symmdiff_check(5000, 0.9, 2, 5, 1)


def test_diameter_check_examples():
    hist, summary = diameter_check(30, 1.0, 6, 1)
    assert hist == {"1": 6}
    one = diameter_check(200, 0.1, 1, 4)
    assert one == diameter_check(200, 0.1, 1, 4)
    hist, _ = diameter_check(100, 0.005, 3, 1)
    assert hist.get("inf", 0) >= 1
    assert diameter_check(200, 0.1, 8, 4, threads=1) == diameter_check(200, 0.1, 8, 4, threads=3)


# -- solve_small ----------------------------------------------------------------------

@pytest.mark.parametrize("g,zeta,beta", [
    (path_graph(6), 1, 1), (complete_graph(5), 4, 4), (cycle_graph(6), 2, 2),
])
def test_solve_small_examples(g, zeta, beta):
    report = solve_small(g)
    assert (report["zeta"], report["beta"]) == (zeta, beta)
    assert report["zeta_le_beta"] and report["oracle_checked"] and report["oracle_agrees"]


def test_solve_small_budget():
    with pytest.raises(BudgetExceeded):
        solve_small(cycle_graph(13))
    report = solve_small(cycle_graph(10), SolverBudget(), oracle=True)
    assert not report["oracle_checked"] and report["oracle_agrees"] is None


# -- persistence ----------------------------------------------------------------------

def test_results_roundtrip(tmp_path):
    stats = mc_capture(cfg())
    tables = capture_tables(stats)
    manifest = build_manifest(cfg().echo(), stats.summary(), [r.seed for r in stats.per_trial], tables)
    write_results(tmp_path, manifest, tables)
    assert read_manifest(tmp_path) == json.loads(dump_json(manifest))
    for name, (header, rows) in tables.items():
        h, body = read_csv(tmp_path / f"{name}.csv")
        assert h == header
        assert body == [[("" if v is None else repr(v) if isinstance(v, float) else str(v)) for v in r]
                        for r in rows]
    assert manifest["trial_seeds"] == [mix_seed(7, t) for t in range(5)]
    assert manifest["timestamps"] is None
    stamped = build_manifest({}, {}, stamp=True, started=1.0)
    assert stamped["timestamps"]["started"] == 1.0


def test_csv_float_roundtrip(tmp_path):
    values = [0.1, 1 / 3, 1e-300, 123456789.123]
    (tmp_path / "t.csv").write_text(format_csv(["x"], [[v] for v in values]))
    _, rows = read_csv(tmp_path / "t.csv")
    assert [float(r[0]) for r in rows] == values
