import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from locgame.errors import BudgetExceeded, DisconnectedGraph, InvalidK
from locgame.experiments import sample_connected_gnp
from locgame.game import play, simulate_walk
from locgame.graph import complete_graph, cycle_graph, path_graph, star_graph
from locgame.signatures import partition_by_signature
from locgame.solver import (
    SolverBudget, SolverCop, Verdict, cop_wins, localization_number, mask_of, members,
    metric_dimension, naive_cop_wins_oracle,
)
from locgame.strategies import GreedyRobber, RandomRobber, ScriptedWalk
from conftest import from_nx


def connected_atlas(max_n):
    return [from_nx(h) for h in nx.graph_atlas_g()[1:]
            if h.number_of_nodes() <= max_n and nx.is_connected(h)]


def brute_metric_dimension(g):
    if g.n == 1:
        return 0
    for size in range(1, g.n + 1):
        for S in itertools.combinations(range(g.n), size):
            if partition_by_signature(g, S, range(g.n)).is_discrete():
                return size
    return g.n


# -- cop_wins ---------------------------------------------------------------

def test_cop_wins_examples():
    assert cop_wins(path_graph(4), 1).verdict is Verdict.COP_WINS
    res = cop_wins(complete_graph(4), 2)
    assert res.verdict is Verdict.ROBBER_WINS and res.strategy is None
    assert cop_wins(cycle_graph(5), 1).verdict is naive_cop_wins_oracle(cycle_graph(5), 1, 2 ** 5)


def test_cop_wins_input_checks(two_edges):
    with pytest.raises(DisconnectedGraph):
        cop_wins(two_edges, 1)
    with pytest.raises(InvalidK):
        cop_wins(path_graph(3), 4)


def test_strategy_present_iff_cop_wins():
    for g in connected_atlas(5):
        for k in range(1, g.n + 1):
            res = cop_wins(g, k)
            assert (res.strategy is not None) == (res.verdict is Verdict.COP_WINS)
            assert (res.depth_bound is not None) == (res.verdict is Verdict.COP_WINS)


def test_solve_result_json_fields():
    d = cop_wins(cycle_graph(5), 2).to_dict()
    assert set(d) == {"n", "k", "verdict", "states_explored", "depth_bound"}
    assert d["verdict"] == "CopWins"


def test_budget_verdicts():
    g = cycle_graph(8)
    assert cop_wins(g, 1, SolverBudget(n_max=6)).verdict is Verdict.BUDGET_EXCEEDED
    assert cop_wins(g, 3, SolverBudget(k_max=2)).verdict is Verdict.BUDGET_EXCEEDED
    assert cop_wins(g, 4, SolverBudget(max_probes=10)).verdict is Verdict.BUDGET_EXCEEDED
    assert cop_wins(g, 1, SolverBudget(max_states=2)).verdict is Verdict.BUDGET_EXCEEDED
    with pytest.raises(BudgetExceeded):
        localization_number(g, SolverBudget(n_max=6))
    with pytest.raises(BudgetExceeded):
        metric_dimension(complete_graph(9), SolverBudget(max_subsets=5))
    with pytest.raises(ValueError):
        SolverBudget(n_max=0)


def test_probe_order_does_not_change_verdict():
    for seed in range(15):
        g, _ = sample_connected_gnp(7, 0.4, seed)
        for k in (1, 2):
            base = cop_wins(g, k)
            for order_seed in (1, 2, 3):
                other = cop_wins(g, k, probe_order_seed=order_seed)
                assert (other.verdict, other.depth_bound) == (base.verdict, base.depth_bound)


@given(st.sets(st.integers(0, 40)))
def test_mask_encoding_injective(vs):
    assert members(mask_of(vs)) == sorted(vs)


# -- localization number --------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 9))
def test_zeta_path(n):
    assert localization_number(path_graph(n)) == 1


@pytest.mark.parametrize("n", range(2, 8))
def test_zeta_complete(n):
    assert localization_number(complete_graph(n)) == n - 1


# values pinned from the naive oracle before the solver was written
CYCLE_ZETA = {4: 2, 5: 2, 6: 2, 7: 1, 8: 1}


@pytest.mark.parametrize("n", sorted(CYCLE_ZETA))
def test_zeta_cycles(n):
    g = cycle_graph(n)
    z = localization_number(g)
    assert z == CYCLE_ZETA[n]
    assert naive_cop_wins_oracle(g, z, 2 ** n) is Verdict.COP_WINS
    if z > 1:
        assert naive_cop_wins_oracle(g, z - 1, 2 ** n) is Verdict.ROBBER_WINS


@pytest.mark.parametrize("m", range(2, 6))
def test_zeta_stars(m):
    g = star_graph(m)
    assert localization_number(g) == 1
    assert naive_cop_wins_oracle(g, 1, 2 ** g.n) is Verdict.COP_WINS


# -- naive oracle -------------------------------------------------------------

def test_oracle_examples():
    assert naive_cop_wins_oracle(complete_graph(3), 2, 1) is Verdict.COP_WINS
    assert naive_cop_wins_oracle(complete_graph(3), 1, 100) is Verdict.ROBBER_WINS


def test_oracle_depth_bound_is_tight():
    for seed in range(10):
        g, _ = sample_connected_gnp(6, 0.4, seed)
        res = cop_wins(g, 1)
        if res.verdict is Verdict.COP_WINS:
            assert naive_cop_wins_oracle(g, 1, res.depth_bound) is Verdict.COP_WINS
            if res.depth_bound > 1:
                assert naive_cop_wins_oracle(g, 1, res.depth_bound - 1) is Verdict.ROBBER_WINS


def test_oracle_agrees_on_all_small_graphs():
    for g in connected_atlas(5):
        for k in (1, 2, 3):
            if k <= g.n:
                assert cop_wins(g, k).verdict is naive_cop_wins_oracle(g, k, 2 ** g.n), g.edges()


@pytest.mark.slow
def test_oracle_agrees_on_random_graphs():
    rng = np.random.default_rng(2024)
    for t in range(200):
        n = int(rng.integers(6, 9))
        g, _ = sample_connected_gnp(n, float(rng.uniform(0.25, 0.7)), 1000 + t)
        k = int(rng.integers(1, 3))
        assert cop_wins(g, k).verdict is naive_cop_wins_oracle(g, k, 2 ** n), (t, g.edges())


# -- metric dimension ------------------------------------------------------------

def test_beta_examples():
    assert metric_dimension(path_graph(5)) == 1
    assert metric_dimension(complete_graph(4)) == 3
    assert metric_dimension(cycle_graph(5)) == brute_metric_dimension(cycle_graph(5)) == 2
    assert metric_dimension(path_graph(1)) == 0
    assert localization_number(path_graph(1)) == 0


@pytest.mark.parametrize("n", range(2, 9))
def test_beta_families(n):
    assert metric_dimension(path_graph(n)) == 1
    assert metric_dimension(complete_graph(n)) == n - 1
    assert metric_dimension(star_graph(n)) == n - 1


def test_beta_matches_brute_force():
    for g in connected_atlas(6):
        assert metric_dimension(g) == brute_metric_dimension(g)
    for seed in range(20):
        g, _ = sample_connected_gnp(9, 0.35, seed)
        assert metric_dimension(g) == brute_metric_dimension(g)


# -- invariants -----------------------------------------------------------------

def test_monotone_in_k():
    for g in connected_atlas(6):
        wins = [cop_wins(g, k).verdict is Verdict.COP_WINS for k in range(1, g.n + 1)]
        assert wins == sorted(wins), g.edges()
        assert wins[-1]


def test_zeta_at_most_beta():
    for g in connected_atlas(6):
        assert localization_number(g) <= metric_dimension(g)


def test_extracted_strategy_replays():
    for seed in range(25):
        g, _ = sample_connected_gnp(7, 0.4, seed)
        k = localization_number(g)
        res = cop_wins(g, k)
        robbers = [GreedyRobber()] + [RandomRobber(seed=s) for s in range(100)]
        for robber in robbers:
            tr = play(g, k, SolverCop(res), robber, res.depth_bound)
            assert tr.captured and tr.capture_round <= res.depth_bound


def _all_walks_captured(g, k, res):
    """Every robber walk loses to the extracted strategy within the depth bound."""
    todo = [[v] for v in range(g.n)]
    while todo:
        walk = todo.pop()
        tr = simulate_walk(g, k, SolverCop(res), ScriptedWalk(walk), len(walk))
        if tr.captured:
            continue
        if len(walk) >= res.depth_bound:
            return False
        last = walk[-1]
        todo.extend(walk + [int(u)] for u in list(g.neighbors(last)) + [last])
    return True


def test_walk_game_matches_class_game():
    graphs = connected_atlas(5)
    rng = np.random.default_rng(3)
    for t in range(12):
        n = int(rng.integers(6, 9))
        graphs.append(sample_connected_gnp(n, 0.45, 500 + t)[0])
    for g in graphs:
        for k in range(1, min(3, g.n) + 1):
            res = cop_wins(g, k)
            if res.verdict is Verdict.COP_WINS:
                assert _all_walks_captured(g, k, res)
