"""Seeded Monte Carlo experiments and their on-disk results.

Trial ``t`` of a run with master seed ``m`` uses ``seed_t = mix_seed(m, t)``
and, inside the trial, further seeds ``mix_seed(seed_t, tag)`` for the graph
(``tag`` = resample attempt 0..10), the cop (``COP_TAG``) and the referee
(``GAME_TAG``).  Trials only ever see their own seeds and results are
collected in trial order, so the thread count never changes any output.

Each run writes ``manifest.json`` plus one CSV per table into its output
directory.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    compute_regime, k_from_rule, predicted_sphere_size, predicted_symmdiff, t_f,
)
from .errors import (
    BudgetExceeded, DegenerateRegime, InvalidConfig, InvalidPair, TooManyDisconnectedResamples,
)
from .game import Transcript, play
from .graph import UNREACHABLE, GnpParams, Graph, diameter, generate_gnp, is_connected
from .solver import SolverBudget, Verdict, localization_number, metric_dimension, naive_cop_wins_oracle, cop_wins
from .strategies import RandomCopConfig, make_robber, random_cop

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
COP_TAG = 0xC0
GAME_TAG = 0x6A
MAX_RESAMPLES = 10
THREADS_ENV = "LOCGAME_THREADS"


def mix_seed(master: int, index: int) -> int:
    """SplitMix64 finaliser applied to ``master + (index + 1) * golden``."""
    z = (int(master) + (int(index) + 1) * GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InvalidConfig(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidConfig(f"{THREADS_ENV} must be positive")
    return value


def run_trials(fn: Callable[[int], Any], trials: int, threads: int = 1) -> list[Any]:
    """``[fn(0), fn(1), ...]`` evaluated on up to ``threads`` workers, in trial order."""
    if threads <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


@dataclass
class ExperimentConfig:
    kind: str
    n: int
    p: float | None = None
    d: float | None = None
    k: int | None = None
    k_rule: str | None = None
    trials: int = 1
    max_rounds: int | None = None
    tf_multiplier: float | None = None
    seed: int = 0
    out: str | None = None
    threads: int = 1
    robber: str = "greedy-robber"
    i_override: int | None = None
    A: float | None = None
    B: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")
        if self.n < 1:
            raise InvalidConfig("n must be at least 1")
        if (self.p is None) == (self.d is None):
            raise InvalidConfig("give exactly one of p and d")
        if self.kind in ("mc-capture", "mc-survival") and (self.k is None) == (self.k_rule is None):
            raise InvalidConfig("give exactly one of k and k_rule")
        if self.threads < 1:
            raise InvalidConfig("threads must be at least 1")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise InvalidConfig(f"edge probability {self.edge_prob} outside [0, 1]")

    @property
    def edge_prob(self) -> float:
        return float(self.p) if self.p is not None else float(self.d) / self.n

    @property
    def avg_degree(self) -> float:
        return float(self.d) if self.d is not None else float(self.p) * self.n

    def resolve_k(self) -> int:
        if self.k is not None:
            if not 1 <= self.k <= self.n:
                raise InvalidConfig(f"k must lie in [1, {self.n}]")
            return self.k
        r = compute_regime(self.n, self.avg_degree, self.i_override)
        return k_from_rule(self.k_rule, r, self.A, self.B)

    def resolve_max_rounds(self) -> int:
        if self.max_rounds is not None:
            if self.max_rounds < 1:
                raise InvalidConfig("max_rounds must be at least 1")
            return self.max_rounds
        if self.tf_multiplier is not None:
            return max(1, math.ceil(self.tf_multiplier * t_f(self.n)))
        return self.n * self.n

    def echo(self) -> dict[str, Any]:
        # thread count and output path do not influence results and are left out
        out = asdict(self)
        out.pop("threads")
        out.pop("out")
        return out


def sample_connected_gnp(n: int, p: float, trial_seed: int) -> tuple[Graph, int]:
    """G(n, p) conditioned on connectivity by resampling; returns the graph and the resample count."""
    for attempt in range(MAX_RESAMPLES + 1):
        g = generate_gnp(GnpParams(n, p, mix_seed(trial_seed, attempt)))
        if is_connected(g):
            return g, attempt
    raise TooManyDisconnectedResamples(
        f"G({n}, {p}) was disconnected {MAX_RESAMPLES + 1} times in a row (seed {trial_seed})")


# -- capture / survival --------------------------------------------------

@dataclass
class TrialResult:
    trial: int
    seed: int
    resamples: int
    captured: bool
    rounds: int
    candidate_sizes: list[int]
    target_sizes: list[int] = field(default_factory=list)


@dataclass
class CaptureStats:
    trials: int
    captures: int
    capture_rate: float
    histogram: dict[int, int]
    mean_shrink: list[float]
    resamples: int
    k: int
    max_rounds: int
    per_trial: list[TrialResult] = field(default_factory=list)

    @property
    def survival_rate(self) -> float:
        return 1.0 - self.capture_rate

    def summary(self) -> dict[str, Any]:
        return {
            "trials": self.trials, "captures": self.captures, "capture_rate": self.capture_rate,
            "survival_rate": self.survival_rate, "k": self.k, "max_rounds": self.max_rounds,
            "histogram": {str(r): c for r, c in sorted(self.histogram.items())},
            "mean_shrink": self.mean_shrink, "resamples": self.resamples,
        }


def _target_sizes(tr: Transcript, target: int) -> list[int]:
    sizes = []
    for rec in tr.rounds:
        idx = rec.partition.find_signature([target] * len(rec.probe))
        sizes.append(0 if idx is None else len(rec.partition.classes[idx]))
    return sizes


def _play_trial(cfg: ExperimentConfig, k: int, max_rounds: int, t: int, robber_name: str) -> TrialResult:
    seed_t = mix_seed(cfg.seed, t)
    g, resamples = sample_connected_gnp(cfg.n, cfg.edge_prob, seed_t)
    cop = random_cop(RandomCopConfig(k, mix_seed(seed_t, COP_TAG)))
    robber = make_robber(robber_name, seed=mix_seed(seed_t, GAME_TAG + 1))
    tr = play(g, k, cop, robber, max_rounds, seed=mix_seed(seed_t, GAME_TAG))
    sizes = [rec.candidates for rec in tr.rounds]
    sizes.append(1 if tr.captured else len(g.closed_neighborhood(tr.rounds[-1].chosen_class)))
    targets = []
    if robber_name == "diametric-robber":
        targets = _target_sizes(tr, robber.target_for(g))
    return TrialResult(t, seed_t, resamples, tr.captured, len(tr.rounds), sizes, targets)


def _aggregate(results: Sequence[TrialResult], k: int, max_rounds: int) -> CaptureStats:
    captures = sum(r.captured for r in results)
    hist: dict[int, int] = {}
    for r in results:
        if r.captured:
            hist[r.rounds] = hist.get(r.rounds, 0) + 1
    longest = max(len(r.candidate_sizes) - 1 for r in results)
    shrink = []
    for j in range(longest):
        ratios = [r.candidate_sizes[j + 1] / r.candidate_sizes[j] for r in results
                  if len(r.candidate_sizes) > j + 1]
        shrink.append(statistics.fmean(ratios))
    return CaptureStats(
        trials=len(results), captures=captures, capture_rate=captures / len(results),
        histogram=hist, mean_shrink=shrink, resamples=sum(r.resamples for r in results),
        k=k, max_rounds=max_rounds, per_trial=list(results),
    )


def mc_capture(cfg: ExperimentConfig) -> CaptureStats:
    """Random cop against ``cfg.robber`` on fresh connected G(n, p) samples."""
    k, max_rounds = cfg.resolve_k(), cfg.resolve_max_rounds()
    results = run_trials(lambda t: _play_trial(cfg, k, max_rounds, t, cfg.robber), cfg.trials, cfg.threads)
    return _aggregate(results, k, max_rounds)


def mc_survival(cfg: ExperimentConfig) -> CaptureStats:
    """Random cop against the diametric robber; per-round sizes of the all-diameter class."""
    k, max_rounds = cfg.resolve_k(), cfg.resolve_max_rounds()
    results = run_trials(lambda t: _play_trial(cfg, k, max_rounds, t, "diametric-robber"),
                         cfg.trials, cfg.threads)
    return _aggregate(results, k, max_rounds)


def capture_tables(stats: CaptureStats) -> dict[str, tuple[list[str], list[list[Any]]]]:
    trial_rows = [[r.trial, r.seed, r.resamples, int(r.captured), r.rounds,
                   " ".join(map(str, r.candidate_sizes)), " ".join(map(str, r.target_sizes))]
                  for r in stats.per_trial]
    hist_rows = [[rnd, cnt] for rnd, cnt in sorted(stats.histogram.items())]
    shrink_rows = [[j + 1, v] for j, v in enumerate(stats.mean_shrink)]
    return {
        "trials": (["trial", "seed", "resamples", "captured", "rounds", "candidate_sizes", "target_class_sizes"],
                   trial_rows),
        "histogram": (["round", "captures"], hist_rows),
        "shrink": (["round", "mean_shrink"], shrink_rows),
    }


# -- structural checks ---------------------------------------------------

def _sphere_of_set(g: Graph, vertices: Sequence[int], j: int) -> np.ndarray:
    return g.bfs_levels(vertices, max_depth=j) == j


def measure_symmdiff(g: Graph, x: int, y: int, j: int) -> int:
    """``|S(x, j) \\ S(y, j)|``."""
    if x == y:
        raise InvalidPair("symmetric-difference check needs x != y")
    return int(np.count_nonzero(_sphere_of_set(g, [x], j) & ~_sphere_of_set(g, [y], j)))


def _sample_pairs(rng: np.random.Generator, n: int, count: int) -> list[tuple[int, int]]:
    pairs = []
    for _ in range(count):
        x = int(rng.integers(n))
        y = int(rng.integers(n - 1))
        pairs.append((x, y + (y >= x)))
    return pairs


def _regime_or_none(n: int, d: float, i: int):
    try:
        return compute_regime(n, d, i_override=i)
    except DegenerateRegime:
        return None


EXPANSION_HEADER = ["kind", "vertices", "j", "measured", "predicted", "rel_error", "band"]


def expansion_check(n: int, p: float, i: int, samples: int, seed: int) -> list[list[Any]]:
    """Measured sphere sizes around random vertices and pairs against ``d**j |V'|``.

    ``samples`` single vertices and ``samples // 2`` pairs are drawn.  Rows of
    kind ``vertex`` and ``pair`` compare ``|S(V', j)|`` with ``d**j |V'|``;
    rows of kind ``pair-diff`` compare ``|S(x, j) \\ S(y, j)|`` with ``d**j``.
    """
    d = p * n
    if i < 1 or d ** i > n:
        raise InvalidConfig(f"expansion check needs i >= 1 and d**i <= n (d={d:.6g}, i={i})")
    if samples == 0:
        return []
    g = generate_gnp(GnpParams(n, p, mix_seed(seed, 0)))
    rng = np.random.Generator(np.random.PCG64(mix_seed(seed, 1)))
    regime = _regime_or_none(n, d, i)
    rows: list[list[Any]] = []

    def row(kind, verts, j, measured, size):
        if regime is not None:
            pred, band = predicted_sphere_size(regime, j, size)
        else:
            pred, band = d ** j * size, None
        rows.append([kind, " ".join(map(str, verts)), j, measured, pred, (measured - pred) / pred, band])

    for v in rng.integers(n, size=samples).tolist():
        for j in range(1, i + 1):
            row("vertex", [v], j, int(np.count_nonzero(_sphere_of_set(g, [v], j))), 1)
    for x, y in _sample_pairs(rng, n, samples // 2):
        for j in range(1, i + 1):
            row("pair", [x, y], j, int(np.count_nonzero(_sphere_of_set(g, [x, y], j))), 2)
            row("pair-diff", [x, y], j, measure_symmdiff(g, x, y, j), 1)
    return rows


SYMMDIFF_HEADER = ["x", "y", "measured", "predicted", "ratio", "branch"]


def symmdiff_check(n: int, p: float, i: int, pairs: int, seed: int) -> tuple[list[list[Any]], dict[str, Any]]:
    """``|S(x,i) \\ S(y,i)|`` on sampled pairs against ``n (1 - e**-c) e**-c``."""
    d = p * n
    c = d ** i / n
    if not 0 < c <= 3 * math.log(n):
        raise InvalidConfig(f"symmdiff check needs 0 < c <= 3 log n, got c={c:.6g}")
    regime = compute_regime(n, d, i_override=i)
    pred = predicted_symmdiff(regime)
    g = generate_gnp(GnpParams(n, p, mix_seed(seed, 0)))
    rng = np.random.Generator(np.random.PCG64(mix_seed(seed, 1)))
    rows = []
    for x, y in _sample_pairs(rng, n, pairs):
        measured = measure_symmdiff(g, x, y, i)
        ratio = measured / pred.value if pred.branch == "main" else None
        rows.append([x, y, measured, pred.value, ratio, pred.branch])
    ratios = [r[4] for r in rows if r[4] is not None]
    log_n = math.log(n)
    summary = {
        "n": n, "d": d, "i": i, "c": c, "predicted": pred.value, "branch": pred.branch,
        "median_ratio": statistics.median(ratios) if ratios else None,
        "dense_enough": d >= log_n ** 3,
        "note": ("d >= log^3 n holds" if d >= log_n ** 3 else
                 f"d={d:.4g} < log^3 n={log_n ** 3:.4g}: the estimate is outside its proven range here"),
    }
    return rows, summary


def predicted_diameter(n: int, d: float) -> int:
    """Smallest ``D`` with ``d**D / n - 2 log n > 0``."""
    D = 1
    while d ** D / n - 2 * math.log(n) <= 0:
        D += 1
        if D > n:
            break
    return D


def diameter_check(n: int, p: float, trials: int, seed: int, threads: int = 1) -> tuple[dict[str, int], dict[str, Any]]:
    """Histogram of diameters of ``trials`` seeded G(n, p) samples; ``"inf"`` counts disconnected ones."""
    if trials < 1:
        raise InvalidConfig("trials must be at least 1")
    d = p * n

    def one(t: int) -> int:
        return diameter(generate_gnp(GnpParams(n, p, mix_seed(seed, t))))

    values = run_trials(one, trials, threads)
    hist: dict[str, int] = {}
    for v in values:
        key = "inf" if v == UNREACHABLE else str(v)
        hist[key] = hist.get(key, 0) + 1
    hist = dict(sorted(hist.items(), key=lambda kv: (kv[0] == "inf", int(kv[0]) if kv[0] != "inf" else 0)))
    pred = predicted_diameter(n, d) if d > 1 else None
    summary = {"n": n, "p": p, "d": d, "trials": trials, "predicted": pred, "values": [
        None if v == UNREACHABLE else v for v in values]}
    if pred is not None:
        summary["margin_upper"] = d ** pred / n - 2 * math.log(n)
        summary["margin_lower"] = d ** (pred - 1) / n - 2 * math.log(n)
    return hist, summary


# -- exact small-graph solve ---------------------------------------------

def solve_small(g: Graph, budget: SolverBudget = SolverBudget(), oracle: bool = True) -> dict[str, Any]:
    """Localization number and metric dimension of a small graph, with an optional oracle cross-check."""
    if g.n > budget.n_max:
        raise BudgetExceeded(f"n={g.n} exceeds the exact-solver budget n_max={budget.n_max}; use Monte Carlo mode")
    zeta = localization_number(g, budget)
    beta = metric_dimension(g, budget)
    win = cop_wins(g, zeta, budget)
    report: dict[str, Any] = {
        "n": g.n, "m": g.m, "edge_hash": g.edge_hash(), "zeta": zeta, "beta": beta,
        "zeta_le_beta": zeta <= beta, "depth_bound": win.depth_bound,
        "states_explored": win.states_explored, "oracle_checked": False, "oracle_agrees": None,
    }
    if oracle and g.n <= 8:
        depth = 2 ** g.n
        agrees = naive_cop_wins_oracle(g, zeta, depth) is Verdict.COP_WINS
        if zeta > 1:
            agrees = agrees and naive_cop_wins_oracle(g, zeta - 1, depth) is Verdict.ROBBER_WINS
        report["oracle_checked"], report["oracle_agrees"] = True, agrees
    if zeta > beta:
        raise AssertionError(f"zeta={zeta} exceeds beta={beta}")
    return report


# -- persistence ---------------------------------------------------------

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def dump_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def build_manifest(config: dict[str, Any], summary: dict[str, Any], seeds: Sequence[int] = (),
                   tables: Sequence[str] = (), stamp: bool = False, started: float | None = None) -> dict[str, Any]:
    """Run manifest.  Timestamps are only recorded with ``stamp=True`` so reruns stay byte-identical."""
    return {
        "config": config,
        "version": __version__,
        "trial_seeds": list(seeds),
        "tables": sorted(f"{name}.csv" for name in tables),
        "summary": summary,
        "timestamps": {"started": started, "finished": time.time()} if stamp else None,
    }


def write_results(out_dir: str | Path, manifest: dict[str, Any],
                  tables: dict[str, tuple[Sequence[str], Sequence[Sequence[Any]]]]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in tables.items():
        (out / f"{name}.csv").write_text(format_csv(header, rows))
    (out / "manifest.json").write_text(dump_json(manifest))
    return out


def read_manifest(out_dir: str | Path) -> dict[str, Any]:
    return json.loads((Path(out_dir) / "manifest.json").read_text())
