"""CPU time per reaction as a function of the number of species.

Each (engine, N, replicate) cell builds a fresh system, then times only
the reaction loop with a monotonic clock. Per-N means and a log-log
slope per engine are reported alongside the raw rows.
"""

import csv
import math
import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from .config import RunConfig
from .engine import Engine
from .oracle import DMState, dm_step, enumerate_network
from .validation import replicate_seeds

BENCH_HEADER = ("engine", "N", "M", "replicate", "reactions", "sec_per_reaction")

# clock reads happen once per this many reactions when a timeout is set
_CLOCK_STRIDE = 64


@dataclass
class BenchRow:
    engine: str
    N: int
    M: Optional[int]
    replicate: object  # int, or "mean" for summary rows
    reactions: int
    sec_per_reaction: Optional[float]

    def cells(self):
        return (self.engine, self.N, "" if self.M is None else self.M, self.replicate,
                self.reactions, "" if self.sec_per_reaction is None else repr(self.sec_per_reaction))


@dataclass
class BenchResult:
    rows: List[BenchRow]
    means: List[BenchRow]
    slopes: Dict[str, Optional[float]]

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        for row in self.rows + self.means:
            writer.writerow(row.cells())


def loglog_slope(sizes: Sequence[float], times: Sequence[Optional[float]]) -> Optional[float]:
    """Least-squares slope of log(time) against log(size); None if undefined."""
    pts = [(math.log(n), math.log(t)) for n, t in zip(sizes, times) if t is not None and t > 0]
    if len({x for x, _ in pts}) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def _time_loop(step, limit: int, timeout: Optional[float]):
    """Run ``step`` up to ``limit`` times; return (reactions, seconds, timed_out)."""
    done = 0
    start = time.perf_counter()
    if timeout is None:
        while done < limit and step():
            done += 1
        return done, time.perf_counter() - start, False
    while done < limit:
        if not step():
            break
        done += 1
        if done % _CLOCK_STRIDE == 0 and time.perf_counter() - start > timeout:
            return done, time.perf_counter() - start, True
    elapsed = time.perf_counter() - start
    return done, elapsed, elapsed > timeout


def bench_cell(cfg: RunConfig, engine_name: str, N: int, seed: int):
    """One timed replicate. Returns (live species, M, reactions, sec/reaction)."""
    rules = cfg.rules(N=N)
    initial = cfg.initial_state(rules)
    limit = cfg.max_reactions if cfg.max_reactions is not None else 0
    if engine_name == "epdm":
        engine = Engine(rules, initial, seed)
        live = len(engine.populations) - 1
        M = rules.reaction_count()
        horizon = cfg.max_sim_time
        step = lambda: engine.step(horizon) is not None  # noqa: E731
    elif engine_name == "dm":
        net = enumerate_network(rules, rules.universe())
        state = DMState(net, dict(initial), seed)
        live = sum(1 for n in state.counts if n)
        M = net.M
        horizon = cfg.max_sim_time
        step = lambda: dm_step(state, horizon=horizon) is not None  # noqa: E731
    else:
        raise ValueError(f"unknown engine {engine_name!r}")
    if limit == 0 and cfg.max_reactions is None:
        limit = 1 << 62
    reactions, elapsed, timed_out = _time_loop(step, limit, cfg.timeout)
    per = None if timed_out or reactions == 0 else elapsed / reactions
    return live, M, reactions, per


def run_bench(cfg: RunConfig, engines: Optional[Iterable[str]] = None,
              sizes: Optional[Sequence[int]] = None, seed: Optional[int] = None,
              progress=None) -> BenchResult:
    engines = list(engines or cfg.engines)
    sizes = list(sizes or cfg.sizes or [int(cfg.params["N"])])
    seed = cfg.seed if seed is None else seed
    seeds = replicate_seeds(seed, cfg.replicates)
    rows: List[BenchRow] = []
    means: List[BenchRow] = []
    slopes: Dict[str, Optional[float]] = {}
    for name in engines:
        mean_times = []
        for N in sizes:
            cell_rows = []
            for rep in range(cfg.replicates):
                live, M, reactions, per = bench_cell(cfg, name, N, seeds[rep])
                row = BenchRow(name, live, M, rep, reactions, per)
                cell_rows.append(row)
                if progress is not None:
                    progress(row)
            rows.extend(cell_rows)
            valid = [r.sec_per_reaction for r in cell_rows if r.sec_per_reaction is not None]
            mean = sum(valid) / len(valid) if valid else None
            mean_times.append(mean)
            live = cell_rows[0].N if cell_rows else N
            M = cell_rows[0].M if cell_rows else None
            total = sum(r.reactions for r in cell_rows)
            means.append(BenchRow(name, live, M, "mean", total, mean))
        slopes[name] = loglog_slope(sizes, mean_times)
    return BenchResult(rows, means, slopes)
