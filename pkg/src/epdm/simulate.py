"""Run one trajectory to a stop condition and record it."""

import os
import time
from dataclasses import dataclass
from typing import Dict, Optional, TextIO

from .config import RunConfig
from .engine import Engine
from .trajectory import TrajectoryWriter


@dataclass
class SimulationSummary:
    seed: int
    reactions: int
    final_time: float
    final_propensity: float
    live_species: int
    wall_time: float

    def metadata(self, cfg: RunConfig) -> str:
        lines = [
            ("model", cfg.model),
            *sorted(cfg.params.items()),
            ("seed", self.seed),
            ("reactions", self.reactions),
            ("final_time", repr(self.final_time)),
            ("final_propensity", repr(self.final_propensity)),
            ("live_species", self.live_species),
            ("wall_time", f"{self.wall_time:.6f}"),
        ]
        return "".join(f"{k} = {v}\n" for k, v in lines)


def simulate(cfg: RunConfig, out: TextIO, seed: Optional[int] = None) -> SimulationSummary:
    """Run the engine per ``cfg`` and write the trajectory CSV to ``out``.

    Snapshots are written at t = 0, at every multiple of
    ``sample_interval`` reached, and at the end of the run.
    """
    seed = cfg.seed if seed is None else seed
    rules = cfg.rules()
    engine = Engine(rules, cfg.initial_state(rules), seed)
    writer = TrajectoryWriter(out)
    state: Dict[str, int] = engine.snapshot()
    writer.write(0.0, state)

    interval = cfg.sample_interval
    horizon = cfg.max_sim_time
    limit = cfg.max_reactions
    grid = 1
    started = time.perf_counter()
    while limit is None or engine.reaction_count < limit:
        event = engine.step(horizon)
        if event is None:
            break
        if interval is not None:
            while grid * interval < event.time:
                writer.write(grid * interval, state)
                grid += 1
        for specie, change in event.delta.items():
            n = state.get(specie, 0) + change
            if n:
                state[specie] = n
            else:
                del state[specie]
    wall = time.perf_counter() - started
    if interval is not None and horizon is not None and engine.t >= horizon:
        while grid * interval <= horizon:
            writer.write(grid * interval, state)
            grid += 1
    if writer.last != (engine.t, state):
        writer.write(engine.t, state)
    return SimulationSummary(seed, engine.reaction_count, engine.t, engine.a,
                             len(state), wall)


def run_simulate(cfg: RunConfig, path: Optional[str] = None, seed: Optional[int] = None,
                 metadata_path: Optional[str] = None) -> SimulationSummary:
    """Write the trajectory to ``path`` and a ``key = value`` sidecar beside it."""
    path = path or cfg.output or "trajectory.csv"
    with open(path, "w", newline="") as fh:
        summary = simulate(cfg, fh, seed)
    metadata_path = metadata_path or cfg.metadata or os.path.splitext(path)[0] + ".meta"
    with open(metadata_path, "w") as fh:
        fh.write(summary.metadata(cfg))
    return summary
