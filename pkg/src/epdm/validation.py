"""Statistical agreement between the partial-propensity engine and the direct method."""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .config import RunConfig
from .engine import Engine
from .errors import ConfigError
from .oracle import DMState, channel_propensities, dm_step, enumerate_network

ChannelKey = Tuple[Tuple[str, str], float, Tuple[Tuple[str, int], ...]]


def replicate_seeds(seed: int, count: int) -> List[int]:
    """Independent 64-bit seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def channel_key(a: str, b: str, rate: float, delta: Mapping[str, int]) -> ChannelKey:
    return (tuple(sorted((a, b))), rate, tuple(sorted(delta.items())))


def pooled_bins(left: Sequence[int], right: Sequence[int], min_expected: float = 5.0) -> np.ndarray:
    """2 x K contingency table of two samples of integers.

    Adjacent values are merged until every expected cell count is at
    least ``min_expected``.
    """
    lc, rc = Counter(left), Counter(right)
    nl, nr = len(left), len(right)
    total = nl + nr
    frac = min(nl, nr) / total
    columns: List[List[int]] = []
    cur = [0, 0]
    for v in sorted(set(lc) | set(rc)):
        cur[0] += lc[v]
        cur[1] += rc[v]
        if (cur[0] + cur[1]) * frac >= min_expected:
            columns.append(cur)
            cur = [0, 0]
    if cur[0] + cur[1]:
        if columns:
            columns[-1][0] += cur[0]
            columns[-1][1] += cur[1]
        else:
            columns.append(cur)
    return np.array(columns, dtype=float).T


def two_sample_chi2(left: Sequence[int], right: Sequence[int]) -> float:
    """p-value of a chi-square homogeneity test; 1.0 if there is one bin."""
    table = pooled_bins(left, right)
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table, correction=False)[1])


def expected_channel_probabilities(rules, state: Mapping[str, int]) -> Dict[ChannelKey, float]:
    """Direct-method selection probabilities of every channel in ``state``."""
    net = enumerate_network(rules, list(state), closed=False)
    props = channel_propensities(net, state)
    a = math.fsum(props)
    probs: Dict[ChannelKey, float] = {}
    for ch, p in zip(net.channels, props):
        if p > 0:
            key = channel_key(*ch.reagents, ch.rate, ch.delta)
            probs[key] = probs.get(key, 0.0) + p / a
    return probs


def frozen_sampling_test(engine: Engine, draws: int, seed: int) -> Tuple[float, Dict[ChannelKey, int]]:
    """Draw reactions from a frozen engine and test them against the direct method.

    Returns the chi-square goodness-of-fit p-value and the tallies.
    """
    rng = np.random.default_rng(seed)
    tally: Counter = Counter()
    for r2 in rng.random(draws):
        owner, relation, record = engine.sample_reaction(float(r2))
        tally[channel_key(owner.specie, relation.partner.specie, record.rate,
                          dict(record.delta))] += 1
    expected = expected_channel_probabilities(engine.rules, engine.snapshot())
    unexpected = set(tally) - set(expected)
    if unexpected:
        return 0.0, dict(tally)
    keys = sorted(expected)
    if len(keys) < 2:
        return 1.0, dict(tally)
    observed = np.array([tally[k] for k in keys], dtype=float)
    exp = np.array([expected[k] for k in keys]) * draws
    exp *= observed.sum() / exp.sum()
    return float(stats.chisquare(observed, exp).pvalue), dict(tally)


def final_counts_epdm(rules, initial, horizon: float, seeds: Sequence[int]) -> List[Dict[str, int]]:
    out = []
    for s in seeds:
        engine = Engine(rules, initial, s)
        while engine.step(horizon) is not None:
            pass
        out.append(engine.snapshot())
    return out


def final_counts_dm(rules, initial, horizon: float, seeds: Sequence[int],
                    universe: Sequence[str]) -> List[Dict[str, int]]:
    net = enumerate_network(rules, universe)
    out = []
    for s in seeds:
        state = DMState(net, dict(initial), s)
        while dm_step(state, horizon=horizon) is not None:
            pass
        out.append(state.snapshot())
    return out


@dataclass
class ValidationReport:
    species_p: Dict[str, float]
    threshold: float
    sampling_p: Optional[float]
    sampling_threshold: float
    replicates: int
    horizon: float
    notes: List[str] = field(default_factory=list)

    @property
    def corrected_threshold(self) -> float:
        return self.threshold / max(1, len(self.species_p))

    @property
    def passed(self) -> bool:
        ok = all(p > self.corrected_threshold for p in self.species_p.values())
        if self.sampling_p is not None:
            ok = ok and self.sampling_p > self.sampling_threshold
        return ok

    def render(self) -> str:
        lines = [f"replicates = {self.replicates}", f"horizon = {self.horizon!r}",
                 f"threshold = {self.threshold!r}",
                 f"corrected_threshold = {self.corrected_threshold!r}"]
        for specie, p in sorted(self.species_p.items()):
            lines.append(f"p[{specie}] = {p:.6g}")
        if self.sampling_p is not None:
            lines.append(f"sampling_p = {self.sampling_p:.6g}")
        lines.extend(f"note = {n}" for n in self.notes)
        lines.append(f"result = {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"


def run_validate(cfg: RunConfig, seed: Optional[int] = None, dm_seed: Optional[int] = None) -> ValidationReport:
    """Compare count marginals at the horizon between the two engines.

    Also checks reaction-selection frequencies in the initial state
    against the analytic propensities.
    """
    seed = cfg.seed if seed is None else seed
    if dm_seed is None:
        dm_seed = cfg.dm_seed if cfg.dm_seed is not None else seed + 1
    if dm_seed == seed:
        raise ConfigError("the two engines need independent seeds; set dm_seed != seed")
    if cfg.max_sim_time is None:
        raise ConfigError("validation needs max_sim_time as the comparison horizon")
    rules = cfg.rules()
    universe = rules.universe()
    if universe is None or len(universe) > cfg.max_universe:
        size = "unbounded" if universe is None else len(universe)
        raise ConfigError(f"species universe too large to enumerate ({size} > {cfg.max_universe})")
    initial = cfg.initial_state(rules)
    horizon = cfg.max_sim_time
    R = cfg.replicates

    epdm = final_counts_epdm(rules, initial, horizon, replicate_seeds(seed, R))
    dm = final_counts_dm(rules, initial, horizon, replicate_seeds(dm_seed, R), universe)
    species_p = {}
    for specie in universe:
        species_p[specie] = two_sample_chi2([c.get(specie, 0) for c in epdm],
                                            [c.get(specie, 0) for c in dm])

    sampling_p = None
    notes = []
    engine = Engine(rules, initial, seed)
    if engine.a > 0 and cfg.draws > 0:
        sampling_p, _ = frozen_sampling_test(engine, cfg.draws, seed)
    else:
        notes.append("initial state has no possible reaction; sampling check skipped")
    return ValidationReport(species_p, cfg.threshold, sampling_p, cfg.sampling_threshold,
                            R, horizon, notes)
