"""Gillespie's direct method over a fully enumerated reaction network.

This is the reference the partial-propensity engine is checked against,
and the O(M) per-step baseline for the scaling benchmarks. Every
propensity is recomputed from the counts on every step.
"""

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .engine import Event
from .errors import Exhausted, StructuralError
from .model import (
    VOID,
    ReactionKind,
    RuleSet,
    SpecieId,
    StoichiometryDelta,
    kinetic_kind,
    net_stoichiometry,
)


@dataclass
class ReactionChannel:
    mu: int
    rate: float
    kind: ReactionKind
    reagents: Tuple[SpecieId, SpecieId]
    delta: StoichiometryDelta


@dataclass
class StaticNetwork:
    species: List[SpecieId]
    channels: List[ReactionChannel]
    alpha: int = 0
    index: Dict[SpecieId, int] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return len(self.channels)


def enumerate_network(rules: RuleSet, universe: Sequence[SpecieId], closed: bool = True) -> StaticNetwork:
    """Ask the rule set about every unordered pair drawn from ``universe`` and the void.

    With ``closed`` set, a reaction producing a specie outside the
    universe raises ValueError. Open networks can list propensities but
    cannot be simulated.
    """
    species = [s for s in universe if s != VOID]
    if len(set(species)) != len(species):
        raise ValueError("universe lists a specie twice")
    known = set(species)
    pool = [VOID] + species
    channels: List[ReactionChannel] = []
    alpha = 0
    for i, a in enumerate(pool):
        for b in pool[i:]:
            specs = rules.generate(a, b)
            alpha = max(alpha, len(specs))
            kind = kinetic_kind(a, b)
            for spec in specs:
                delta = net_stoichiometry(kind, (a, b), spec)
                outside = [s for s in delta if s not in known]
                if outside and closed:
                    raise ValueError(f"reaction of {a!r}+{b!r} produces {outside} outside the universe")
                channels.append(ReactionChannel(len(channels), spec.rate, kind, (a, b), delta))
    return StaticNetwork(species, channels, alpha, {s: k for k, s in enumerate(species)})


def h_mu(kind: ReactionKind, n_first: int = 1, n_second: int = 1) -> int:
    """Number of distinct reagent combinations."""
    if n_first < 0 or n_second < 0:
        raise ValueError("counts must be nonnegative")
    if kind == ReactionKind.SOURCE:
        return 1
    if kind == ReactionKind.UNIMOLECULAR:
        return n_first
    if kind == ReactionKind.BIMOLECULAR_DISTINCT:
        return n_first * n_second
    return n_first * (n_first - 1) // 2


def channel_propensities(net: StaticNetwork, counts: Mapping[SpecieId, int]) -> List[float]:
    """a_mu = h_mu * c_mu for every channel, from a count mapping."""
    out = []
    for ch in net.channels:
        a, b = ch.reagents
        if ch.kind == ReactionKind.UNIMOLECULAR and a == VOID:
            a, b = b, a
        out.append(h_mu(ch.kind, counts.get(a, 0), counts.get(b, 0)) * ch.rate)
    return out


class DMState:
    """Counts, clock and generator of one direct-method trajectory."""

    def __init__(self, net: StaticNetwork, initial: Mapping[SpecieId, int] = None, seed: int = 0):
        self.net = net
        self.seed = seed
        self.rng = random.Random(seed)
        self.t = 0.0
        self.reaction_count = 0
        self.counts = [0] * len(net.species)
        if any(s not in net.index for ch in net.channels for s in ch.delta):
            raise ValueError("network is not closed under its reactions")
        for specie, n in (initial or {}).items():
            if n < 0:
                raise ValueError(f"count of {specie!r} is negative")
            self.counts[net.index[specie]] = n
        # (kind, first index, second index, rate, delta as index pairs)
        self._compiled = []
        for ch in net.channels:
            a, b = ch.reagents
            if ch.kind == ReactionKind.UNIMOLECULAR:
                a, b = (b, a) if a == VOID else (a, b)
            i = net.index[a] if a != VOID else -1
            j = net.index[b] if b != VOID else -1
            moves = tuple((net.index[s], d) for s, d in ch.delta.items())
            self._compiled.append((int(ch.kind), i, j, ch.rate, moves))

    def propensities(self) -> List[float]:
        n = self.counts
        out = []
        append = out.append
        for kind, i, j, c, _ in self._compiled:
            if kind == 2:
                append(n[i] * n[j] * c)
            elif kind == 3:
                k = n[i]
                append(0.5 * k * (k - 1) * c)
            elif kind == 1:
                append(n[i] * c)
            else:
                append(c)
        return out

    def snapshot(self) -> Dict[SpecieId, int]:
        return {s: n for s, n in zip(self.net.species, self.counts) if n}

    def apply(self, delta: Mapping[SpecieId, int]) -> None:
        index = self.net.index
        self._move(tuple((index[s], d) for s, d in delta.items()))

    def _move(self, moves) -> None:
        counts = self.counts
        for k, d in moves:
            v = counts[k] + d
            if v < 0:
                raise StructuralError(f"count of {self.net.species[k]!r} would become {v}")
            counts[k] = v

    def select(self, r2: float, props: Optional[List[float]] = None) -> int:
        """Index of the channel whose cumulative interval contains ``a * r2``."""
        if props is None:
            props = self.propensities()
        a = sum(props)
        if not a > 0:
            raise Exhausted("total propensity is zero")
        target = a * r2
        s = 0.0
        last = -1
        for mu, p in enumerate(props):
            if p > 0:
                last = mu
                s += p
                if target < s:
                    return mu
        return last


def dm_step(state: DMState, net: StaticNetwork = None, horizon: Optional[float] = None) -> Optional[Event]:
    """One direct-method step; None if exhausted or past ``horizon``."""
    if net is not None and net is not state.net:
        raise ValueError("state was built for a different network")
    props = state.propensities()
    a = sum(props)
    if not a > 0:
        return None
    rng = state.rng
    r1 = rng.random()
    if r1 == 0.0:
        r1 = 1.0
    r2 = rng.random()
    tau = math.log(1.0 / r1) / a
    if horizon is not None and state.t + tau > horizon:
        state.t = horizon
        return None
    mu = state.select(r2, props)
    channel = state.net.channels[mu]
    state._move(state._compiled[mu][4])
    state.t += tau
    state.reaction_count += 1
    a_, b_ = channel.reagents
    return Event(tau, state.t, a_, b_, channel.rate, dict(channel.delta))
