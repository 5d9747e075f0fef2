"""Expandable partial-propensity direct method.

Only species with a nonzero count are stored. The reactions possible
between each unordered pair of live species are grouped into a
:class:`Relation` owned by the earlier-added specie of the pair, and
the later one keeps a :class:`RelationAddress` pointing back at it. A
reaction is sampled in three stages (population, relation, reaction)
and each step costs O(alpha * N) for N live species and at most alpha
reactions per pair.

Populations, owned relations and relation addresses are kept in
insertion-ordered dicts keyed by specie id. Dicts give the ordered
traversal the sampler needs together with O(1) lookup and O(1) unlink,
and object references serve as stable handles.
"""

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import Exhausted, StructuralError
from .model import (
    VOID,
    ReactionKind,
    RuleSet,
    SpecieId,
    StoichiometryDelta,
    kinetic_kind,
    net_stoichiometry,
    partial_propensity_wrt_owner,
)

_DISTINCT = ReactionKind.BIMOLECULAR_DISTINCT
_IDENTICAL = ReactionKind.BIMOLECULAR_IDENTICAL
_UNIMOLECULAR = ReactionKind.UNIMOLECULAR

# A partial-propensity sum that falls below this fraction of its previous
# value is re-summed from its terms instead of trusted after subtraction.
_CANCELLATION = 1e-9

#: relative tolerance used by validate_structure
TOLERANCE = 1e-9


class ReactionRecord:
    """Rate constant, partial propensity w.r.t. the owner, and net delta.

    The reaction kind is that of the enclosing relation.
    """

    __slots__ = ("rate", "pi", "delta")

    def __init__(self, rate: float, delta: Tuple[Tuple[SpecieId, int], ...]):
        self.rate = rate
        self.pi = 0.0
        self.delta = delta

    def __repr__(self):
        return f"ReactionRecord(rate={self.rate}, pi={self.pi}, delta={dict(self.delta)})"


class Population:
    __slots__ = ("specie", "n", "lam", "sigma", "relations", "addresses")

    def __init__(self, specie: SpecieId, n: int):
        self.specie = specie
        self.n = n
        self.lam = 0.0
        self.sigma = 0.0
        # partner specie -> Relation owned by this population
        self.relations: Dict[SpecieId, Relation] = {}
        # owner specie -> RelationAddress of a relation this specie joins
        self.addresses: Dict[SpecieId, RelationAddress] = {}

    def __repr__(self):
        return f"Population({self.specie!r}, n={self.n}, lam={self.lam}, sigma={self.sigma})"


class Relation:
    __slots__ = ("owner", "partner", "kind", "reactions", "psi", "back_address")

    def __init__(self, owner: Population, partner: Population, kind: ReactionKind,
                 reactions: List[ReactionRecord]):
        self.owner = owner
        self.partner = partner
        self.kind = kind
        self.reactions = reactions
        self.psi = 0.0
        self.back_address: Optional[RelationAddress] = None

    def refresh(self) -> float:
        """Recompute every partial propensity and the sum from counts."""
        kind = self.kind
        if kind == _DISTINCT or kind == _UNIMOLECULAR:
            factor = self.partner.n
        elif kind == _IDENTICAL:
            n = self.owner.n
            factor = 0.5 * (n - 1) if n > 0 else 0.0
        else:
            factor = 1.0
        psi = 0.0
        for record in self.reactions:
            pi = record.pi = factor * record.rate
            psi += pi
        self.psi = psi
        return psi

    def __repr__(self):
        return (f"Relation({self.owner.specie!r}->{self.partner.specie!r}, "
                f"{self.kind.name}, psi={self.psi})")


class RelationAddress:
    """Back-handle kept by the non-owner participant of a relation.

    ``holder`` is the dict that contains this address and ``key`` its
    key there, which makes removal O(1).
    """

    __slots__ = ("relation", "owner_population", "holder", "key")

    def __init__(self, relation: Relation, owner_population: Population,
                 holder: Dict[SpecieId, "RelationAddress"], key: SpecieId):
        self.relation = relation
        self.owner_population = owner_population
        self.holder = holder
        self.key = key


@dataclass
class Event:
    """A fired reaction. ``time`` is the clock after the event."""

    tau: float
    time: float
    owner: SpecieId
    partner: SpecieId
    rate: float
    delta: StoichiometryDelta


class Engine:
    """Exact stochastic simulator over a dynamically growing species set.

    Parameters
    ----------
    rules : RuleSet
        Source of the reactions between any two species.
    initial : iterable of (specie, count)
        Starting populations, all counts >= 1, no duplicates, no void.
    seed : int
        Seed of the uniform generator (Mersenne Twister).
    """

    def __init__(self, rules: RuleSet, initial: Iterable[Tuple[SpecieId, int]] = (), seed: int = 0):
        self.rules = rules
        self.seed = seed
        self.rng = random.Random(seed)
        self.populations: Dict[SpecieId, Population] = {}
        self.a = 0.0
        self.t = 0.0
        self.reaction_count = 0
        initial = list(initial)
        seen = set()
        for specie, n in initial:
            if specie == VOID:
                raise ValueError("initial state must not list the void specie")
            if specie in seen:
                raise StructuralError(f"duplicate initial specie {specie!r}")
            if n < 1:
                raise ValueError(f"initial count of {specie!r} must be >= 1, got {n}")
            seen.add(specie)
        self.add_population(VOID, 1)
        for specie, n in initial:
            self.add_population(specie, n)

    # -- structure maintenance -------------------------------------------

    def add_population(self, specie: SpecieId, n: int) -> Population:
        """Append a population and build its relations with every live specie."""
        if specie in self.populations:
            raise StructuralError(f"specie {specie!r} is already live")
        if n < 1:
            raise ValueError(f"a new population needs a positive count, got {n}")
        new = Population(specie, n)
        self.populations[specie] = new
        generate = self.rules.generate
        for owner in list(self.populations.values()):
            specs = generate(specie, owner.specie)
            if not specs:
                continue
            kind = kinetic_kind(owner.specie, specie)
            pair = (owner.specie, specie)
            records = [ReactionRecord(s.rate, tuple(net_stoichiometry(kind, pair, s).items()))
                       for s in specs]
            relation = Relation(owner, new, kind, records)
            owner.relations[specie] = relation
            owner.lam += relation.refresh()
            owner.sigma = owner.n * owner.lam
            address = RelationAddress(relation, owner, new.addresses, owner.specie)
            new.addresses[owner.specie] = address
            relation.back_address = address
        self.a = self._total()
        return new

    def delete_population(self, population: Population) -> None:
        """Unlink a population whose count dropped to zero."""
        if population.specie == VOID:
            raise ValueError("the void population cannot be deleted")
        if population.n != 0:
            raise ValueError(f"cannot delete {population.specie!r} with count {population.n}")
        if self.populations.get(population.specie) is not population:
            raise StructuralError(f"population {population.specie!r} is not live")
        for relation in population.relations.values():
            address = relation.back_address
            del address.holder[address.key]
        for address in population.addresses.values():
            del address.owner_population.relations[population.specie]
        population.relations.clear()
        population.addresses.clear()
        del self.populations[population.specie]

    def _total(self) -> float:
        return sum([p.sigma for p in self.populations.values()])

    # -- sampling ---------------------------------------------------------

    def sample_tau(self, r1: float) -> float:
        """Waiting time to the next reaction for a uniform ``r1`` in (0, 1]."""
        if not self.a > 0:
            raise Exhausted("total propensity is zero")
        return math.log(1.0 / r1) / self.a

    def sample_reaction(self, r2: float) -> Tuple[Population, Relation, ReactionRecord]:
        """Pick a reaction with probability proportional to its propensity.

        ``r2`` is uniform in [0, 1). The population stage accumulates
        forward sums; the relation and reaction stages subtract from a
        residual scaled by the selected population's count. A residual
        that overruns the last element because of rounding falls back
        to the last element with positive propensity.
        """
        if not self.a > 0:
            raise Exhausted("total propensity is zero")
        target = self.a * r2
        chosen = None
        last = None
        s = 0.0
        for population in self.populations.values():
            sigma = population.sigma
            if sigma > 0:
                last = population
                upper = s + sigma
                if target < upper:
                    chosen = population
                    break
                s = upper
        if chosen is None:
            if last is None:
                raise StructuralError("positive total propensity but no population can react")
            chosen = last
            g = chosen.lam
        else:
            g = (target - s) / chosen.n

        relation = last_relation = None
        for candidate in chosen.relations.values():
            psi = candidate.psi
            if psi > 0:
                last_relation = candidate
                if g < psi:
                    relation = candidate
                    break
                g -= psi
        if relation is None:
            if last_relation is None:
                raise StructuralError(f"population {chosen.specie!r} has sigma > 0 but no reactions")
            relation = last_relation
            g = relation.psi

        record = last_record = None
        for candidate in relation.reactions:
            pi = candidate.pi
            if pi > 0:
                last_record = candidate
                if g < pi:
                    record = candidate
                    break
                g -= pi
        if record is None:
            if last_record is None:
                raise StructuralError(f"{relation!r} has psi > 0 but no reactions")
            record = last_record
        return chosen, relation, record

    # -- update -------------------------------------------------------------

    def apply_reaction(self, record: ReactionRecord) -> None:
        """Apply a reaction's net delta, then purge extinct species."""
        populations = self.populations
        for specie, change in record.delta:
            population = populations.get(specie)
            if population is None:
                if change < 0:
                    raise StructuralError(f"reaction consumes {specie!r}, which is not live")
                self.add_population(specie, change)
                continue
            n = population.n + change
            if n < 0:
                raise StructuralError(f"count of {specie!r} would become {n}")
            population.n = n
            population.sigma = n * population.lam
            for address in population.addresses.values():
                relation = address.relation
                owner = address.owner_population
                old = relation.psi
                lam = owner.lam - old + relation.refresh()
                if lam < 0 or lam < _CANCELLATION * owner.lam:
                    lam = math.fsum(r.psi for r in owner.relations.values())
                owner.lam = lam
                owner.sigma = owner.n * lam
        # only species named in the delta can have reached zero
        for specie, change in record.delta:
            if change < 0:
                population = populations.get(specie)
                if population is not None and population.n == 0:
                    self.delete_population(population)
        self.a = self._total()

    def step(self, horizon: Optional[float] = None) -> Optional[Event]:
        """Fire one reaction and return it.

        Returns None when no reaction is possible, or when ``horizon`` is
        given and the next event would happen after it; in the latter
        case the clock is advanced to ``horizon``.
        """
        if not self.a > 0:
            return None
        rng = self.rng
        r1 = rng.random()
        if r1 == 0.0:
            r1 = 1.0
        r2 = rng.random()
        tau = self.sample_tau(r1)
        if horizon is not None and self.t + tau > horizon:
            self.t = horizon
            return None
        owner, relation, record = self.sample_reaction(r2)
        event = Event(tau, self.t + tau, owner.specie, relation.partner.specie,
                      record.rate, dict(record.delta))
        self.apply_reaction(record)
        self.t += tau
        self.reaction_count += 1
        return event

    @property
    def exhausted(self) -> bool:
        return not self.a > 0

    # -- inspection -----------------------------------------------------------

    def snapshot(self) -> Dict[SpecieId, int]:
        """Counts of all live non-void species."""
        return {s: p.n for s, p in self.populations.items() if s != VOID}

    def channels(self) -> List[Tuple[SpecieId, SpecieId, float, StoichiometryDelta, float]]:
        """Every stored reaction as ``(owner, partner, rate, delta, propensity)``.

        The propensity is the owner's count times the stored partial
        propensity.
        """
        out = []
        for owner in self.populations.values():
            for relation in owner.relations.values():
                for record in relation.reactions:
                    out.append((owner.specie, relation.partner.specie, record.rate,
                                dict(record.delta), owner.n * record.pi))
        return out

    def validate_structure(self) -> List[str]:
        """Check every stored sum and link against a from-scratch recomputation.

        Returns a list of human-readable violations; empty means valid.
        """
        problems: List[str] = []
        populations = self.populations
        order = {s: i for i, s in enumerate(populations)}
        if not populations or next(iter(populations)) != VOID:
            problems.append("void population is not first")
        elif populations[VOID].n != 1:
            problems.append(f"void population has count {populations[VOID].n}")

        total = []
        for key, p in populations.items():
            if p.specie != key:
                problems.append(f"population stored under {key!r} has specie {p.specie!r}")
            if p.specie != VOID and p.n < 1:
                problems.append(f"live population {p.specie!r} has count {p.n}")
            psis = []
            for partner_id, rel in p.relations.items():
                name = f"relation {p.specie!r}->{partner_id!r}"
                partner = rel.partner
                if rel.owner is not p:
                    problems.append(f"{name}: owner link is wrong")
                if partner.specie != partner_id or populations.get(partner_id) is not partner:
                    problems.append(f"{name}: partner is not a live population")
                    continue
                if order[partner_id] < order[key]:
                    problems.append(f"{name}: owner was added after partner")
                if rel.kind != kinetic_kind(p.specie, partner_id):
                    problems.append(f"{name}: wrong kind {rel.kind.name}")
                ra = rel.back_address
                if (ra is None or ra.relation is not rel or ra.owner_population is not p
                        or ra.key != p.specie or ra.holder is not partner.addresses
                        or partner.addresses.get(ra.key) is not ra):
                    problems.append(f"{name}: broken back address")
                pis = []
                for k, record in enumerate(rel.reactions):
                    exact = partial_propensity_wrt_owner(rel.kind, record.rate, p.n, partner.n)
                    if not _close(record.pi, exact):
                        problems.append(f"{name} reaction {k}: pi={record.pi!r}, expected {exact!r}")
                    pis.append(exact)
                psi = math.fsum(pis)
                if not _close(rel.psi, psi):
                    problems.append(f"{name}: psi={rel.psi!r}, expected {psi!r}")
                psis.append(psi)
            for owner_id, ra in p.addresses.items():
                owner = populations.get(owner_id)
                if (owner is None or ra.owner_population is not owner or ra.key != owner_id
                        or ra.holder is not p.addresses
                        or owner.relations.get(p.specie) is not ra.relation
                        or ra.relation.partner is not p):
                    problems.append(f"address {p.specie!r}<-{owner_id!r}: dangling")
            lam = math.fsum(psis)
            if not _close(p.lam, lam):
                problems.append(f"population {p.specie!r}: lambda={p.lam!r}, expected {lam!r}")
            sigma = p.n * lam
            if not _close(p.sigma, sigma):
                problems.append(f"population {p.specie!r}: sigma={p.sigma!r}, expected {sigma!r}")
            total.append(sigma)
        a = math.fsum(total)
        if not _close(self.a, a):
            problems.append(f"total propensity a={self.a!r}, expected {a!r}")
        return problems


def _close(stored: float, exact: float) -> bool:
    return stored == exact or abs(stored - exact) <= TOLERANCE * max(abs(stored), abs(exact))
