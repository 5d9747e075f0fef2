"""Species, reaction kinds and mass-action propensity formulas.

Every reaction has at most two reagents. Source and unimolecular
reactions are recast as pair reactions with the void specie, a virtual
specie with a fixed count of one that never changes. Both simulation
engines share the formulas in this module.
"""

import abc
import enum
from collections.abc import Mapping as _MappingABC
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

#: Specie identifiers are plain strings; the empty string is the void specie.
SpecieId = str
VOID: SpecieId = ""

StoichiometryDelta = Dict[SpecieId, int]


class ReactionKind(enum.IntEnum):
    SOURCE = 0
    UNIMOLECULAR = 1
    BIMOLECULAR_DISTINCT = 2
    BIMOLECULAR_IDENTICAL = 3


def kinetic_kind(a: SpecieId, b: SpecieId) -> ReactionKind:
    """Classify the unordered reagent pair ``{a, b}``."""
    if a == VOID:
        return ReactionKind.SOURCE if b == VOID else ReactionKind.UNIMOLECULAR
    if b == VOID:
        return ReactionKind.UNIMOLECULAR
    if a == b:
        return ReactionKind.BIMOLECULAR_IDENTICAL
    return ReactionKind.BIMOLECULAR_DISTINCT


@dataclass(frozen=True)
class ReactionSpec:
    """One reaction produced by a rule set for a given reagent pair.

    ``products`` may be given as a mapping or as an iterable of
    ``(specie, multiplicity)`` pairs; repeated species are summed and
    the result is sorted by specie.
    Reagents are implied by the pair the rule set was asked about.
    """

    rate: float
    products: Tuple[Tuple[SpecieId, int], ...] = field(default=())

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"rate constant must be nonnegative, got {self.rate!r}")
        products = self.products
        items = products.items() if isinstance(products, (dict, _MappingABC)) else products
        merged: Dict[SpecieId, int] = {}
        for specie, mult in items:
            if specie == VOID:
                raise ValueError("the void specie cannot be a product")
            if int(mult) != mult or mult < 1:
                raise ValueError(f"product multiplicity must be a positive integer, got {mult!r}")
            merged[specie] = merged.get(specie, 0) + int(mult)
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "products", tuple(sorted(merged.items())))


class RuleSet(abc.ABC):
    """Generator of the reactions possible between two species.

    Subclasses implement :meth:`generate`. It must be deterministic and
    order-insensitive: ``generate(a, b)`` and ``generate(b, a)`` describe
    the same reactions. Engines call it once per unordered pair.
    """

    #: model parameters, for reporting
    parameters: Mapping[str, object] = {}

    @abc.abstractmethod
    def generate(self, a: SpecieId, b: SpecieId) -> List[ReactionSpec]:
        ...

    def universe(self) -> Optional[List[SpecieId]]:
        """All species the model can ever produce, or None if unbounded."""
        return None

    def initial_state(self) -> List[Tuple[SpecieId, int]]:
        """Default starting populations."""
        return []

    def reaction_count(self) -> Optional[int]:
        """Number of reaction channels in the enumerated network, if finite."""
        return None


def _check_counts(*counts):
    for n in counts:
        if n < 0:
            raise ValueError(f"molecular counts must be nonnegative, got {n}")


def full_propensity(kind: ReactionKind, c: float, n_first: int = 1, n_second: int = 1) -> float:
    """Mass-action propensity of a single reaction.

    For unimolecular reactions ``n_first`` is the count of the real
    reagent; both counts are ignored for source reactions.
    """
    _check_counts(n_first, n_second)
    if kind == ReactionKind.BIMOLECULAR_DISTINCT:
        return n_first * n_second * c
    if kind == ReactionKind.BIMOLECULAR_IDENTICAL:
        return 0.5 * n_first * (n_first - 1) * c
    if kind == ReactionKind.UNIMOLECULAR:
        return n_first * c
    return c


def partial_propensity_wrt_owner(kind: ReactionKind, c: float, n_owner: int, n_partner: int) -> float:
    """Propensity divided by the owner's count, evaluated without 0/0.

    Unimolecular reactions are owned by the void specie, so their
    partial propensity is ``n_partner * c``, where the partner is the
    real reagent. That keeps ``count(void) * sum == full propensity``.
    """
    _check_counts(n_owner, n_partner)
    if kind == ReactionKind.BIMOLECULAR_DISTINCT:
        return n_partner * c
    if kind == ReactionKind.BIMOLECULAR_IDENTICAL:
        return 0.5 * (n_owner - 1) * c if n_owner > 0 else 0.0
    if kind == ReactionKind.UNIMOLECULAR:
        return n_partner * c
    return c


def net_stoichiometry(kind: ReactionKind, pair: Tuple[SpecieId, SpecieId],
                      spec: Union[ReactionSpec, Iterable]) -> StoichiometryDelta:
    """Net count change of a reaction: products minus reagents.

    Void entries and species whose net change is zero are dropped.
    """
    a, b = pair
    if kinetic_kind(a, b) != kind:
        raise ValueError(f"pair {pair!r} is not of kind {kind.name}")
    products = spec.products if isinstance(spec, ReactionSpec) else ReactionSpec(0.0, spec).products
    delta: Dict[SpecieId, int] = {}
    if kind == ReactionKind.UNIMOLECULAR:
        delta[a if a != VOID else b] = -1
    elif kind == ReactionKind.BIMOLECULAR_IDENTICAL:
        delta[a] = -2
    elif kind == ReactionKind.BIMOLECULAR_DISTINCT:
        delta[a] = -1
        delta[b] = -1
    for specie, mult in products:
        if specie == VOID:
            raise ValueError("the void specie cannot be a product")
        delta[specie] = delta.get(specie, 0) + mult
    return {s: d for s, d in delta.items() if d != 0}
