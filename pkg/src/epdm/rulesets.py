"""Built-in rule sets.

* ``colliding``: N particle species that collide elastically,
  ``P<i> + P<j> -> P<i> + P<j>`` at rate k. Tokens are ``P1`` .. ``PN``.
* ``colored``: N particle types with a color that advances on every
  collision, ``P<i>.<a> + P<j>.<b> -> P<i>.<a+1> + P<j>.<b+1>``, wrapping
  from color Omega back to color 1. Tokens are ``P<type>.<color>``,
  both 1-based.
* ``birth_death_dimer``: ``0 -> A`` (b), ``A -> 0`` (d), ``2A -> B`` (c),
  ``B -> 2A`` (u). Small and enumerable, covers all four reaction kinds.

:class:`ReactionTable` wraps an explicit finite network.
"""

import re
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import RuleError
from .model import VOID, ReactionSpec, RuleSet, SpecieId

_COLLIDING_TOKEN = re.compile(r"P([1-9][0-9]*)")
_COLORED_TOKEN = re.compile(r"P([1-9][0-9]*)\.([1-9][0-9]*)")


class ModelRuleSet(RuleSet):
    """Rule set built from a flat parameter map, as read from a config file."""

    name = ""
    #: parameter name -> (type, default); a default of None means required
    param_types: Dict[str, Tuple[type, object]] = {}

    @classmethod
    def from_params(cls, params: Mapping[str, object]) -> "ModelRuleSet":
        unknown = set(params) - set(cls.param_types)
        if unknown:
            raise ValueError(f"unknown parameters for model {cls.name!r}: {sorted(unknown)}")
        kwargs = {}
        for key, (typ, default) in cls.param_types.items():
            if key in params:
                kwargs[key] = typ(params[key])
            elif default is None:
                raise ValueError(f"model {cls.name!r} requires parameter {key!r}")
        return cls(**kwargs)


class CollidingParticles(ModelRuleSet):
    name = "colliding"
    param_types = {"N": (int, None), "k": (float, 0.5), "n0": (int, 50)}

    def __init__(self, N: int, k: float = 0.5, n0: int = 50):
        if N < 1 or k < 0 or n0 < 1:
            raise ValueError("colliding particles needs N >= 1, k >= 0, n0 >= 1")
        self.N, self.k, self.n0 = N, float(k), n0
        self.parameters = {"N": N, "k": self.k, "n0": n0}
        self._parse = lru_cache(maxsize=None)(self._parse_token)

    def _parse_token(self, token: SpecieId) -> int:
        m = _COLLIDING_TOKEN.fullmatch(token)
        if m is None or int(m.group(1)) > self.N:
            raise RuleError(f"not a colliding-particles specie: {token!r}")
        return int(m.group(1))

    def generate(self, a: SpecieId, b: SpecieId) -> List[ReactionSpec]:
        if a == VOID or b == VOID:
            return []
        self._parse(a)
        self._parse(b)
        return [ReactionSpec(self.k, ((a, 1), (b, 1)))]

    def universe(self) -> List[SpecieId]:
        return [f"P{i}" for i in range(1, self.N + 1)]

    def initial_state(self) -> List[Tuple[SpecieId, int]]:
        return [(s, self.n0) for s in self.universe()]

    def reaction_count(self) -> int:
        return self.N * (self.N + 1) // 2


class ColoredParticles(ModelRuleSet):
    name = "colored"
    param_types = {"N": (int, None), "Omega": (int, None), "k": (float, 1.0),
                   "initial_color": (int, 1)}

    def __init__(self, N: int, Omega: int, k: float = 1.0, initial_color: int = 1):
        if N < 1 or Omega < 2 or k < 0:
            raise ValueError("colored particles needs N >= 1, Omega >= 2, k >= 0")
        if not 1 <= initial_color <= Omega:
            raise ValueError(f"initial_color must lie in [1, {Omega}]")
        self.N, self.Omega, self.k, self.initial_color = N, Omega, float(k), initial_color
        self.parameters = {"N": N, "Omega": Omega, "k": self.k, "initial_color": initial_color}
        self._successor = lru_cache(maxsize=1 << 16)(self._successor_of)

    def _successor_of(self, token: SpecieId) -> SpecieId:
        m = _COLORED_TOKEN.fullmatch(token)
        if m is None:
            raise RuleError(f"not a colored-particles specie: {token!r}")
        kind, color = int(m.group(1)), int(m.group(2))
        if kind > self.N or color > self.Omega:
            raise RuleError(f"colored-particles specie out of range: {token!r}")
        return f"P{kind}.{color % self.Omega + 1}"

    def generate(self, a: SpecieId, b: SpecieId) -> List[ReactionSpec]:
        if a == VOID or b == VOID:
            return []
        return [ReactionSpec(self.k, ((self._successor(a), 1), (self._successor(b), 1)))]

    def universe(self) -> List[SpecieId]:
        return [f"P{i}.{c}" for i in range(1, self.N + 1) for c in range(1, self.Omega + 1)]

    def initial_state(self) -> List[Tuple[SpecieId, int]]:
        return [(f"P{i}.{self.initial_color}", 1) for i in range(1, self.N + 1)]

    def reaction_count(self) -> int:
        size = self.N * self.Omega
        return size * (size + 1) // 2


class BirthDeathDimer(ModelRuleSet):
    name = "birth_death_dimer"
    param_types = {"b": (float, None), "d": (float, None), "c": (float, 0.0),
                   "u": (float, 0.0), "A0": (int, 0), "B0": (int, 0)}

    def __init__(self, b: float, d: float, c: float = 0.0, u: float = 0.0, A0: int = 0, B0: int = 0):
        if min(b, d, c, u) < 0 or min(A0, B0) < 0:
            raise ValueError("rates and initial counts must be nonnegative")
        self.b, self.d, self.c, self.u = float(b), float(d), float(c), float(u)
        self.A0, self.B0 = A0, B0
        self.parameters = {"b": self.b, "d": self.d, "c": self.c, "u": self.u, "A0": A0, "B0": B0}
        self._table = ReactionTable({
            (VOID, VOID): [ReactionSpec(self.b, {"A": 1})],
            ("A", VOID): [ReactionSpec(self.d)],
            ("A", "A"): [ReactionSpec(self.c, {"B": 1})],
            ("B", VOID): [ReactionSpec(self.u, {"A": 2})],
        }, species=["A", "B"])

    def generate(self, a: SpecieId, b: SpecieId) -> List[ReactionSpec]:
        return self._table.generate(a, b)

    def universe(self) -> List[SpecieId]:
        return ["A", "B"]

    def initial_state(self) -> List[Tuple[SpecieId, int]]:
        return [(s, n) for s, n in (("A", self.A0), ("B", self.B0)) if n > 0]

    def reaction_count(self) -> int:
        return 4


class ReactionTable(RuleSet):
    """Explicit network: a mapping from unordered reagent pairs to reactions.

    Pairs may be given in either order. Species listed in ``species``
    (or named anywhere in the table) are known; others raise RuleError.
    """

    def __init__(self, table: Mapping[Tuple[SpecieId, SpecieId], Sequence[ReactionSpec]],
                 species: Iterable[SpecieId] = ()):
        self._table: Dict[frozenset, List[ReactionSpec]] = {}
        known = list(species)
        for (a, b), specs in table.items():
            key = frozenset((a, b))
            if key in self._table:
                raise ValueError(f"pair {(a, b)!r} listed twice")
            self._table[key] = list(specs)
            for s in (a, b):
                if s != VOID and s not in known:
                    known.append(s)
            for spec in specs:
                for s, _ in spec.products:
                    if s not in known:
                        known.append(s)
        self._species = known
        self._known = set(known) | {VOID}
        self.parameters = {}

    def generate(self, a: SpecieId, b: SpecieId) -> List[ReactionSpec]:
        for s in (a, b):
            if s not in self._known:
                raise RuleError(f"unknown specie {s!r}")
        return list(self._table.get(frozenset((a, b)), ()))

    def universe(self) -> List[SpecieId]:
        return list(self._species)

    def reaction_count(self) -> int:
        return sum(len(v) for v in self._table.values())


MODELS = {cls.name: cls for cls in (CollidingParticles, ColoredParticles, BirthDeathDimer)}


def colliding_particles(params: Mapping[str, object]) -> CollidingParticles:
    return CollidingParticles.from_params(params)


def colored_particles(params: Mapping[str, object]) -> ColoredParticles:
    return ColoredParticles.from_params(params)


def birth_death_dimer(params: Mapping[str, object]) -> BirthDeathDimer:
    return BirthDeathDimer.from_params(params)


def build_model(name: str, params: Mapping[str, object]) -> ModelRuleSet:
    try:
        cls = MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    return cls.from_params(params)
