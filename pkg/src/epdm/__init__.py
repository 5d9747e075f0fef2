"""Exact stochastic simulation with species generated on the fly."""

from .engine import Engine, Event
from .errors import ConfigError, EngineError, Exhausted, RuleError, StructuralError
from .model import (
    VOID,
    ReactionKind,
    ReactionSpec,
    RuleSet,
    full_propensity,
    kinetic_kind,
    net_stoichiometry,
    partial_propensity_wrt_owner,
)
from .oracle import DMState, StaticNetwork, dm_step, enumerate_network, h_mu
from .rulesets import (
    BirthDeathDimer,
    CollidingParticles,
    ColoredParticles,
    ReactionTable,
    birth_death_dimer,
    colliding_particles,
    colored_particles,
)

__version__ = "0.1.0"
