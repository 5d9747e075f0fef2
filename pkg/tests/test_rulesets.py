import statistics

import pytest

from epdm.engine import Engine
from epdm.errors import RuleError
from epdm.model import VOID, ReactionKind, kinetic_kind, net_stoichiometry
from epdm.oracle import DMState, dm_step, enumerate_network
from epdm.rulesets import (
    BirthDeathDimer,
    CollidingParticles,
    ColoredParticles,
    birth_death_dimer,
    build_model,
    colliding_particles,
    colored_particles,
)
from epdm.validation import replicate_seeds


def delta_of(rules, a, b):
    return [net_stoichiometry(kinetic_kind(a, b), (a, b), s) for s in rules.generate(a, b)]


def test_colliding_rules():
    rules = colliding_particles({"N": "10", "k": "0.5"})
    [spec] = rules.generate("P1", "P2")
    assert spec.rate == 0.5
    assert delta_of(rules, "P1", "P2") == [{}]
    assert delta_of(rules, "P3", "P3") == [{}]
    assert rules.generate("P1", VOID) == []
    assert rules.generate(VOID, VOID) == []
    assert rules.reaction_count() == 55
    net = enumerate_network(rules, rules.universe())
    assert net.M == 55 and net.alpha == 1


@pytest.mark.parametrize("token", ["Q1", "P0", "P11", "P1.1", ""])
def test_colliding_rejects_unknown_tokens(token):
    rules = CollidingParticles(10)
    with pytest.raises(RuleError):
        rules.generate("P1", token if token else "P")


def test_colored_rules():
    rules = colored_particles({"N": "3", "Omega": "3"})
    assert delta_of(rules, "P1.1", "P2.1") == [{"P1.1": -1, "P2.1": -1, "P1.2": 1, "P2.2": 1}]
    assert delta_of(rules, "P1.3", "P1.3") == [{"P1.3": -2, "P1.1": 2}]
    assert rules.generate("P1.1", VOID) == []


@pytest.mark.parametrize("token", ["P1", "P4.1", "P1.4", "x", "P1.0"])
def test_colored_rejects_malformed(token):
    with pytest.raises(RuleError):
        ColoredParticles(3, 3).generate("P1.1", token)


def test_colored_live_count_constant():
    rules = ColoredParticles(6, 5)
    engine = Engine(rules, rules.initial_state(), seed=4)
    for _ in range(500):
        engine.step()
        snap = engine.snapshot()
        assert len(snap) == 6 and sum(snap.values()) == 6


def test_birth_death_dimer_rules():
    rules = birth_death_dimer({"b": "1", "d": "0.1", "c": "0.05", "u": "0.2"})
    [src] = rules.generate(VOID, VOID)
    assert src.rate == 1.0 and src.products == (("A", 1),)
    [dim] = rules.generate("A", "A")
    assert dim.rate == 0.05 and dim.products == (("B", 1),)
    assert delta_of(rules, "B", VOID) == [{"B": -1, "A": 2}]
    assert rules.generate("A", "B") == []
    kinds = {ch.kind for ch in enumerate_network(rules, rules.universe()).channels}
    assert kinds == set(ReactionKind) - {ReactionKind.BIMOLECULAR_DISTINCT}


@pytest.mark.parametrize("rules", [
    CollidingParticles(4), ColoredParticles(3, 4), BirthDeathDimer(1, 0.1, 0.05, 0.2)])
def test_order_insensitive(rules):
    pool = [VOID] + rules.universe()
    for a in pool:
        for b in pool:
            assert rules.generate(a, b) == rules.generate(b, a)


def test_build_model_errors():
    with pytest.raises(ValueError):
        build_model("nope", {})
    with pytest.raises(ValueError):
        build_model("colliding", {})
    with pytest.raises(ValueError):
        build_model("colliding", {"N": "3", "zeta": "1"})


def test_birth_death_stationary_mean():
    # with c = u = 0 the count of A is Poisson(b/d) at stationarity
    b, d = 1.0, 0.1
    rules = BirthDeathDimer(b, d)
    horizon = 80.0  # e^{-d T} ~ 3e-4 of the initial transient remains
    R = 10_000
    finals = []
    for seed in replicate_seeds(11, R):
        engine = Engine(rules, [], seed)
        while engine.step(horizon) is not None:
            pass
        finals.append(engine.snapshot().get("A", 0))
    mean = statistics.fmean(finals)
    se = statistics.stdev(finals) / R ** 0.5
    assert abs(mean - b / d) < 3 * se

    net = enumerate_network(rules, rules.universe())
    dm_finals = []
    for seed in replicate_seeds(12, R):
        state = DMState(net, {}, seed)
        while dm_step(state, horizon=horizon) is not None:
            pass
        dm_finals.append(state.snapshot().get("A", 0))
    dm_mean = statistics.fmean(dm_finals)
    dm_se = statistics.stdev(dm_finals) / R ** 0.5
    assert abs(dm_mean - b / d) < 3 * dm_se
    assert abs(mean - dm_mean) < 3 * (se ** 2 + dm_se ** 2) ** 0.5
