import math

import numpy as np
import pytest

from epdm.errors import StructuralError
from epdm.model import VOID, ReactionKind, ReactionSpec
from epdm.oracle import DMState, channel_propensities, dm_step, enumerate_network, h_mu
from epdm.rulesets import CollidingParticles, ColoredParticles, ReactionTable

K = ReactionKind


def test_h_mu():
    assert h_mu(K.BIMOLECULAR_IDENTICAL, 4) == 6
    assert h_mu(K.BIMOLECULAR_DISTINCT, 3, 5) == 15
    assert h_mu(K.BIMOLECULAR_IDENTICAL, 0) == 0
    assert h_mu(K.UNIMOLECULAR, 0) == 0
    assert h_mu(K.SOURCE) == 1


def test_enumerate_colliding():
    net = enumerate_network(CollidingParticles(3), ["P1", "P2", "P3"])
    assert net.M == 6 and net.alpha == 1


def test_enumerate_colored():
    rules = ColoredParticles(2, 2)
    net = enumerate_network(rules, rules.universe())
    # (N*Omega)(N*Omega + 1) / 2 pairs, one reaction each
    assert len(rules.universe()) == 4
    assert net.M == 10


def test_enumerate_empty_universe():
    rules = ReactionTable({(VOID, VOID): [ReactionSpec(2.0, {"A": 1})]})
    net = enumerate_network(rules, [], closed=False)
    assert [ch.kind for ch in net.channels] == [K.SOURCE]


def test_enumerate_rejects_open_network():
    rules = ReactionTable({("A", VOID): [ReactionSpec(1.0, {"B": 1})]})
    with pytest.raises(ValueError):
        enumerate_network(rules, ["A"])


def test_channel_count_bound():
    rules = CollidingParticles(7)
    net = enumerate_network(rules, rules.universe())
    N = 7
    assert net.M <= net.alpha * N * (N + 1) // 2


def test_single_channel_always_selected():
    rules = ReactionTable({("A", VOID): [ReactionSpec(1.0)]})
    state = DMState(enumerate_network(rules, ["A"]), {"A": 3}, seed=1)
    for r2 in (0.0, 0.3, 0.999999):
        assert state.select(r2) == 0


def test_frozen_three_channel_frequencies():
    # propensities {2, 1, 1}
    rules = ReactionTable({
        (VOID, VOID): [ReactionSpec(2.0, {"A": 1})],
        ("A", VOID): [ReactionSpec(1.0)],
        ("B", VOID): [ReactionSpec(1.0)],
    })
    state = DMState(enumerate_network(rules, ["A", "B"]), {"A": 1, "B": 1})
    assert state.propensities() == [2.0, 1.0, 1.0]
    draws = 100_000
    rng = np.random.default_rng(7)
    counts = np.bincount([state.select(r) for r in rng.random(draws)], minlength=3)
    for observed, p in zip(counts, (0.5, 0.25, 0.25)):
        sd = math.sqrt(draws * p * (1 - p))
        assert abs(observed - draws * p) < 3 * sd


def test_colliding_state_invariant():
    rules = CollidingParticles(5, 0.5, 50)
    state = DMState(enumerate_network(rules, rules.universe()), dict(rules.initial_state()), seed=3)
    before = list(state.counts)
    for _ in range(5000):
        assert dm_step(state) is not None
    assert state.counts == before
    assert state.reaction_count == 5000


def test_exhausted_returns_none():
    rules = ReactionTable({("A", VOID): [ReactionSpec(1.0)]})
    state = DMState(enumerate_network(rules, ["A"]), {"A": 2}, seed=0)
    assert dm_step(state) is not None
    assert dm_step(state) is not None
    t = state.t
    assert dm_step(state) is None
    assert state.t == t


def test_negative_count_is_structural_error():
    rules = ReactionTable({("A", VOID): [ReactionSpec(1.0)]})
    state = DMState(enumerate_network(rules, ["A"]), {"A": 0})
    with pytest.raises(StructuralError):
        state.apply({"A": -1})


def test_channel_propensities_match_state(mixed_rules):
    counts = {"A": 20, "B": 10, "C": 15}
    net = enumerate_network(mixed_rules, ["A", "B", "C"])
    assert channel_propensities(net, counts) == pytest.approx(DMState(net, counts).propensities())
