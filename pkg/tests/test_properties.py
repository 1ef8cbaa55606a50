"""Invariants checked on seeded random layered economies."""

from collections import Counter

import numpy as np
import pytest

from prodnet.analyzers.centrality import disruption_centrality
from prodnet.analyzers.medium_run import medium_run_optimize
from prodnet.analyzers.power import PowerAnalyzer, RoutingStrategy
from prodnet.analyzers.propagation import minimum_disruption_oracle, propagate, shock_bound
from prodnet.core_model import validate_equilibrium
from prodnet.data_objects import ShockSpec

SEEDS = range(100)
PAIR_SEEDS = range(50)


def _pick(rng, economy, state, layer_max):
    techs = [t.id for t in economy.technologies if int(t.id[1]) < layer_max]
    return techs[int(rng.integers(len(techs)))]


def _aggressor_techs(economy):
    owners = Counter(t.country for t in economy.technologies)
    aggressor, _ = owners.most_common(1)[0]
    return aggressor, sorted(t.id for t in economy.technologies if t.country == aggressor)


@pytest.mark.parametrize("seed", SEEDS)
def test_random_economy_is_an_equilibrium(layered, seed):
    rng = np.random.default_rng(seed)
    assert validate_equilibrium(*layered(rng, countries=["a", "b"])) == []


@pytest.mark.parametrize("seed", SEEDS)
def test_outputs_never_rise_across_sweeps(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng, layers=4)
    shock = ShockSpec.of([_pick(rng, economy, state, 3)], float(rng.uniform(0.2, 0.95)))
    trace = []
    propagate(economy, state, shock, on_sweep=lambda sweep, outputs: trace.append(outputs.copy()))
    for before, after in zip(trace, trace[1:]):
        assert np.all(after <= before + 1e-12)


@pytest.mark.parametrize("seed", SEEDS)
def test_sweeps_match_oracle_and_respect_bound(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng, layers=4, width=3)
    shock = ShockSpec.of([_pick(rng, economy, state, 3)], float(rng.uniform(0.2, 0.95)))
    swept = propagate(economy, state, shock)
    oracle = minimum_disruption_oracle(economy, state, shock)
    assert swept.lost_gdp_total == pytest.approx(oracle.lost_gdp_total, abs=1e-9)
    report = shock_bound(economy, state, shock)
    assert report.actual_fraction <= report.bound_fraction + 1e-9


@pytest.mark.parametrize("seed", SEEDS)
def test_centrality_predicts_short_run_loss(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng)
    tech = _pick(rng, economy, state, 2)
    lam = 0.7
    outcome = propagate(economy, state, ShockSpec.of([tech], lam))
    assert disruption_centrality(economy, state, tech).scaled_loss(lam) == pytest.approx(outcome.loss_fraction)


@pytest.mark.parametrize("seed", SEEDS)
def test_rerouting_never_loses_more(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng)
    shock = ShockSpec.of([_pick(rng, economy, state, 2)], 0.5)
    short = propagate(economy, state, shock)
    medium = medium_run_optimize(economy, state, shock)
    assert medium.lost_gdp <= short.lost_gdp_total + 1e-7


@pytest.mark.parametrize("seed", SEEDS)
def test_disruption_accounting(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng, countries=["a", "b", "c"])
    aggressor, techs = _aggressor_techs(economy)
    analyzer = PowerAnalyzer(economy, state)

    single = analyzer.individual_disruption(aggressor, techs[0], 0.01)
    assert sum(single.lost_gdp_by_country.values()) == pytest.approx(single.lost_gdp_total)

    doubled = analyzer.individual_disruption(aggressor, techs[0], 0.02)
    assert doubled.lost_gdp_total == pytest.approx(2 * single.lost_gdp_total)


@pytest.mark.parametrize("seed", PAIR_SEEDS)
def test_two_cuts_compose_in_either_order(layered, seed):
    rng = np.random.default_rng(seed)
    economy, state = layered(rng, countries=["a", "b"], width=4)
    aggressor, techs = _aggressor_techs(economy)
    first, second = (techs[0], techs[-1]) if len(techs) > 1 else (techs[0], techs[0])
    analyzer = PowerAnalyzer(economy, state)
    steps = [(first, 0.01, RoutingStrategy()), (second, 0.01, RoutingStrategy())]
    forward = analyzer.compose(aggressor, steps)
    backward = analyzer.compose(aggressor, steps[::-1])
    for country, loss in forward.lost_gdp_by_country.items():
        assert backward.lost_gdp_by_country[country] == pytest.approx(loss)
