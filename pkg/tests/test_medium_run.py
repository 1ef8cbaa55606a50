import math

import pytest

from prodnet.analyzers.medium_run import (
    MediumRunAnalyzer,
    generate_lpr_family,
    lpr,
    medium_run_optimize,
)
from prodnet.analyzers.propagation import propagate
from prodnet.base_analyzer import BaseAnalyzer
from prodnet.data_objects import ShockSpec
from prodnet.errors import InvariantError, TooLargeError
from prodnet.fixtures import FixtureId, build, lpr_tech_id


@pytest.fixture
def chips():
    return build(FixtureId.CHIPS_MEDIUM_RUN)


@pytest.fixture
def flexible():
    return build(FixtureId.FLEXIBLE_REROUTING)


def test_chips_go_to_the_high_value_good(chips):
    result = medium_run_optimize(*chips, ShockSpec.of(["R1"], 0.9))
    assert result.loss_fraction == pytest.approx(0.02)
    assert result.flows.output("F2") == pytest.approx(9.0)
    assert result.flows.output("F1") == pytest.approx(0.8)


def test_swapped_values_move_the_loss_to_the_other_good(chips):
    result = medium_run_optimize(*chips, ShockSpec.of(["R1"], 0.9), objective_prices={"F1": 9.0, "F2": 1.0})
    assert result.flows.output("F1") == pytest.approx(1.0)
    assert result.flows.output("F2") == pytest.approx(7.2)


def test_chips_lpr(chips):
    report = lpr(*chips, ShockSpec.of(["R1"], 0.9))
    assert report.short_run_loss == pytest.approx(1.0)
    assert report.medium_run_loss == pytest.approx(0.2)
    assert report.lpr == pytest.approx(5.0)


def test_equal_values_gain_nothing_from_rerouting():
    economy, state = build(FixtureId.CHIPS_EQUAL_VALUE)
    report = lpr(economy, state, ShockSpec.of(["R1"], 0.5))
    assert report.lpr == pytest.approx(1.0)


def test_flexible_rerouting(flexible):
    shock = ShockSpec.of(["tau1"], 0.5)
    short = propagate(*flexible, shock)
    medium = medium_run_optimize(*flexible, shock)
    assert short.flows.output("tau4") == pytest.approx(2.5)
    assert medium.flows.output("tau4") == pytest.approx(3.0)
    assert lpr(*flexible, shock).lpr == pytest.approx(1.5)


def test_reroutes_are_reported(flexible):
    medium = medium_run_optimize(*flexible, ShockSpec.of(["tau1"], 0.5))
    for source, dest, amount in medium.reroutes:
        assert flexible[1].good_flows.get((source, dest), 0.0) == 0.0
        assert amount > 0


def test_medium_run_solution_is_feasible(flexible):
    shock = ShockSpec.of(["tau1"], 0.5)
    analyzer = MediumRunAnalyzer(*flexible)
    medium = analyzer.medium_run_optimize(shock)
    assert analyzer.is_feasible(medium.flows, shock)


def test_short_run_state_is_feasible_in_the_medium_run(flexible):
    shock = ShockSpec.of(["tau1"], 0.5)
    analyzer = MediumRunAnalyzer(*flexible)
    assert analyzer.is_feasible(propagate(*flexible, shock).flows, shock)


@pytest.mark.parametrize("lam", [0.0, 0.5])
@pytest.mark.parametrize("t", range(2, 9))
def test_lpr_family_reaches_t(t, lam):
    economy, state = generate_lpr_family(t)
    report = lpr(economy, state, ShockSpec.of([lpr_tech_id(t, 0, 1)], lam))
    assert report.lpr == pytest.approx(float(t))


def test_lpr_family_with_both_sources_cut():
    economy, state = generate_lpr_family(3)
    report = lpr(economy, state, ShockSpec.of(["01", "02"], 0.0))
    assert report.lpr == pytest.approx(1.0)


def test_lpr_family_needs_two_goods():
    with pytest.raises(InvariantError):
        generate_lpr_family(1)


def test_no_loss_gives_unit_ratio(fig1):
    assert lpr(*fig1, ShockSpec.of(["tauR"], 1.0)).lpr == 1.0


def test_ratio_conventions():
    assert BaseAnalyzer.safe_ratio(0.0, 0.0) == 1.0
    assert BaseAnalyzer.safe_ratio(0.3, 0.0) == math.inf
    assert BaseAnalyzer.safe_ratio(0.3, 0.1) == pytest.approx(3.0)


def test_positive_shock_rejected(fig1):
    with pytest.raises(InvariantError):
        medium_run_optimize(*fig1, ShockSpec.of(["tauF"], 1.5))


def test_variable_limit(flexible):
    with pytest.raises(TooLargeError):
        MediumRunAnalyzer(*flexible).medium_run_optimize(ShockSpec.of(["tau1"], 0.5), variable_limit=3)


def test_analyze_reports_lpr(chips):
    result = MediumRunAnalyzer(*chips).analyze(ShockSpec.of(["R1"], 0.9))
    assert result["lpr"] == pytest.approx(5.0)
    assert not math.isinf(result["lpr"])
