import numpy as np
import pytest

from prodnet.analyzers.propagation import (
    PropagationAnalyzer,
    PropagationConfig,
    check_cut_condition,
    check_industry_shock_condition,
    disrupted_subnetwork,
    minimum_disruption_oracle,
    propagate,
    shock_bound,
)
from prodnet.data_objects import ShockSpec
from prodnet.errors import InactiveTechError, InvariantError, TooLargeError, UnknownEntityError
from prodnet.fixtures import FixtureId, build


class TestPropagate:
    def test_chain_loses_ten_percent(self, fig1):
        outcome = propagate(*fig1, ShockSpec.of(["tauR"], 0.9))
        assert outcome.flows.output("tauF") == pytest.approx(0.9)
        assert outcome.loss_fraction == pytest.approx(0.1)
        assert outcome.idle_labor["home"] == pytest.approx(1.0)

    def test_unshocked_complement_falls_in_proportion(self, fig1):
        economy, state = fig1
        outcome = propagate(economy, state, ShockSpec.of(["tauI"], 0.5))
        # tauR keeps shipping at full rate; tauF is bound by half its I.
        assert outcome.flows.output("tauR") == pytest.approx(2.0)
        assert outcome.flows.output("tauF") == pytest.approx(0.5)
        assert outcome.idle_labor["home"] == pytest.approx(3.5 + 0.5)

    def test_lambda_one_changes_nothing(self, fig1):
        outcome = propagate(*fig1, ShockSpec.of(["tauR"], 1.0))
        assert outcome.lost_gdp_total == pytest.approx(0.0)

    def test_positive_shock_scales_final_output(self, fig1):
        outcome = propagate(*fig1, ShockSpec.of(["tauF"], 1.2))
        assert outcome.flows.output("tauF") == pytest.approx(1.2)
        assert outcome.lost_gdp_total == pytest.approx(-0.2)

    def test_cycle_converges_to_uniform_cut(self, extended):
        outcome = propagate(*extended, ShockSpec.of(["tau2"], 0.9))
        economy, state = extended
        for tech in ("tau3", "tau4", "tau5", "tau6", "tau7", "tau8", "tau9", "tau10"):
            assert outcome.flows.output(tech) == pytest.approx(0.9 * state.output(tech), abs=1e-9)

    def test_outputs_never_increase_between_sweeps(self, extended):
        trace = []
        analyzer = PropagationAnalyzer(*extended)
        analyzer.propagate(ShockSpec.of(["tau2"], 0.5), on_sweep=lambda k, y: trace.append(y.copy()))
        for before, after in zip(trace, trace[1:]):
            assert np.all(after <= before + 1e-12)

    def test_delta_stops_early(self, extended):
        config = PropagationConfig(delta=1e-3, max_sweeps=10_000)
        outcome = PropagationAnalyzer(*extended).propagate(ShockSpec.of(["tau2"], 0.5), config)
        exact = propagate(*extended, ShockSpec.of(["tau2"], 0.5))
        assert outcome.sweeps < exact.sweeps
        assert outcome.lost_gdp_total == pytest.approx(exact.lost_gdp_total, abs=5e-2)

    def test_negative_delta_rejected(self):
        with pytest.raises(InvariantError):
            PropagationConfig(delta=-1.0)

    def test_unknown_and_inactive_shocks(self, fig1):
        economy, state = fig1
        with pytest.raises(UnknownEntityError):
            propagate(economy, state, ShockSpec.of(["ghost"], 0.5))
        idle = state.model_copy(update={"outputs": {**state.outputs, "tauI": 0.0}})
        with pytest.raises(InactiveTechError):
            PropagationAnalyzer(economy, idle, validate=False).propagate(ShockSpec.of(["tauI"], 0.5))


class TestOracle:
    def test_matches_sweeps_on_acyclic_network(self, branch):
        shock = ShockSpec.of(["tau2"], 0.9)
        swept = propagate(*branch, shock)
        oracle = minimum_disruption_oracle(*branch, shock)
        assert oracle.lost_gdp_total == pytest.approx(swept.lost_gdp_total, abs=1e-9)

    def test_matches_sweeps_on_cyclic_network(self, extended):
        shock = ShockSpec.of(["tau2"], 0.9)
        swept = propagate(*extended, shock)
        oracle = minimum_disruption_oracle(*extended, shock)
        assert oracle.lost_gdp_total == pytest.approx(swept.lost_gdp_total, abs=1e-6)

    def test_size_guard(self, branch):
        analyzer = PropagationAnalyzer(*branch)
        with pytest.raises(TooLargeError):
            analyzer.minimum_disruption_oracle(ShockSpec.of(["tau2"], 0.9), max_techs=3)


class TestBound:
    def test_not_tight_with_diverse_sourcing(self, branch):
        report = shock_bound(*branch, ShockSpec.of(["tau2"], 0.9))
        assert report.bound_fraction == pytest.approx(0.1)
        assert report.actual_fraction == pytest.approx(0.0575)
        assert not report.tight

    def test_tight_on_single_chain(self, fig1):
        assert shock_bound(*fig1, ShockSpec.of(["tauR"], 0.9)).tight

    def test_tight_through_the_cycle(self, extended):
        report = shock_bound(*extended, ShockSpec.of(["tau2"], 0.9))
        assert report.tight

    def test_cut_condition_fails_on_cycle(self, extended):
        report = check_cut_condition(*extended, ShockSpec.of(["tau2"], 0.9))
        assert not report.holds
        assert not report.acyclic
        assert report.cycle

    def test_cut_condition_holds_on_chain(self, fig1):
        assert check_cut_condition(*fig1, ShockSpec.of(["tauR"], 0.9)).holds

    def test_cut_condition_finds_surviving_path(self, branch):
        report = check_cut_condition(*branch, ShockSpec.of(["tau2"], 0.9))
        assert not report.holds
        assert report.surviving_path

    def test_industry_condition(self, extended):
        assert check_industry_shock_condition(*extended, ShockSpec.of(["tau1", "tau2"], 0.9))
        assert not check_industry_shock_condition(*extended, ShockSpec.of(["tau2"], 0.9))

    def test_disrupted_subnetwork_reaches_affected_finals(self, branch):
        sub = disrupted_subnetwork(*branch, {"tau0"})
        assert set(sub.nodes) == {"tau0", "tau2", "tau11", "tau12"}


def test_analyze_reports_everything(fig1):
    result = PropagationAnalyzer(*fig1).analyze(ShockSpec.of(["tauR"], 0.9))
    assert result["loss_fraction"] == pytest.approx(0.1)
    assert result["tight"] is True
    assert result["cut_condition"] is True
    assert {row["tech"] for row in result["outputs"]} == {"tauR", "tauI", "tauF"}


def test_chips_short_run():
    outcome = propagate(*build(FixtureId.CHIPS_MEDIUM_RUN), ShockSpec.of(["R1"], 0.9))
    assert outcome.loss_fraction == pytest.approx(0.1)
