import math

import pytest

from prodnet.analyzers.power import (
    PowerAnalyzer,
    RoutingStrategy,
    frontier,
    individual_disruption,
    power,
    power_matrix,
    strategic_power,
)
from prodnet.errors import (
    CyclicNetworkError,
    ForeignTechError,
    InvariantError,
    NoLeverageError,
    NotPartialError,
    TooLargeError,
    UndirectedCycleError,
)


class TestConsistentDisruption:
    def test_cut_to_foreign_assembler(self, fig7):
        outcome = individual_disruption(*fig7, "i", "tau2", 1 / 20, RoutingStrategy.downstream("tau2", "tau3"))
        assert outcome.idle_labor["j"] == pytest.approx(5.0)
        assert outcome.idle_labor["i"] == pytest.approx(1.0)
        assert outcome.lost_gdp_by_country["j"] == pytest.approx(5 / 3)
        assert outcome.lost_gdp_by_country["i"] == pytest.approx(1 / 3)

    def test_lost_wages_equal_lost_final_value(self, fig7):
        outcome = individual_disruption(*fig7, "i", "tau2", 1 / 20, RoutingStrategy.downstream("tau2", "tau3"))
        assert sum(outcome.lost_gdp_by_country.values()) == pytest.approx(outcome.lost_gdp_total)
        assert outcome.lost_gdp_total == pytest.approx(2.0)

    def test_flows_after_disruption(self, fig7):
        outcome = individual_disruption(*fig7, "i", "tau2", 1 / 20, RoutingStrategy.downstream("tau2", "tau3"))
        flows = outcome.flows
        assert flows.output("tau2") == pytest.approx(19.0)
        assert flows.good_flows[("tau2", "tau3")] == pytest.approx(9.0)
        assert flows.good_flows[("tau2", "tau5")] == pytest.approx(10.0)
        assert flows.output("tau1") == pytest.approx(9.0)
        assert flows.output("tau4") == pytest.approx(18.0)

    def test_routing_to_own_customer_spares_target(self, fig7):
        outcome = individual_disruption(*fig7, "i", "tau2", 1 / 20, RoutingStrategy.downstream("tau2", "tau5"))
        assert outcome.lost_gdp_by_country["j"] == pytest.approx(0.0)

    def test_unrouted_cut_is_proportional(self, fig7):
        outcome = individual_disruption(*fig7, "i", "tau2", 1 / 10)
        assert outcome.flows.good_flows[("tau2", "tau3")] == pytest.approx(9.0)
        assert outcome.flows.good_flows[("tau2", "tau5")] == pytest.approx(9.0)

    def test_compose_is_order_invariant(self, fig7):
        analyzer = PowerAnalyzer(*fig7)
        first = ("tau2", 0.05, RoutingStrategy.downstream("tau2", "tau3"))
        second = ("tau5", 0.1, RoutingStrategy())
        forward = analyzer.compose("i", [first, second])
        backward = analyzer.compose("i", [second, first])
        for country in ("i", "j"):
            assert forward.lost_gdp_by_country[country] == pytest.approx(backward.lost_gdp_by_country[country])

    def test_compose_adds_individual_losses(self, fig7):
        analyzer = PowerAnalyzer(*fig7)
        first = ("tau2", 0.05, RoutingStrategy.downstream("tau2", "tau3"))
        second = ("tau5", 0.1, RoutingStrategy())
        both = analyzer.compose("i", [first, second])
        alone = [analyzer.compose("i", [step]) for step in (first, second)]
        assert both.lost_gdp_total == pytest.approx(sum(o.lost_gdp_total for o in alone))

    def test_cut_to_zero_is_not_partial(self, fig7):
        with pytest.raises(NotPartialError):
            individual_disruption(*fig7, "i", "tau2", 0.5, RoutingStrategy.downstream("tau2", "tau3"))

    def test_foreign_tech(self, fig7):
        with pytest.raises(ForeignTechError):
            individual_disruption(*fig7, "i", "tau1", 0.1)

    def test_scale_range(self, fig7):
        with pytest.raises(InvariantError):
            individual_disruption(*fig7, "i", "tau2", 1.0)

    def test_cyclic_network(self, extended):
        with pytest.raises(CyclicNetworkError):
            individual_disruption(*extended, "home", "tau2", 0.1)

    def test_routing_must_be_a_distribution(self):
        with pytest.raises(InvariantError):
            RoutingStrategy(downstream_routes={"tau2": {"tau3": 0.5}})


class TestPower:
    def test_two_country_power(self, fig7):
        report = power(*fig7, "i", "j")
        assert report.best_tech == "tau2"
        assert report.power_abs == pytest.approx(5.0)
        assert report.power_pct == pytest.approx(7.0)
        assert report.best_routing.downstream_routes["tau2"] == {"tau3": 1.0}
        assert 0 < report.max_partial_scale <= 1

    def test_reverse_direction(self, fig7):
        assert power(*fig7, "j", "i").power_abs == pytest.approx(0.2)

    @pytest.mark.parametrize(
        "aggressor,target,pct,absolute",
        [
            ("1", "2", 4.5, 4.5),
            ("2", "5", 10.0, 3.5),
            # R1-3 loses sales twice: country 2's own I1-2 buys less, and the lost F1-5 sale
            # makes country 1's I2-1 buy less. Both cuts together give 5, not the 2.5 of I2-1 alone.
            ("2", "3", 5.0, 0.2),
            ("2", "1", 1.0, 1.0),
        ],
    )
    def test_five_country(self, fig9, aggressor, target, pct, absolute):
        report = power(*fig9, aggressor, target)
        assert report.power_pct == pytest.approx(pct)
        assert report.power_abs == pytest.approx(absolute)

    def test_best_route_through_intermediate(self, fig9):
        report = power(*fig9, "1", "2")
        assert report.best_tech == "I2-1"
        assert report.best_routing.downstream_routes["I2-1"] == {"F1-2": 1.0}

    def test_no_leverage(self, fig9):
        report = power(*fig9, "2", "4")
        assert report.no_leverage
        assert report.power_pct == 0.0
        with pytest.raises(NoLeverageError):
            power(*fig9, "2", "4", strict=True)

    def test_exhaustive_never_lower(self, fig9):
        border = power(*fig9, "1", "2")
        everything = power(*fig9, "1", "2", exhaustive=True)
        assert everything.power_abs >= border.power_abs - 1e-12

    def test_same_country(self, fig7):
        with pytest.raises(InvariantError):
            power(*fig7, "i", "i")

    def test_matrix(self, fig7):
        matrix = power_matrix(*fig7)
        assert matrix.index.name == "aggressor"
        assert math.isnan(matrix.loc["i", "i"])
        assert matrix.loc["i", "j"] == pytest.approx(7.0)

    def test_analyze(self, fig7):
        result = PowerAnalyzer(*fig7).analyze("i", "j")
        assert result["best_tech"] == "tau2"
        assert result["power_abs"] == pytest.approx(5.0)


class TestFrontier:
    def test_five_country_frontier(self, fig9):
        curve = frontier(*fig9, "1", "2")
        expected = [(0, 0), (10, 45), (25, 90), (35, 100)]
        assert len(curve.points) == len(expected)
        for (x, y), (ex, ey) in zip(curve.points, expected):
            assert x == pytest.approx(ex, abs=1e-6)
            assert y == pytest.approx(ey, abs=1e-6)

    def test_non_concave_frontier(self, fig11):
        curve = frontier(*fig11, "i", "j")
        expected = [(0, 0), (75, 40), (100, 65)]
        for (x, y), (ex, ey) in zip(curve.points, expected):
            assert x == pytest.approx(ex, abs=1e-6)
            assert y == pytest.approx(ey, abs=1e-6)
        # Beyond the first kink the frontier rises faster than its initial slope.
        assert curve.value_at(100) > 40 * 100 / 75

    def test_first_segment_matches_power(self, fig11):
        report = power(*fig11, "i", "j")
        curve = frontier(*fig11, "i", "j")
        (x0, y0), (x1, y1) = curve.points[:2]
        assert (y1 - y0) / (x1 - x0) == pytest.approx(report.power_pct)

    def test_samples(self, fig9):
        curve = frontier(*fig9, "1", "2", resolution=8)
        assert len(curve.samples) == 8
        assert curve.samples[0] == (0.0, 0.0)
        assert curve.samples[-1][1] == pytest.approx(100.0)

    def test_budget(self, fig9):
        with pytest.raises(TooLargeError):
            frontier(*fig9, "1", "2", budget=1)


class TestStrategicPower:
    def test_power_against_passive_target(self, strategic):
        assert power(*strategic, "i", "j").power_abs == pytest.approx(7 / 6)

    def test_target_reroutes(self, strategic):
        report = strategic_power(*strategic, "i", "j")
        assert report.strategic
        assert report.best_tech == "tau2"
        assert report.power_abs == pytest.approx(2 / 11)

    def test_strategic_never_exceeds_power(self, fig7):
        assert strategic_power(*fig7, "i", "j").power_abs <= power(*fig7, "i", "j").power_abs + 1e-12

    def test_undirected_cycle(self, fig9):
        with pytest.raises(UndirectedCycleError):
            strategic_power(*fig9, "1", "2")
