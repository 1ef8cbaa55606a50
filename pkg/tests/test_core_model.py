import json

import pytest

from prodnet.core_model import (
    NetworkView,
    country_gdp,
    economy_from_dict,
    economy_to_dict,
    gdp,
    load_economy,
    load_flow_state,
    market_price,
    require_equilibrium,
    save_economy,
    save_flow_state,
    unit_cost,
    validate_equilibrium,
    world_labor_income,
)
from prodnet.data_objects import ShockSpec
from prodnet.errors import (
    InvariantError,
    NegativeFlowError,
    NotEquilibriumError,
    ParseError,
    SchemaError,
    UnknownEntityError,
)
from prodnet.fixtures import FixtureId, build


class TestFileFormat:
    def test_round_trip_revalidates(self, fig1, tmp_path):
        economy, state = fig1
        save_economy(economy, tmp_path / "e.json")
        save_flow_state(state, tmp_path / "f.json")
        loaded = load_economy(tmp_path / "e.json")
        flows = load_flow_state(tmp_path / "f.json", loaded)
        assert validate_equilibrium(loaded, flows) == []
        assert flows.output("tauR") == pytest.approx(2.0)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ParseError):
            load_economy(path)

    def test_missing_field(self, fig1, tmp_path):
        document = economy_to_dict(fig1[0])
        del document["technologies"]
        path = tmp_path / "e.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(SchemaError):
            load_economy(path)

    def test_nonpositive_labor_input(self, fig1, tmp_path):
        document = economy_to_dict(fig1[0])
        document["technologies"][0]["labor_input"] = 0.0
        path = tmp_path / "e.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(InvariantError):
            load_economy(path)

    def test_unknown_tech_in_flows(self, fig1, tmp_path):
        economy, state = fig1
        save_flow_state(state, tmp_path / "f.json")
        document = json.loads((tmp_path / "f.json").read_text(encoding="utf-8"))
        document["good_flows"].append({"from": "tauR", "to": "ghost", "amount": 1.0})
        (tmp_path / "f.json").write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(UnknownEntityError):
            load_flow_state(tmp_path / "f.json", economy)

    def test_negative_flow(self, fig1, tmp_path):
        economy, state = fig1
        save_flow_state(state, tmp_path / "f.json")
        document = json.loads((tmp_path / "f.json").read_text(encoding="utf-8"))
        document["good_flows"][0]["amount"] = -1.0
        (tmp_path / "f.json").write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(NegativeFlowError):
            load_flow_state(tmp_path / "f.json", economy)


class TestAccounting:
    def test_fig1_prices_and_gdp(self, fig1):
        economy, state = fig1
        assert state.prices["tauR"] == pytest.approx(0.1)
        assert state.prices["tauI"] == pytest.approx(0.8)
        assert state.prices["tauF"] == pytest.approx(1.0)
        assert gdp(economy, state) == pytest.approx(1.0)
        assert unit_cost(economy, state, "tauF") == pytest.approx(1.0)
        assert market_price(economy, state, "R") == pytest.approx(0.1)

    def test_wage_income_equals_final_expenditure(self, fig9):
        economy, state = fig9
        assert world_labor_income(economy, state) == pytest.approx(gdp(economy, state))
        by_country = country_gdp(economy, state)
        assert by_country["1"] == pytest.approx(100.0)
        assert by_country["2"] == pytest.approx(100.0)
        assert by_country["5"] == pytest.approx(35.0)


class TestValidation:
    def test_fixture_is_equilibrium(self, fig1):
        assert validate_equilibrium(*fig1) == []

    def test_price_mutation_breaks_zero_profit(self, fig1):
        economy, state = fig1
        mutated = state.model_copy(update={"prices": {**state.prices, "tauF": 1.1}})
        violations = validate_equilibrium(economy, mutated)
        assert len(violations) == 1
        assert violations[0].condition == "zero_profit"
        assert violations[0].entity == "tauF"
        assert violations[0].residual == pytest.approx(0.1)

    def test_endowment_mutation_breaks_labor_market(self, fig1):
        economy, state = fig1
        document = economy_to_dict(economy)
        document["countries"][0]["labor"] = 11
        violations = validate_equilibrium(economy_from_dict(document), state)
        assert [(v.condition, v.entity) for v in violations] == [("labor_market", "home")]
        assert violations[0].residual == pytest.approx(-1.0)

    def test_recipe_mutation_breaks_feasibility(self, fig1):
        economy, state = fig1
        document = economy_to_dict(economy)
        final = next(t for t in document["technologies"] if t["id"] == "tauF")
        # Half a unit of labor traded for half a unit of R keeps the unit cost at 1.
        final["labor_input"] = 0.5
        final["inputs"] = {"R": 1.5, "I": 1.0}
        violations = validate_equilibrium(economy_from_dict(document), state)
        assert [(v.condition, v.entity) for v in violations] == [("feasibility", "tauF")]

    def test_output_mutation_breaks_intermediate_market(self, fig1):
        economy, state = fig1
        mutated = state.model_copy(update={"outputs": {**state.outputs, "tauR": 3.0}})
        violations = validate_equilibrium(economy, mutated)
        assert ("intermediate_market", "tauR") in [(v.condition, v.entity) for v in violations]
        assert {v.condition for v in violations} <= {"intermediate_market", "feasibility"}

    def test_shipping_a_final_good_breaks_final_market(self, fig1):
        economy, state = fig1
        mutated = state.model_copy(update={"good_flows": {**state.good_flows, ("tauF", "tauI"): 0.5}})
        violations = validate_equilibrium(economy, mutated)
        assert ("final_market", "tauF") in [(v.condition, v.entity) for v in violations]
        assert {v.condition for v in violations} <= {"final_market", "feasibility"}

    def test_expenditure_shares(self):
        economy, state = build(FixtureId.CHIPS_MEDIUM_RUN)
        document = economy_to_dict(economy)
        document["demand_shares"] = {"F1": 0.1, "F2": 0.9}
        assert validate_equilibrium(economy_from_dict(document), state) == []
        document["demand_shares"] = {"F1": 0.2, "F2": 0.8}
        violations = validate_equilibrium(economy_from_dict(document), state)
        assert {v.condition for v in violations} == {"final_market"}
        assert {v.entity for v in violations} == {"F1", "F2"}

    def test_unequal_final_prices(self, fig7):
        economy, state = fig7
        mutated = state.model_copy(update={"prices": {**state.prices, "tau5": state.prices["tau5"] + 0.1}})
        violations = validate_equilibrium(economy, mutated)
        assert ("final_price", "F") in [(v.condition, v.entity) for v in violations]
        assert {v.condition for v in violations} == {"final_price", "zero_profit"}

    def test_expensive_supplier_breaks_cost_minimization(self, branch):
        economy, state = branch
        mutated = state.model_copy(update={"prices": {**state.prices, "tau1": state.prices["tau1"] + 0.1}})
        violations = validate_equilibrium(economy, mutated)
        assert ("cost_minimization", "tau1->tau3") in [(v.condition, v.entity) for v in violations]
        assert {v.condition for v in violations} == {"cost_minimization", "zero_profit"}

    def test_require_equilibrium_lists_violations(self, fig1):
        economy, state = fig1
        mutated = state.model_copy(update={"prices": {**state.prices, "tauF": 1.1}})
        with pytest.raises(NotEquilibriumError) as excinfo:
            require_equilibrium(economy, mutated)
        assert len(excinfo.value.violations) == 1


class TestNetworkView:
    def test_groups_aggregate_suppliers_of_a_good(self, extended):
        nv = NetworkView(*extended)
        tau3 = nv.index["tau3"]
        goods = {good for tech, good in nv.group_keys if tech == tau3}
        assert goods == {"A", "D"}
        a_group = nv.group_keys.index((tau3, "A"))
        assert nv.group_inflow[a_group] == pytest.approx(8.0)

    def test_cycle_detected(self, extended, fig1):
        assert not NetworkView(*extended).is_acyclic
        assert NetworkView(*fig1).is_acyclic

    def test_downstream_finals(self, branch):
        nv = NetworkView(*branch)
        assert nv.downstream_finals({"tau0"}) == {"tau12"}
        assert nv.downstream_finals({"tau2"}) == {"tau8", "tau9", "tau10", "tau12"}

    def test_check_shock_rejects_unknown(self, fig1):
        with pytest.raises(UnknownEntityError):
            NetworkView(*fig1).check_shock(ShockSpec.of(["nope"], 0.5))
