"""
Economy and flow-state plumbing for prodnet.

This module reads and writes the economy / flow file formats, validates that a
flow state is an equilibrium, computes GDP and transport-adjusted prices, and
provides ``NetworkView``, the array-indexed representation the analyzers share.
"""

import json
import logging
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import ValidationError

from .data_objects import (
    CountryId,
    Economy,
    FlowState,
    GoodId,
    ShockSpec,
    TechId,
    Technology,
    Violation,
)
from .errors import (
    InactiveTechError,
    InvariantError,
    MissingPriceError,
    NoProducerError,
    NotEquilibriumError,
    ParseError,
    SchemaError,
    UnknownEntityError,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _read_json(path: PathLike) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}", entity=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})", entity=str(path)) from exc


def _schema_error(exc: ValidationError, what: str) -> SchemaError:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return SchemaError(f"{what}: {location}: {first['msg']}", entity=location or None)


def economy_from_dict(data: Any) -> Economy:
    """Validate a decoded economy document."""
    if not isinstance(data, dict):
        raise SchemaError("economy document must be a JSON object")
    try:
        return Economy.model_validate(data)
    except ValidationError as exc:
        raise _schema_error(exc, "economy") from exc


def economy_to_dict(economy: Economy) -> Dict[str, Any]:
    """Canonical document form of an economy (field order and names as in the file format)."""
    document: Dict[str, Any] = {
        "countries": [{"id": c.id, "labor": c.labor} for c in economy.countries],
        "goods": [{"id": g.id, "kind": g.kind.value} for g in economy.goods],
        "technologies": [
            {
                "id": t.id,
                "country": t.country,
                "output": t.output,
                "labor_input": t.labor_input,
                "inputs": dict(t.inputs),
            }
            for t in economy.technologies
        ],
        "transport": {
            "default": economy.transport.default,
            "good_overrides": [
                {"from": o.source, "to": o.dest, "cost": o.cost} for o in economy.transport.good_overrides
            ],
            "labor_overrides": [
                {"country": o.country, "to": o.dest, "cost": o.cost} for o in economy.transport.labor_overrides
            ],
        },
    }
    if economy.demand_shares is not None:
        document["demand_shares"] = dict(economy.demand_shares)
    return document


def load_economy(path: PathLike) -> Economy:
    """
    Load and validate an economy file.

    Args:
        path: Path to the economy JSON document

    Returns:
        The validated Economy

    Raises:
        ParseError: The file is not JSON
        SchemaError: A field is missing or mistyped
        InvariantError: A model invariant fails
    """
    economy = economy_from_dict(_read_json(path))
    logger.info("Loaded %s from %s", economy, path)
    return economy


def save_economy(economy: Economy, path: PathLike) -> None:
    Path(path).write_text(json.dumps(economy_to_dict(economy), indent=2) + "\n", encoding="utf-8")


def flow_state_from_dict(data: Any, economy: Economy) -> FlowState:
    """Validate a decoded flow document against an economy."""
    if not isinstance(data, dict):
        raise SchemaError("flow document must be a JSON object")
    try:
        state = FlowState.model_validate(data)
    except ValidationError as exc:
        raise _schema_error(exc, "flows") from exc
    check_state_entities(economy, state)
    return state


def flow_state_to_dict(state: FlowState) -> Dict[str, Any]:
    return {
        "good_flows": [{"from": s, "to": d, "amount": x} for (s, d), x in state.good_flows.items()],
        "labor_flows": [{"country": n, "to": d, "amount": x} for (n, d), x in state.labor_flows.items()],
        "outputs": dict(state.outputs),
        "prices": dict(state.prices),
        "wages": dict(state.wages),
    }


def load_flow_state(path: PathLike, economy: Economy) -> FlowState:
    """
    Load a flow file. Entity references are checked; equilibrium conditions are not.

    Raises:
        UnknownEntityError: A flow names a technology or country missing from the economy
        NegativeFlowError: A value is negative or not finite
    """
    state = flow_state_from_dict(_read_json(path), economy)
    logger.info("Loaded %s from %s", state, path)
    return state


def save_flow_state(state: FlowState, path: PathLike) -> None:
    Path(path).write_text(json.dumps(flow_state_to_dict(state), indent=2) + "\n", encoding="utf-8")


def check_state_entities(economy: Economy, state: FlowState) -> None:
    """Raise UnknownEntityError if the state references entities absent from the economy."""

    def need_tech(tech_id: str) -> None:
        if not economy.has_tech(tech_id):
            raise UnknownEntityError(f"unknown technology {tech_id!r}", entity=tech_id)

    def need_country(country_id: str) -> None:
        if not economy.has_country(country_id):
            raise UnknownEntityError(f"unknown country {country_id!r}", entity=country_id)

    for source, dest in state.good_flows:
        need_tech(source)
        need_tech(dest)
    for country, dest in state.labor_flows:
        need_country(country)
        need_tech(dest)
    for tech_id in list(state.outputs) + list(state.prices):
        need_tech(tech_id)
    for country in state.wages:
        need_country(country)

    for (source, dest), amount in state.good_flows.items():
        if amount > 0 and (state.output(source) == 0 or state.output(dest) == 0):
            raise InvariantError(
                f"flow {source}->{dest} touches a technology with zero output", entity=f"{source}->{dest}"
            )


# ---------------------------------------------------------------------------
# Prices and accounting
# ---------------------------------------------------------------------------


def effective_wage(economy: Economy, state: FlowState, tech: Technology) -> Tuple[float, Optional[CountryId]]:
    """Cheapest transport-adjusted wage available to ``tech`` and the country offering it."""
    best: Tuple[float, Optional[CountryId]] = (float("inf"), None)
    for country in sorted(c.id for c in economy.countries):
        theta = economy.transport.labor_cost(country, tech)
        if theta is None or country not in state.wages:
            continue
        candidate = theta * state.wages[country]
        if candidate < best[0]:
            best = (candidate, country)
    return best


def effective_input_price(
    economy: Economy, state: FlowState, tech: TechId, good: GoodId
) -> Tuple[float, TechId]:
    """
    Transport-adjusted price technology ``tech`` faces for ``good``.

    Args:
        economy: The economy
        state: Flow state providing producer prices
        tech: Buying technology
        good: Input good

    Returns:
        (min over producers of theta * price, argmin producer); ties go to the smallest id

    Raises:
        NoProducerError: No technology produces the good
        MissingPriceError: Producers exist but none has a price
    """
    producers = economy.producers(good)
    if not producers:
        raise NoProducerError(f"no technology produces {good!r}", entity=good)
    priced = [p for p in sorted(producers) if p in state.prices]
    if not priced:
        raise MissingPriceError(f"no producer of {good!r} has a price", entity=good)
    best_price = float("inf")
    best_source = priced[0]
    for source in priced:
        candidate = economy.transport.good_cost(source, tech) * state.prices[source]
        if candidate < best_price:
            best_price, best_source = candidate, source
    return best_price, best_source


def unit_cost(economy: Economy, state: FlowState, tech_id: TechId) -> float:
    tech = economy.tech(tech_id)
    wage, _ = effective_wage(economy, state, tech)
    cost = tech.labor_input * wage
    for good, qty in tech.inputs.items():
        price, _ = effective_input_price(economy, state, tech_id, good)
        cost += qty * price
    return cost


def gdp(economy: Economy, state: FlowState) -> float:
    """
    Total expenditure on final goods, sum of p * y over final-good technologies.

    Raises:
        MissingPriceError: An active final-good technology has no price
    """
    total = 0.0
    for tech in economy.technologies:
        if not economy.is_final_tech(tech.id):
            continue
        y = state.output(tech.id)
        if y == 0:
            continue
        if tech.id not in state.prices:
            raise MissingPriceError(f"final technology {tech.id!r} has no price", entity=tech.id)
        total += state.prices[tech.id] * y
    return total


def country_gdp(economy: Economy, state: FlowState) -> Dict[CountryId, float]:
    """GDP of each country as wage times employed labor."""
    employed = {c.id: 0.0 for c in economy.countries}
    for (country, _), amount in state.labor_flows.items():
        employed[country] += amount
    return {country: state.wages.get(country, 0.0) * labor for country, labor in employed.items()}


def world_labor_income(economy: Economy, state: FlowState) -> float:
    """World wage income; equals ``gdp`` in an equilibrium with zero profits."""
    return sum(country_gdp(economy, state).values())


def market_price(economy: Economy, state: FlowState, good: GoodId) -> Optional[float]:
    """Lowest price among active producers of ``good``, or None when nobody sells it."""
    prices = [state.prices[t] for t in economy.producers(good) if state.output(t) > 0 and t in state.prices]
    return min(prices) if prices else None


# ---------------------------------------------------------------------------
# Equilibrium validation
# ---------------------------------------------------------------------------


def validate_equilibrium(
    economy: Economy, state: FlowState, tolerance: float = DEFAULT_TOLERANCE
) -> List[Violation]:
    """
    Check every equilibrium condition and return the violations.

    Conditions: zero profit for active technologies, non-positive profit for
    inactive ones, feasible production, labor / intermediate / final market
    clearing, a single price per final good, and cost-minimizing sourcing.
    An empty list means the state is an equilibrium within ``tolerance``.
    """
    violations: List[Violation] = []
    violations.extend(_check_profits(economy, state, tolerance))
    violations.extend(_check_feasibility(economy, state, tolerance))
    violations.extend(_check_markets(economy, state, tolerance))
    violations.extend(_check_sourcing(economy, state, tolerance))
    logger.debug("Equilibrium validation found %d violations", len(violations))
    return violations


def require_equilibrium(economy: Economy, state: FlowState, tolerance: float = DEFAULT_TOLERANCE) -> None:
    """Raise NotEquilibriumError unless ``state`` validates."""
    violations = validate_equilibrium(economy, state, tolerance)
    if violations:
        listed = "; ".join(str(v) for v in violations[:3])
        more = f" (+{len(violations) - 3} more)" if len(violations) > 3 else ""
        raise NotEquilibriumError(f"flow state is not an equilibrium: {listed}{more}", violations=violations)


def _check_profits(economy: Economy, state: FlowState, tolerance: float) -> List[Violation]:
    violations = []
    for tech in economy.technologies:
        active = state.output(tech.id) > 0
        try:
            cost = unit_cost(economy, state, tech.id)
        except (NoProducerError, MissingPriceError) as exc:
            if active:
                violations.append(Violation(condition="zero_profit", entity=tech.id, residual=float("inf"), detail=str(exc)))
            continue
        if active:
            if tech.id not in state.prices:
                violations.append(
                    Violation(condition="zero_profit", entity=tech.id, residual=float("inf"), detail="missing price")
                )
                continue
            profit = state.prices[tech.id] - cost
            if abs(profit) > tolerance:
                violations.append(Violation(condition="zero_profit", entity=tech.id, residual=profit))
        else:
            price = market_price(economy, state, tech.output)
            if price is not None and price - cost > tolerance:
                violations.append(Violation(condition="nonpositive_profit", entity=tech.id, residual=price - cost))
    return violations


def _check_feasibility(economy: Economy, state: FlowState, tolerance: float) -> List[Violation]:
    received_labor: Dict[TechId, float] = {}
    for (country, dest), amount in state.labor_flows.items():
        theta = economy.transport.labor_cost(country, economy.tech(dest))
        if theta is None:
            received_labor[dest] = float("nan")
            continue
        received_labor[dest] = received_labor.get(dest, 0.0) + amount / theta

    received_goods: Dict[Tuple[TechId, GoodId], float] = {}
    for (source, dest), amount in state.good_flows.items():
        key = (dest, economy.tech(source).output)
        received_goods[key] = received_goods.get(key, 0.0) + amount / economy.transport.good_cost(source, dest)

    violations = []
    for tech in economy.technologies:
        y = state.output(tech.id)
        labor = received_labor.get(tech.id, 0.0)
        if labor != labor:
            violations.append(
                Violation(condition="feasibility", entity=tech.id, residual=float("inf"), detail="labor from ineligible country")
            )
            continue
        worst, worst_detail = labor - tech.labor_input * y, "labor"
        goods = {good for (dest, good) in received_goods if dest == tech.id} | set(tech.inputs)
        for good in sorted(goods):
            residual = received_goods.get((tech.id, good), 0.0) - tech.inputs.get(good, 0.0) * y
            if abs(residual) > abs(worst):
                worst, worst_detail = residual, good
        if abs(worst) > tolerance:
            violations.append(Violation(condition="feasibility", entity=tech.id, residual=worst, detail=worst_detail))
    return violations


def _check_markets(economy: Economy, state: FlowState, tolerance: float) -> List[Violation]:
    violations = []

    employed = {c.id: 0.0 for c in economy.countries}
    for (country, _), amount in state.labor_flows.items():
        employed[country] += amount
    for country in economy.countries:
        residual = employed[country.id] - country.labor
        if abs(residual) > tolerance:
            violations.append(Violation(condition="labor_market", entity=country.id, residual=residual))

    shipped: Dict[TechId, float] = {}
    for (source, _), amount in state.good_flows.items():
        shipped[source] = shipped.get(source, 0.0) + amount
    for tech in economy.technologies:
        if economy.is_final_tech(tech.id):
            if shipped.get(tech.id, 0.0) > tolerance:
                violations.append(
                    Violation(
                        condition="final_market",
                        entity=tech.id,
                        residual=shipped[tech.id],
                        detail="final goods are consumed, not shipped to producers",
                    )
                )
            continue
        residual = shipped.get(tech.id, 0.0) - state.output(tech.id)
        if abs(residual) > tolerance:
            violations.append(Violation(condition="intermediate_market", entity=tech.id, residual=residual))

    for good in economy.final_goods():
        prices = [state.prices[t] for t in economy.producers(good) if state.output(t) > 0 and t in state.prices]
        if len(prices) > 1 and max(prices) - min(prices) > tolerance:
            violations.append(Violation(condition="final_price", entity=good, residual=max(prices) - min(prices)))

    if economy.demand_shares is not None:
        try:
            total = gdp(economy, state)
        except MissingPriceError:
            total = 0.0
        if total > 0:
            for good, share in sorted(economy.demand_shares.items()):
                spent = sum(state.prices.get(t, 0.0) * state.output(t) for t in economy.producers(good))
                residual = spent / total - share
                if abs(residual) > tolerance:
                    violations.append(
                        Violation(condition="final_market", entity=good, residual=residual, detail="expenditure share")
                    )
    return violations


def _check_sourcing(economy: Economy, state: FlowState, tolerance: float) -> List[Violation]:
    violations = []
    for (source, dest), amount in sorted(state.good_flows.items()):
        if amount <= tolerance or source not in state.prices:
            continue
        good = economy.tech(source).output
        try:
            best, _ = effective_input_price(economy, state, dest, good)
        except (NoProducerError, MissingPriceError):
            continue
        paid = economy.transport.good_cost(source, dest) * state.prices[source]
        if paid - best > tolerance:
            violations.append(Violation(condition="cost_minimization", entity=f"{source}->{dest}", residual=paid - best))
    for (country, dest), amount in sorted(state.labor_flows.items()):
        if amount <= tolerance or country not in state.wages:
            continue
        tech = economy.tech(dest)
        theta = economy.transport.labor_cost(country, tech)
        best_wage, _ = effective_wage(economy, state, tech)
        if theta is not None and theta * state.wages[country] - best_wage > tolerance:
            violations.append(
                Violation(
                    condition="cost_minimization",
                    entity=f"{country}->{dest}",
                    residual=theta * state.wages[country] - best_wage,
                )
            )
    return violations


# ---------------------------------------------------------------------------
# Indexed network view
# ---------------------------------------------------------------------------


class NetworkView:
    """
    Array-indexed view of an economy and an equilibrium flow state.

    Technologies are indexed in declaration order. Positive good flows become
    edges; edges arriving at the same technology carrying the same good form a
    group, the unit over which input availability is measured. ``received``
    holds edge amounts net of iceberg losses.
    """

    def __init__(self, economy: Economy, state: FlowState):
        self.economy = economy
        self.state = state
        self.tech_ids: List[TechId] = [t.id for t in economy.technologies]
        self.index: Dict[TechId, int] = {tech_id: i for i, tech_id in enumerate(self.tech_ids)}
        self.n_techs = len(self.tech_ids)

        self.outputs = np.array([state.output(t) for t in self.tech_ids], dtype=float)
        self.prices = np.array([state.prices.get(t, 0.0) for t in self.tech_ids], dtype=float)
        self.is_final = np.array([economy.is_final_tech(t) for t in self.tech_ids], dtype=bool)
        self.active = self.outputs > 0
        self.tech_country: List[CountryId] = [t.country for t in economy.technologies]
        self.tech_good: List[GoodId] = [t.output for t in economy.technologies]

        edges = sorted((key, amount) for key, amount in state.good_flows.items() if amount > 0)
        self.edge_keys: List[Tuple[TechId, TechId]] = [key for key, _ in edges]
        self.edge_src = np.array([self.index[s] for (s, _), _ in edges], dtype=int)
        self.edge_dst = np.array([self.index[d] for (_, d), _ in edges], dtype=int)
        self.edge_amount = np.array([amount for _, amount in edges], dtype=float)
        theta = [economy.transport.good_cost(s, d) for (s, d), _ in edges]
        self.edge_received = self.edge_amount / np.array(theta, dtype=float) if edges else np.zeros(0)

        group_index: Dict[Tuple[int, GoodId], int] = {}
        edge_group = []
        for (source, dest), _ in edges:
            key = (self.index[dest], economy.tech(source).output)
            edge_group.append(group_index.setdefault(key, len(group_index)))
        self.edge_group = np.array(edge_group, dtype=int)
        self.group_keys: List[Tuple[int, GoodId]] = list(group_index)
        self.group_tech = np.array([tech for tech, _ in self.group_keys], dtype=int)
        self.n_groups = len(self.group_keys)
        self.group_inflow = (
            np.bincount(self.edge_group, weights=self.edge_received, minlength=self.n_groups)
            if edges
            else np.zeros(0)
        )

        labor = sorted((key, amount) for key, amount in state.labor_flows.items() if amount > 0)
        self.labor_keys: List[Tuple[CountryId, TechId]] = [key for key, _ in labor]
        self.labor_country: List[CountryId] = [c for (c, _), _ in labor]
        self.labor_tech = np.array([self.index[t] for (_, t), _ in labor], dtype=int)
        self.labor_amount = np.array([amount for _, amount in labor], dtype=float)
        self.country_ids: List[CountryId] = [c.id for c in economy.countries]
        self.wages = np.array([state.wages.get(c, 0.0) for c in self.country_ids], dtype=float)
        country_index = {c: i for i, c in enumerate(self.country_ids)}
        self.labor_country_idx = np.array([country_index[c] for c in self.labor_country], dtype=int)

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Directed graph of active technologies with an edge per positive good flow."""
        graph = nx.DiGraph()
        for i, tech_id in enumerate(self.tech_ids):
            if self.active[i]:
                graph.add_node(
                    tech_id,
                    country=self.tech_country[i],
                    good=self.tech_good[i],
                    final=bool(self.is_final[i]),
                )
        for k, (source, dest) in enumerate(self.edge_keys):
            graph.add_edge(source, dest, amount=float(self.edge_amount[k]), good=self.tech_good[self.index[source]])
        return graph

    @cached_property
    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)

    @cached_property
    def topological_order(self) -> List[TechId]:
        """Technologies in topological order; on cyclic networks, declaration order."""
        if self.is_acyclic:
            return list(nx.lexicographical_topological_sort(self.graph))
        return [t for t in self.tech_ids if t in self.graph]

    @cached_property
    def gdp(self) -> float:
        return float(np.sum(self.prices * self.outputs * self.is_final))

    def final_value(self, outputs: np.ndarray) -> float:
        return float(np.sum(self.prices * outputs * self.is_final))

    def downstream_finals(self, shocked: Iterable[TechId]) -> Set[TechId]:
        """Final-good technologies reachable over positive flows from any shocked technology."""
        reached: Set[TechId] = set()
        for tech in shocked:
            if tech in self.graph:
                reached.add(tech)
                reached |= nx.descendants(self.graph, tech)
        return {t for t in reached if self.graph.nodes[t]["final"]}

    def upstream_set(self, tech: TechId) -> Set[TechId]:
        """Technologies with a directed path of positive flows into ``tech``."""
        if tech not in self.graph:
            return set()
        return set(nx.ancestors(self.graph, tech))

    def check_shock(self, shock: ShockSpec) -> None:
        for tech in sorted(shock.shocked):
            if not self.economy.has_tech(tech):
                raise UnknownEntityError(f"shock names unknown technology {tech!r}", entity=tech)
            if not self.active[self.index[tech]]:
                raise InactiveTechError(f"shocked technology {tech!r} is not active", entity=tech)

    def country_losses(self, ratios: np.ndarray) -> Tuple[Dict[CountryId, float], Dict[CountryId, float]]:
        """Idle labor and wage-weighted GDP loss per country when each tech runs at ``ratios`` of its output."""
        idle_by_flow = self.labor_amount * (1.0 - np.minimum(ratios[self.labor_tech], 1.0))
        idle = np.bincount(self.labor_country_idx, weights=idle_by_flow, minlength=len(self.country_ids))
        idle_map = {c: float(idle[i]) for i, c in enumerate(self.country_ids)}
        lost_map = {c: float(idle[i] * self.wages[i]) for i, c in enumerate(self.country_ids)}
        return idle_map, lost_map

    def scaled_state(self, ratios: np.ndarray, output_multiplier: Optional[np.ndarray] = None) -> FlowState:
        """Flow state in which every technology runs at ``ratios`` of its equilibrium level."""
        multiplier = np.ones(self.n_techs) if output_multiplier is None else output_multiplier
        outputs = {t: float(self.outputs[i] * ratios[i] * multiplier[i]) for i, t in enumerate(self.tech_ids)}
        good_flows = {key: float(self.edge_amount[k] * ratios[self.edge_src[k]]) for k, key in enumerate(self.edge_keys)}
        labor_flows = {
            key: float(self.labor_amount[k] * min(ratios[self.labor_tech[k]], 1.0))
            for k, key in enumerate(self.labor_keys)
        }
        return FlowState(
            good_flows=good_flows,
            labor_flows=labor_flows,
            outputs=outputs,
            prices=dict(self.state.prices),
            wages=dict(self.state.wages),
        )
