"""
Power: how much one country can hurt another per unit of its own loss.

An aggressor withholds part of one of its technologies' output. The cut runs
downstream in topological order, where the aggressor routes shortfalls at its
own technologies and every other country rations proportionally, and then
back upstream, where reduced demand idles labor at the suppliers. GDP losses
are wage-weighted idle labor at pre-shock wages.

While no flow reaches zero the procedure is linear in the size of the cut, so
every disruption is computed once per unit of withheld output and scaled.

Operations:
1. individual_disruption / compose: Execute consistent disruptions
2. power: Best single-technology disruption over pure routings
3. frontier: Own loss against target loss, with flows cut to zero
4. strategic_power: Zero-sum variant where the target routes its own cuts
5. power_matrix: Power for every ordered pair of countries
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from ..base_analyzer import BaseAnalyzer
from ..core_model import NetworkView, country_gdp
from ..data_objects import CountryId, DisruptionOutcome, Economy, FlowState, GoodId, TechId
from ..errors import (
    CyclicNetworkError,
    ForeignTechError,
    InactiveTechError,
    InvariantError,
    NoLeverageError,
    NotPartialError,
    TooLargeError,
    UndirectedCycleError,
)

logger = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-9
RATIO_TOLERANCE = 1e-12

# ("down", tech, "") routes a technology's output cut; ("up", tech, good) routes its cut in demand for a good.
DecisionKey = Tuple[str, TechId, str]
Chooser = Callable[[DecisionKey, List[int]], Dict[int, float]]


class RoutingStrategy(BaseModel):
    """
    Where discretionary technologies send their cuts.

    ``downstream_routes[tech]`` splits tech's output cut over its customers;
    ``upstream_routes[(tech, good)]`` splits tech's reduced demand for a good
    over its suppliers. Technologies without an entry ration proportionally.
    """

    model_config = ConfigDict(frozen=True)

    downstream_routes: Dict[TechId, Dict[TechId, float]] = Field(default_factory=dict)
    upstream_routes: Dict[Tuple[TechId, GoodId], Dict[TechId, float]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_distributions(self) -> "RoutingStrategy":
        routes = list(self.downstream_routes.items()) + list(self.upstream_routes.items())
        for key, distribution in routes:
            if any(w < 0 for w in distribution.values()) or abs(sum(distribution.values()) - 1.0) > 1e-9:
                raise InvariantError(f"routing for {key} must be a distribution summing to 1", entity=str(key))
        return self

    @classmethod
    def downstream(cls, tech: TechId, customer: TechId) -> "RoutingStrategy":
        """Route the whole output cut of ``tech`` to one customer."""
        return cls(downstream_routes={tech: {customer: 1.0}})

    def describe(self) -> str:
        parts = [f"{t}->{d}" for t, dist in sorted(self.downstream_routes.items()) for d, w in sorted(dist.items()) if w > 0]
        parts += [
            f"{s}=>{t}[{g}]" for (t, g), dist in sorted(self.upstream_routes.items()) for s, w in sorted(dist.items()) if w > 0
        ]
        return "; ".join(parts)


class PowerReport(BaseModel):
    """
    Best disruption found for an aggressor over a target.

    ``own_loss`` and ``target_loss`` are GDP losses per unit of ``best_tech``
    output withheld; ``max_partial_scale`` is the largest fraction of that
    output the disruption can withhold before some flow reaches zero.
    """

    model_config = ConfigDict(frozen=True)

    aggressor: CountryId
    target: CountryId
    best_tech: Optional[TechId] = None
    best_routing: RoutingStrategy = Field(default_factory=RoutingStrategy)
    power_pct: float = 0.0
    power_abs: float = 0.0
    own_loss: float = 0.0
    target_loss: float = 0.0
    max_partial_scale: float = 0.0
    candidates: int = 0
    no_leverage: bool = False
    unbounded: bool = False
    strategic: bool = False


class Frontier(BaseModel):
    """Piecewise-linear maximum target GDP loss (%) against own GDP loss (%)."""

    model_config = ConfigDict(frozen=True)

    aggressor: CountryId
    target: CountryId
    points: List[Tuple[float, float]]
    samples: List[Tuple[float, float]] = Field(default_factory=list)
    states_explored: int = 0

    def value_at(self, own_loss_pct: float) -> float:
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return float(np.interp(own_loss_pct, xs, ys))

    def sample(self, resolution: int) -> List[Tuple[float, float]]:
        """``resolution`` evenly spaced points from zero to the last breakpoint."""
        if resolution < 2:
            raise InvariantError(f"resolution must be at least 2, got {resolution}", entity="resolution")
        end = self.points[-1][0]
        return [(float(x), self.value_at(x)) for x in np.linspace(0.0, end, resolution)]


class _CutPlan:
    """Cuts per unit of withheld output at the starting technology."""

    def __init__(
        self,
        start: TechId,
        edge_cut: np.ndarray,
        output_cut: np.ndarray,
        idle: np.ndarray,
        lost: np.ndarray,
        final_loss: float,
        decisions: Dict[DecisionKey, Dict[int, float]],
    ):
        self.start = start
        self.edge_cut = edge_cut
        self.output_cut = output_cut
        self.idle = idle
        self.lost = lost
        self.final_loss = final_loss
        self.decisions = decisions


class _DisruptionEngine:
    """Two-pass consistent disruption over one rationing baseline."""

    def __init__(self, nv: NetworkView):
        if not nv.is_acyclic:
            cycle = [edge[0] for edge in nx.find_cycle(nv.graph)]
            raise CyclicNetworkError(f"supply network has a directed cycle: {' -> '.join(cycle)}", cycle=cycle)
        self.nv = nv
        self.order = nv.topological_order
        self.position = {tech: k for k, tech in enumerate(self.order)}
        self.out_edges: Dict[int, List[int]] = {}
        self.in_groups: Dict[int, List[int]] = {}
        self.group_edges: Dict[int, List[int]] = {}
        for k in range(len(nv.edge_keys)):
            self.out_edges.setdefault(int(nv.edge_src[k]), []).append(k)
            self.group_edges.setdefault(int(nv.edge_group[k]), []).append(k)
        for g, (tech, _) in enumerate(nv.group_keys):
            self.in_groups.setdefault(tech, []).append(g)
        self.theta = nv.edge_amount / nv.edge_received if len(nv.edge_keys) else np.zeros(0)
        self.country_index = {c: i for i, c in enumerate(nv.country_ids)}

    def run(self, start: TechId, deciders: Set[CountryId], chooser: Chooser) -> _CutPlan:
        """Cuts caused by withholding one unit of ``start``'s output."""
        nv = self.nv
        s = nv.index[start]
        down = np.zeros(len(nv.edge_keys))
        out_cut = np.zeros(nv.n_techs)
        out_cut[s] = 1.0
        decisions: Dict[DecisionKey, Dict[int, float]] = {}

        def route(key: DecisionKey, options: List[int]) -> Dict[int, float]:
            if len(options) == 1:
                return {options[0]: 1.0}
            weights = chooser(key, options)
            decisions[key] = weights
            return weights

        for tech in self.order[self.position[start]:]:
            i = nv.index[tech]
            if i != s:
                shortfall = 0.0
                for g in self.in_groups.get(i, []):
                    received = sum(down[k] / self.theta[k] for k in self.group_edges[g])
                    shortfall = max(shortfall, received / nv.group_inflow[g])
                if shortfall <= 0:
                    continue
                out_cut[i] = shortfall * nv.outputs[i]
            edges = self.out_edges.get(i, [])
            if not edges:
                continue
            if nv.tech_country[i] in deciders:
                for k, w in route(("down", tech, ""), edges).items():
                    down[k] += w * out_cut[i]
            else:
                for k in edges:
                    down[k] += out_cut[i] / nv.outputs[i] * nv.edge_amount[k]

        total = down.copy()
        up = np.zeros(nv.n_techs)
        for tech in reversed(self.order):
            i = nv.index[tech]
            edges = self.out_edges.get(i, [])
            u = max(out_cut[i], float(total[edges].sum())) if edges else out_cut[i]
            if u <= 0:
                continue
            up[i] = u
            fraction = u / nv.outputs[i]
            for g in self.in_groups.get(i, []):
                ks = self.group_edges[g]
                inflow = nv.group_inflow[g]
                extra = fraction * inflow - sum(total[k] / self.theta[k] for k in ks)
                if extra <= ZERO_TOLERANCE * inflow:
                    continue
                if nv.tech_country[i] in deciders:
                    good = nv.group_keys[g][1]
                    for k, w in route(("up", tech, good), ks).items():
                        total[k] += w * extra * self.theta[k]
                else:
                    for k in ks:
                        total[k] += extra * nv.edge_amount[k] / inflow

        fractions = np.divide(up, nv.outputs, out=np.zeros_like(up), where=nv.outputs > 0)
        idle_by_flow = nv.labor_amount * fractions[nv.labor_tech]
        idle = np.bincount(nv.labor_country_idx, weights=idle_by_flow, minlength=len(nv.country_ids))
        final_loss = float(np.sum(nv.prices * up * nv.is_final))
        return _CutPlan(start, total, up, idle, idle * nv.wages, final_loss, decisions)

    def pure_routings(self, start: TechId, deciders: Set[CountryId], budget: int) -> Iterator[_CutPlan]:
        """Every plan in which each discretionary choice sends the whole cut down one flow."""
        choices: List[int] = []
        evaluated = 0
        while True:
            picks: List[int] = []
            counts: List[int] = []

            def chooser(key: DecisionKey, options: List[int]) -> Dict[int, float]:
                depth = len(counts)
                pick = choices[depth] if depth < len(choices) else 0
                picks.append(pick)
                counts.append(len(options))
                return {options[pick]: 1.0}

            plan = self.run(start, deciders, chooser)
            evaluated += 1
            if evaluated > budget:
                raise TooLargeError(f"more than {budget} pure routings from {start!r}")
            yield plan
            depth = len(counts) - 1
            while depth >= 0 and picks[depth] + 1 >= counts[depth]:
                depth -= 1
            if depth < 0:
                return
            choices = picks[:depth] + [picks[depth] + 1]

    def max_partial_units(self, plan: _CutPlan) -> float:
        """Units of withheld output at which the first flow or output reaches zero."""
        nv = self.nv
        limits = [float(nv.edge_amount[k] / plan.edge_cut[k]) for k in np.nonzero(plan.edge_cut > 0)[0]]
        limits += [float(nv.outputs[i] / plan.output_cut[i]) for i in np.nonzero(plan.output_cut > 0)[0]]
        return min(limits) if limits else float("inf")

    def routing_of(self, plan: _CutPlan) -> RoutingStrategy:
        nv = self.nv
        downstream: Dict[TechId, Dict[TechId, float]] = {}
        upstream: Dict[Tuple[TechId, GoodId], Dict[TechId, float]] = {}
        for (kind, tech, good), weights in plan.decisions.items():
            if kind == "down":
                downstream[tech] = {nv.edge_keys[k][1]: float(w) for k, w in weights.items()}
            else:
                upstream[(tech, good)] = {nv.edge_keys[k][0]: float(w) for k, w in weights.items()}
        return RoutingStrategy(downstream_routes=downstream, upstream_routes=upstream)

    def routing_chooser(self, routing: RoutingStrategy) -> Chooser:
        """Chooser following ``routing``; missing entries ration proportionally."""
        nv = self.nv

        def chooser(key: DecisionKey, options: List[int]) -> Dict[int, float]:
            kind, tech, good = key
            if kind == "down":
                distribution = routing.downstream_routes.get(tech)
                label = {nv.edge_keys[k][1]: k for k in options}
                base = {k: float(nv.edge_amount[k]) for k in options}
            else:
                distribution = routing.upstream_routes.get((tech, good))
                label = {nv.edge_keys[k][0]: k for k in options}
                base = {k: float(nv.edge_received[k]) for k in options}
            if distribution is None:
                total = sum(base.values())
                return {k: amount / total for k, amount in base.items()}
            weights = {}
            for other, w in distribution.items():
                if other not in label:
                    raise InvariantError(f"routing at {tech!r} names {other!r}, which has no positive flow", entity=other)
                weights[label[other]] = w
            return weights

        return chooser

    def apply(self, cuts: Sequence[Tuple[_CutPlan, float]], snap: bool = False) -> Tuple[FlowState, np.ndarray, float]:
        """
        Flow state after withholding ``units`` for every (plan, units) pair.

        Returns:
            (state, lost GDP per country, lost final value)

        Raises:
            NotPartialError: Unless ``snap``, when some flow or output would reach zero
        """
        nv = self.nv
        edge_cut = sum((plan.edge_cut * units for plan, units in cuts), np.zeros(len(nv.edge_keys)))
        output_cut = sum((plan.output_cut * units for plan, units in cuts), np.zeros(nv.n_techs))
        lost = sum((plan.lost * units for plan, units in cuts), np.zeros(len(nv.country_ids)))
        final_loss = sum(plan.final_loss * units for plan, units in cuts)

        flows = nv.edge_amount - edge_cut
        outputs = nv.outputs - output_cut
        if snap:
            flows[flows <= ZERO_TOLERANCE * np.maximum(nv.edge_amount, 1.0)] = 0.0
            outputs[outputs <= ZERO_TOLERANCE * np.maximum(nv.outputs, 1.0)] = 0.0
        else:
            for k in np.nonzero(edge_cut > 0)[0]:
                if flows[k] <= ZERO_TOLERANCE * nv.edge_amount[k]:
                    source, dest = nv.edge_keys[k]
                    raise NotPartialError(f"flow {source}->{dest} would be cut to zero", entity=f"{source}->{dest}")
            for i in np.nonzero(output_cut > 0)[0]:
                if outputs[i] <= ZERO_TOLERANCE * nv.outputs[i]:
                    raise NotPartialError(f"output of {nv.tech_ids[i]!r} would be cut to zero", entity=nv.tech_ids[i])

        ratios = np.divide(outputs, nv.outputs, out=np.zeros_like(outputs), where=nv.outputs > 0)
        state = FlowState(
            good_flows={key: float(flows[k]) for k, key in enumerate(nv.edge_keys)},
            labor_flows={
                key: float(nv.labor_amount[k] * ratios[nv.labor_tech[k]]) for k, key in enumerate(nv.labor_keys)
            },
            outputs={t: float(outputs[i]) for i, t in enumerate(nv.tech_ids)},
            prices=dict(nv.state.prices),
            wages=dict(nv.state.wages),
        )
        return state, lost, float(final_loss)


def _ratio(target_loss: float, own_loss: float) -> float:
    if own_loss <= 0:
        return float("inf") if target_loss > 0 else 0.0
    return target_loss / own_loss


def _better(value: float, best: Optional[float], maximize: bool = True) -> bool:
    if best is None:
        return True
    if math.isclose(value, best, rel_tol=RATIO_TOLERANCE, abs_tol=1e-15):
        return False
    return value > best if maximize else value < best


class PowerAnalyzer(BaseAnalyzer):
    """Inter-country power over an acyclic equilibrium supply network."""

    def analyze(
        self,
        aggressor: Optional[CountryId] = None,
        target: Optional[CountryId] = None,
        strategic: bool = False,
        exhaustive: bool = False,
        **kwargs: Any,
    ) -> Dict[str, Any]:
        if aggressor is None or target is None:
            raise InvariantError("an aggressor and a target are required", entity="aggressor")
        if strategic:
            report = self.strategic_power(aggressor, target, exhaustive=exhaustive)
        else:
            report = self.power(aggressor, target, exhaustive=exhaustive, strict=kwargs.get("strict", False))
        return {
            "aggressor": report.aggressor,
            "target": report.target,
            "best_tech": report.best_tech,
            "routing": report.best_routing.describe(),
            "power_pct": report.power_pct,
            "power_abs": report.power_abs,
            "own_loss": report.own_loss,
            "target_loss": report.target_loss,
            "max_partial_scale": report.max_partial_scale,
            "no_leverage": report.no_leverage,
            "unbounded": report.unbounded,
            "strategic": report.strategic,
        }

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _engine(self, nv: Optional[NetworkView] = None) -> _DisruptionEngine:
        return _DisruptionEngine(nv or self.network)

    def _check_pair(self, aggressor: CountryId, target: CountryId) -> Tuple[float, float]:
        self.economy.country(aggressor)
        self.economy.country(target)
        if aggressor == target:
            raise InvariantError("aggressor and target must differ", entity=aggressor)
        gdp = country_gdp(self.economy, self.state)
        return gdp[aggressor], gdp[target]

    def _check_start(self, aggressor: CountryId, tech: TechId, nv: Optional[NetworkView] = None) -> None:
        nv = nv or self.network
        if self.economy.tech(tech).country != aggressor:
            raise ForeignTechError(f"technology {tech!r} does not belong to {aggressor!r}", entity=tech)
        if not nv.active[nv.index[tech]]:
            raise InactiveTechError(f"technology {tech!r} is not active", entity=tech)

    def candidate_techs(
        self, aggressor: CountryId, nv: Optional[NetworkView] = None, exhaustive: bool = False
    ) -> List[TechId]:
        """
        Active technologies of the aggressor worth disrupting, sorted by id.

        Unless ``exhaustive``, only technologies next to the border qualify:
        those with a path to a final good, or from a labor-only technology,
        that avoids the aggressor's other technologies.
        """
        nv = nv or self.network
        graph = nv.graph
        own = sorted(t for t in graph if graph.nodes[t]["country"] == aggressor)
        if exhaustive:
            return own
        foreign = graph.subgraph(t for t in graph if graph.nodes[t]["country"] != aggressor)
        reaches_final: Set[TechId] = set()
        for t in foreign:
            if foreign.nodes[t]["final"]:
                reaches_final |= nx.ancestors(foreign, t) | {t}
        from_raw: Set[TechId] = set()
        for t in foreign:
            if not self.economy.tech(t).inputs:
                from_raw |= nx.descendants(foreign, t) | {t}
        return [
            t
            for t in own
            if any(s in reaches_final for s in graph.successors(t))
            or any(p in from_raw for p in graph.predecessors(t))
        ]

    # ------------------------------------------------------------------
    # Consistent disruptions
    # ------------------------------------------------------------------

    def individual_disruption(
        self,
        aggressor: CountryId,
        tech: TechId,
        scale: float,
        routing: Optional[RoutingStrategy] = None,
    ) -> DisruptionOutcome:
        """
        Consistent disruption withholding ``scale`` of ``tech``'s output.

        Args:
            aggressor: Country owning ``tech``
            tech: Technology whose output is withheld
            scale: Fraction of its output withheld, in (0, 1)
            routing: Aggressor's routing; technologies it omits ration proportionally

        Raises:
            CyclicNetworkError: The supply network has a directed cycle
            ForeignTechError: ``tech`` belongs to another country
            NotPartialError: Some flow would be cut to zero
        """
        return self.compose(aggressor, [(tech, scale, routing or RoutingStrategy())])

    def compose(
        self, aggressor: CountryId, steps: Sequence[Tuple[TechId, float, RoutingStrategy]]
    ) -> DisruptionOutcome:
        """
        Several partial disruptions applied together. Each step is rationed
        against the original equilibrium, so the order of steps is irrelevant.
        """
        self.economy.country(aggressor)
        engine = self._engine()
        nv = self.network
        cuts = []
        for tech, scale, routing in steps:
            self._check_start(aggressor, tech)
            if not 0.0 < scale < 1.0:
                raise InvariantError(f"scale must lie in (0, 1), got {scale}", entity="scale")
            plan = engine.run(tech, {aggressor}, engine.routing_chooser(routing))
            cuts.append((plan, scale * nv.outputs[nv.index[tech]]))
        state, lost, final_loss = engine.apply(cuts)
        idle = sum((plan.idle * units for plan, units in cuts), np.zeros(len(nv.country_ids)))
        return DisruptionOutcome(
            flows=state,
            lost_gdp_total=final_loss,
            lost_gdp_by_country={c: float(lost[k]) for k, c in enumerate(nv.country_ids)},
            idle_labor={c: float(idle[k]) for k, c in enumerate(nv.country_ids)},
            baseline_gdp=nv.gdp,
        )

    # ------------------------------------------------------------------
    # Power
    # ------------------------------------------------------------------

    def power(
        self,
        aggressor: CountryId,
        target: CountryId,
        exhaustive: bool = False,
        strict: bool = False,
        routing_budget: Optional[int] = None,
    ) -> PowerReport:
        """
        Largest ratio of target to own GDP loss over consistent
        single-technology disruptions and pure routings.

        Args:
            aggressor: Disrupting country
            target: Country being hurt
            exhaustive: Try every aggressor technology, not only border ones
            strict: Raise NoLeverageError instead of reporting power 0
            routing_budget: Pure routings per technology (default PRODNET_ROUTING_BUDGET)

        Raises:
            CyclicNetworkError: The supply network has a directed cycle
            NoLeverageError: ``strict`` and the aggressor cannot affect the target
        """
        gdp_own, gdp_target = self._check_pair(aggressor, target)
        engine = self._engine()
        candidates = self.candidate_techs(aggressor, exhaustive=exhaustive)
        budget = self.settings.routing_budget if routing_budget is None else routing_budget
        a, b = engine.country_index[aggressor], engine.country_index[target]

        def best_for(tech: TechId) -> Optional[Tuple[float, _CutPlan]]:
            best: Optional[Tuple[float, _CutPlan]] = None
            for plan in engine.pure_routings(tech, {aggressor}, budget):
                ratio = _ratio(plan.lost[b], plan.lost[a])
                logger.debug("%s via %s: ratio %.6g", tech, engine.routing_of(plan).describe(), ratio)
                if _better(ratio, best[0] if best else None):
                    best = (ratio, plan)
            return best

        workers = min(self.settings.worker_count(), len(candidates)) or 1
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(best_for, candidates))
        else:
            results = [best_for(tech) for tech in candidates]

        best: Optional[Tuple[float, _CutPlan]] = None
        for result in results:
            if result is not None and _better(result[0], best[0] if best else None):
                best = result
        logger.info("Evaluated %d candidate technologies of %s against %s", len(candidates), aggressor, target)
        return self._report(engine, aggressor, target, best, gdp_own, gdp_target, len(candidates), strict, False)

    def _report(
        self,
        engine: _DisruptionEngine,
        aggressor: CountryId,
        target: CountryId,
        best: Optional[Tuple[float, _CutPlan]],
        gdp_own: float,
        gdp_target: float,
        candidates: int,
        strict: bool,
        strategic: bool,
    ) -> PowerReport:
        a, b = engine.country_index[aggressor], engine.country_index[target]
        if best is None or best[1].lost[b] <= 0:
            if strict:
                raise NoLeverageError(f"{aggressor!r} cannot affect {target!r}", entity=target)
            return PowerReport(
                aggressor=aggressor, target=target, candidates=candidates, no_leverage=True, strategic=strategic
            )
        ratio, plan = best
        nv = engine.nv
        start_output = nv.outputs[nv.index[plan.start]]
        pct = ratio * gdp_own / gdp_target if gdp_target > 0 else float("inf")
        return PowerReport(
            aggressor=aggressor,
            target=target,
            best_tech=plan.start,
            best_routing=engine.routing_of(plan),
            power_pct=pct,
            power_abs=ratio,
            own_loss=float(plan.lost[a]),
            target_loss=float(plan.lost[b]),
            max_partial_scale=min(engine.max_partial_units(plan) / start_output, 1.0),
            candidates=candidates,
            unbounded=math.isinf(ratio),
            strategic=strategic,
        )

    def power_matrix(self, exhaustive: bool = False) -> pd.DataFrame:
        """Power (percentage measure) of every row country over every column country."""
        countries = [c.id for c in self.economy.countries]
        matrix = pd.DataFrame(np.nan, index=countries, columns=countries)
        matrix.index.name = "aggressor"
        for aggressor in countries:
            for target in countries:
                if aggressor != target:
                    matrix.loc[aggressor, target] = self.power(aggressor, target, exhaustive=exhaustive).power_pct
        return matrix

    # ------------------------------------------------------------------
    # Frontier
    # ------------------------------------------------------------------

    def frontier(
        self,
        aggressor: CountryId,
        target: CountryId,
        resolution: Optional[int] = None,
        exhaustive: bool = False,
        budget: Optional[int] = None,
        progress: bool = False,
    ) -> Frontier:
        """
        Disruption possibility frontier.

        Searches sequences of individual disruptions, each run with a pure
        routing until its first flow reaches zero; after every zero-out the
        rationing baseline and the candidate set are rebuilt. Steps that leave
        the target untouched are not explored. The frontier is the running
        maximum of target loss over all segments visited.

        Args:
            resolution: Also return this many evenly spaced samples
            budget: Cap on routings evaluated (default PRODNET_FRONTIER_BUDGET)

        Raises:
            TooLargeError: The search exceeds the budget
        """
        gdp_own, gdp_target = self._check_pair(aggressor, target)
        if gdp_own <= 0 or gdp_target <= 0:
            raise InvariantError("both countries need positive GDP", entity=aggressor)
        limit = self.settings.frontier_budget if budget is None else budget
        self._engine()

        segments: List[Tuple[float, float, float, float]] = []
        seen: Set[Tuple] = set()
        evaluated = 0
        stack: List[Tuple[FlowState, float, float]] = [(self.state, 0.0, 0.0)]
        with tqdm(desc="frontier", unit="state", disable=not progress) as bar:
            while stack:
                state, own, hurt = stack.pop()
                key = tuple(sorted((k, round(v, 9)) for k, v in state.good_flows.items() if v > 0))
                key += tuple(sorted((k, round(v, 9)) for k, v in state.outputs.items() if v > 0))
                if key in seen:
                    continue
                seen.add(key)
                bar.update()
                if hurt >= gdp_target * (1 - RATIO_TOLERANCE):
                    continue
                nv = NetworkView(self.economy, state)
                engine = _DisruptionEngine(nv)
                a, b = engine.country_index[aggressor], engine.country_index[target]
                for tech in self.candidate_techs(aggressor, nv, exhaustive):
                    for plan in engine.pure_routings(tech, {aggressor}, limit):
                        evaluated += 1
                        if evaluated > limit:
                            raise TooLargeError(f"frontier search exceeded {limit} routings")
                        if plan.lost[b] <= 0:
                            continue
                        units = engine.max_partial_units(plan)
                        next_own, next_hurt = own + units * plan.lost[a], hurt + units * plan.lost[b]
                        segments.append(
                            (
                                100 * own / gdp_own,
                                100 * hurt / gdp_target,
                                100 * next_own / gdp_own,
                                100 * next_hurt / gdp_target,
                            )
                        )
                        next_state, _, _ = engine.apply([(plan, units)], snap=True)
                        stack.append((next_state, next_own, next_hurt))
        if evaluated > 0.9 * limit:
            logger.warning("frontier search used %d of %d routings", evaluated, limit)
        logger.info("Frontier search explored %d states and %d segments", len(seen), len(segments))

        frontier = Frontier(
            aggressor=aggressor, target=target, points=_upper_envelope(segments), states_explored=len(seen)
        )
        if resolution is not None:
            frontier = frontier.model_copy(update={"samples": frontier.sample(resolution)})
        return frontier

    # ------------------------------------------------------------------
    # Strategic power
    # ------------------------------------------------------------------

    def strategic_power(
        self,
        aggressor: CountryId,
        target: CountryId,
        exhaustive: bool = False,
        routing_budget: Optional[int] = None,
    ) -> PowerReport:
        """
        Power when the target routes the cuts at its own technologies to
        minimize the ratio while the aggressor maximizes it.

        Decisions are taken by backward induction in order of undirected
        distance from the initial technology; a node decides after every
        node closer to the start. Third countries ration proportionally.

        Raises:
            CyclicNetworkError: The supply network has a directed cycle
            UndirectedCycleError: The supply network has an undirected cycle
        """
        gdp_own, gdp_target = self._check_pair(aggressor, target)
        engine = self._engine()
        undirected = self.network.graph.to_undirected()
        if not nx.is_forest(undirected):
            cycle = [edge[0] for edge in nx.find_cycle(undirected)]
            raise UndirectedCycleError(
                f"supply network has an undirected cycle: {' - '.join(cycle)}", cycle=cycle
            )
        budget = self.settings.routing_budget if routing_budget is None else routing_budget
        deciders = {aggressor, target}
        a, b = engine.country_index[aggressor], engine.country_index[target]
        runs = 0

        def solve(tech: TechId, distance: Dict[TechId, int], assignment: Dict[DecisionKey, int]):
            nonlocal runs
            pending: List[Tuple[DecisionKey, List[int]]] = []

            def chooser(key: DecisionKey, options: List[int]) -> Dict[int, float]:
                if key in assignment:
                    return {assignment[key]: 1.0}
                pending.append((key, options))
                return {options[0]: 1.0}

            plan = engine.run(tech, deciders, chooser)
            runs += 1
            if runs > budget:
                raise TooLargeError(f"strategic search exceeded {budget} evaluations")
            if not pending:
                return _ratio(plan.lost[b], plan.lost[a]), plan
            key, options = min(pending, key=lambda item: (distance[item[0][1]], item[0][1], item[0][0], item[0][2]))
            maximize = self.economy.tech(key[1]).country == aggressor
            best = None
            for option in options:
                value, leaf = solve(tech, distance, {**assignment, key: option})
                if _better(value, best[0] if best else None, maximize=maximize):
                    best = (value, leaf)
            return best

        candidates = self.candidate_techs(aggressor, exhaustive=exhaustive)
        best: Optional[Tuple[float, _CutPlan]] = None
        for tech in candidates:
            distance = nx.single_source_shortest_path_length(undirected, tech)
            result = solve(tech, distance, {})
            logger.debug("strategic value from %s: %.6g", tech, result[0])
            if _better(result[0], best[0] if best else None):
                best = result
        logger.info("Strategic power of %s over %s after %d evaluations", aggressor, target, runs)
        return self._report(engine, aggressor, target, best, gdp_own, gdp_target, len(candidates), False, True)


def _upper_envelope(segments: List[Tuple[float, float, float, float]]) -> List[Tuple[float, float]]:
    """Breakpoints of the running maximum over segments, each extended flat past its end."""
    unique = sorted({tuple(round(v, 9) for v in segment) for segment in segments})
    if not unique:
        return [(0.0, 0.0)]

    def value(segment: Tuple[float, ...], x: float) -> float:
        x0, y0, x1, y1 = segment
        if x < x0 - 1e-12:
            return -math.inf
        if x >= x1 or x1 - x0 <= 1e-15:
            return y1
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    xs = {0.0}
    for x0, _, x1, _ in unique:
        xs.update((x0, x1))
    for first, second in combinations(unique, 2):
        for p, q in ((first, second), (second, first)):
            px0, py0, px1, py1 = p
            if px1 - px0 <= 1e-15:
                continue
            slope = (py1 - py0) / (px1 - px0)
            qx0, qy0, qx1, qy1 = q
            # Crossing with q's flat tail.
            if slope > 0:
                x = px0 + (qy1 - py0) / slope
                if max(px0, qx1) < x < px1:
                    xs.add(x)
            # Crossing of the two sloped parts.
            if qx1 - qx0 > 1e-15:
                other = (qy1 - qy0) / (qx1 - qx0)
                if abs(slope - other) > 1e-15:
                    x = (qy0 - other * qx0 - py0 + slope * px0) / (slope - other)
                    if max(px0, qx0) < x < min(px1, qx1):
                        xs.add(x)

    points = [(x, max(0.0, max(value(s, x) for s in unique))) for x in sorted(xs)]
    simplified: List[Tuple[float, float]] = []
    for point in points:
        if simplified and abs(point[0] - simplified[-1][0]) <= 1e-9:
            simplified[-1] = (simplified[-1][0], max(simplified[-1][1], point[1]))
            continue
        while len(simplified) >= 2:
            (x0, y0), (x1, y1) = simplified[-2], simplified[-1]
            if abs((x1 - x0) * (point[1] - y0) - (point[0] - x0) * (y1 - y0)) <= 1e-9 * max(1.0, point[0] - x0):
                simplified.pop()
            else:
                break
        simplified.append(point)
    while len(simplified) >= 2 and simplified[-1][1] - simplified[-2][1] <= 1e-9:
        simplified.pop()
    return [(float(x), float(y)) for x, y in simplified]


def individual_disruption(
    economy: Economy,
    state: FlowState,
    aggressor: CountryId,
    tech: TechId,
    scale: float,
    routing: Optional[RoutingStrategy] = None,
) -> DisruptionOutcome:
    return PowerAnalyzer(economy, state).individual_disruption(aggressor, tech, scale, routing)


def power(economy: Economy, state: FlowState, aggressor: CountryId, target: CountryId, **kwargs: Any) -> PowerReport:
    return PowerAnalyzer(economy, state).power(aggressor, target, **kwargs)


def frontier(
    economy: Economy,
    state: FlowState,
    aggressor: CountryId,
    target: CountryId,
    resolution: Optional[int] = None,
    **kwargs: Any,
) -> Frontier:
    return PowerAnalyzer(economy, state).frontier(aggressor, target, resolution, **kwargs)


def strategic_power(
    economy: Economy, state: FlowState, aggressor: CountryId, target: CountryId, **kwargs: Any
) -> PowerReport:
    return PowerAnalyzer(economy, state).strategic_power(aggressor, target, **kwargs)


def power_matrix(economy: Economy, state: FlowState, exhaustive: bool = False) -> pd.DataFrame:
    return PowerAnalyzer(economy, state).power_matrix(exhaustive)
