"""
Disruption centrality

This module measures how much of final-good production a single technology
can pull down in the short run, discounted through the sourcing shares of
every technology between it and the final goods.

Metrics include:
1. Sourcing shares: Who buys how much of each input from whom
2. Disruption centrality: Value-weighted reach of one technology
3. Ranking: Every active technology ordered by centrality
"""

import logging
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from ..base_analyzer import BaseAnalyzer
from ..data_objects import Economy, FlowState, GoodId, TechId
from ..errors import CyclicError, InactiveTechError, InvariantError

logger = logging.getLogger(__name__)

OrderKey = Callable[[TechId], Any]


class SourcingShares(BaseModel):
    """
    Share of each final good made by each producer, and share of each
    user's input good bought from each supplier.
    """

    model_config = ConfigDict(frozen=True)

    final_shares: Dict[Tuple[GoodId, TechId], float]
    input_shares: Dict[Tuple[TechId, TechId], float]


class CentralityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    tech: TechId
    affected_finals: FrozenSet[GoodId]
    d_values: Dict[Tuple[GoodId, TechId], float]
    dc: float

    def scaled_loss(self, lam: float) -> float:
        """Loss fraction of GDP when the technology keeps ``lam`` of its output."""
        return (1.0 - lam) * self.dc


class CentralityAnalyzer(BaseAnalyzer):
    """Disruption centrality over acyclic equilibrium supply networks."""

    def analyze(self, tech: Optional[TechId] = None, **kwargs: Any) -> Dict[str, Any]:
        """
        Centrality of one technology, or a ranking of every active technology.

        Returns:
            Dictionary with ``rows`` of tech/dc (and scaled_loss when ``lam`` is given)
        """
        lam = kwargs.get("lam")
        reports = [self.disruption_centrality(tech)] if tech is not None else self.rank_all()
        rows = []
        for report in reports:
            row: Dict[str, Any] = {"tech": report.tech, "dc": report.dc}
            if lam is not None:
                row["scaled_loss"] = report.scaled_loss(lam)
            rows.append(row)
        return {"rows": rows}

    def sourcing_shares(self) -> SourcingShares:
        nv = self.network
        final_totals: Dict[GoodId, float] = {}
        for i, tech in enumerate(nv.tech_ids):
            if nv.is_final[i] and nv.active[i]:
                final_totals[nv.tech_good[i]] = final_totals.get(nv.tech_good[i], 0.0) + nv.outputs[i]
        final_shares = {
            (nv.tech_good[i], tech): float(nv.outputs[i] / final_totals[nv.tech_good[i]])
            for i, tech in enumerate(nv.tech_ids)
            if nv.is_final[i] and nv.active[i]
        }
        input_shares = {
            (dest, source): float(nv.edge_received[k] / nv.group_inflow[nv.edge_group[k]])
            for k, (source, dest) in enumerate(nv.edge_keys)
        }
        return SourcingShares(final_shares=final_shares, input_shares=input_shares)

    def disruption_centrality(self, tech: TechId, order_key: Optional[OrderKey] = None) -> CentralityReport:
        """
        Disruption centrality of one technology.

        For each final good reachable from ``tech``, d is 1 at ``tech``, 0 off
        the technologies lying between ``tech`` and the good's producers, and
        elsewhere the largest supplier-share-weighted d over the input goods.
        The result is the GDP-weighted sum of d at the final producers.

        Args:
            tech: Technology id
            order_key: Tie-break key for the topological order (any valid order gives the same values)

        Raises:
            InactiveTechError: The technology does not operate
            CyclicError: Some between-network contains a directed cycle
        """
        nv = self.network
        self.economy.tech(tech)
        if not nv.active[nv.index[tech]]:
            raise InactiveTechError(f"technology {tech!r} is not active", entity=tech)

        shares = self.sourcing_shares()
        reached = nx.descendants(nv.graph, tech) | {tech}
        finals = sorted({nv.graph.nodes[t]["good"] for t in reached if nv.graph.nodes[t]["final"]})

        d_values: Dict[Tuple[GoodId, TechId], float] = {}
        dc = 0.0
        for good in finals:
            producers = [t for t in self.economy.producers(good) if nv.active[nv.index[t]]]
            d = self._d_values(tech, producers, reached, shares, order_key)
            d_values.update({(good, node): value for node, value in d.items()})
            good_value = sum(nv.prices[nv.index[t]] * nv.outputs[nv.index[t]] for t in producers)
            reach = sum(d.get(t, 0.0) * shares.final_shares[(good, t)] for t in producers)
            dc += good_value * reach
        dc = dc / nv.gdp if nv.gdp > 0 else 0.0
        logger.debug("DC(%s) = %.6g over %d final goods", tech, dc, len(finals))
        return CentralityReport(tech=tech, affected_finals=frozenset(finals), d_values=d_values, dc=float(dc))

    def _d_values(
        self,
        tech: TechId,
        producers: List[TechId],
        reached: set,
        shares: SourcingShares,
        order_key: Optional[OrderKey],
    ) -> Dict[TechId, float]:
        graph = self.network.graph
        between = set()
        for producer in producers:
            if producer in reached:
                between |= (nx.ancestors(graph, producer) | {producer}) & reached
        sub = graph.subgraph(between)
        try:
            order = list(nx.lexicographical_topological_sort(sub, key=order_key))
        except nx.NetworkXUnfeasible:
            cycle = [edge[0] for edge in nx.find_cycle(sub)]
            raise CyclicError(
                f"technologies between {tech!r} and its final goods form a cycle: {' -> '.join(cycle)}",
                cycle=cycle,
            ) from None

        d: Dict[TechId, float] = {tech: 1.0}
        for node in order:
            if node == tech:
                continue
            by_good: Dict[GoodId, float] = {}
            for source in graph.predecessors(node):
                good = graph.nodes[source]["good"]
                weight = d.get(source, 0.0) * shares.input_shares[(node, source)]
                by_good[good] = by_good.get(good, 0.0) + weight
            d[node] = max(by_good.values(), default=0.0)
        return d

    def rank_all(self, skip_cyclic: bool = True) -> List[CentralityReport]:
        """
        Centrality of every active technology, highest first (ties by id).

        Args:
            skip_cyclic: Leave out technologies whose between-network is cyclic instead of raising
        """
        reports = []
        for i, tech in enumerate(self.network.tech_ids):
            if not self.network.active[i]:
                continue
            try:
                reports.append(self.disruption_centrality(tech))
            except CyclicError as exc:
                if not skip_cyclic:
                    raise
                logger.warning("Skipping %s: %s", tech, exc)
        reports.sort(key=lambda report: (-report.dc, report.tech))
        logger.info("Ranked %d technologies by disruption centrality", len(reports))
        return reports


def sourcing_shares(economy: Economy, state: FlowState) -> SourcingShares:
    return CentralityAnalyzer(economy, state).sourcing_shares()


def disruption_centrality(economy: Economy, state: FlowState, tech: TechId) -> CentralityReport:
    return CentralityAnalyzer(economy, state).disruption_centrality(tech)


def rank_all(economy: Economy, state: FlowState, lam: Optional[float] = None) -> List[Dict[str, Any]]:
    """Ranked rows of tech, dc and, when ``lam`` is given, scaled_loss = (1 - lam) * dc."""
    if lam is not None and lam < 0:
        raise InvariantError(f"lambda must be nonnegative, got {lam}", entity="lambda")
    return CentralityAnalyzer(economy, state).analyze(lam=lam)["rows"]
