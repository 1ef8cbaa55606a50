"""
Fragility: expected losses from random disruptions as supply chains grow complex.

Every intermediate technology is disrupted independently with probability pi
and then keeps a fraction lambda of its output. Complex chains, with many
technologies upstream of each final good, are hit more often in the short run;
in the long run the Hulten statistic discounts the same shocks by how little
each intermediate is worth.

Metrics include:
1. Complexity statistics: S, q and m of a network
2. Closed-form expected losses for small pi
3. Monte Carlo expected losses, short run and long run
4. Consolidation: fewer upstream technologies against larger final output
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from ..base_analyzer import BaseAnalyzer
from ..data_objects import Economy, FlowState, GoodId, ShockSpec, TechId
from ..errors import InvariantError, PreconditionError
from .propagation import PropagationAnalyzer

logger = logging.getLogger(__name__)

MC_CHUNK = 20_000


class ComplexityStats(BaseModel):
    """
    Complexity of a supply network.

    S is the mean number of distinct intermediate technologies upstream of a
    final good, m the mean number of final goods downstream of an intermediate
    technology, and q the mean intermediate expenditure over the mean final
    good expenditure. ``m == S * F_count / M_count`` whenever both counts are
    positive.
    """

    model_config = ConfigDict(frozen=True)

    S: float
    q: float
    m: float
    M_count: int
    F_count: int


class MonteCarloEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    short_run_mean: float
    long_run_mean: float
    short_run_se: float
    long_run_se: float
    trials: int
    seed: int
    patterns: int = 0


class ConsolidationReport(BaseModel):
    """Disruption probability and conditional short-run loss of one final good in two economies."""

    model_config = ConfigDict(frozen=True)

    final_good: GoodId
    upstream_1: List[TechId]
    upstream_2: List[TechId]
    prob_1: float
    prob_2: float
    conditional_size_1: float
    conditional_size_2: float
    unconditional_1: float
    unconditional_2: float
    fewer_disruptions: bool
    larger_disruptions: bool


def _check_probability(pi: float, lam: float) -> None:
    if not 0.0 <= pi <= 1.0:
        raise InvariantError(f"pi must lie in [0, 1], got {pi}", entity="pi")
    if not 0.0 <= lam <= 1.0:
        raise InvariantError(f"lambda must lie in [0, 1], got {lam}", entity="lambda")


def expected_loss_formulas(stats: ComplexityStats, pi: float, lam: float) -> Tuple[float, float]:
    """
    First-order expected GDP loss fractions (short run, long run).

    Valid while pi * S is small; larger pi double counts shocks that hit the
    same chain.
    """
    _check_probability(pi, lam)
    short_run = (1.0 - lam) * pi * stats.S
    long_run = short_run * stats.q / stats.m if stats.m > 0 else 0.0
    return short_run, long_run


class FragilityAnalyzer(BaseAnalyzer):
    """Complexity statistics and random-disruption losses of one economy."""

    def analyze(
        self,
        pi: float = 0.01,
        lam: float = 0.9,
        trials: int = 10_000,
        seed: int = 0,
        compare_formula: bool = False,
        **kwargs: Any,
    ) -> Dict[str, Any]:
        stats = self.complexity_stats()
        estimate = self.expected_loss_mc(pi, lam, trials, seed, progress=kwargs.get("progress", False))
        result: Dict[str, Any] = {**stats.model_dump(), **estimate.model_dump()}
        if compare_formula:
            short_run, long_run = expected_loss_formulas(stats, pi, lam)
            result.update({"formula_short_run": short_run, "formula_long_run": long_run})
        return result

    def _intermediates(self) -> List[TechId]:
        nv = self.network
        return [t for i, t in enumerate(nv.tech_ids) if nv.active[i] and not nv.is_final[i]]

    def complexity_stats(self) -> ComplexityStats:
        nv = self.network
        graph = nv.graph
        intermediates = self._intermediates()
        finals: Dict[GoodId, List[TechId]] = {}
        for i, tech in enumerate(nv.tech_ids):
            if nv.active[i] and nv.is_final[i]:
                finals.setdefault(nv.tech_good[i], []).append(tech)

        upstream_counts = []
        for producers in finals.values():
            upstream = set().union(*(nx.ancestors(graph, t) for t in producers))
            upstream_counts.append(sum(1 for t in upstream if not graph.nodes[t]["final"]))
        downstream_counts = []
        for tech in intermediates:
            reached = nx.descendants(graph, tech)
            downstream_counts.append(len({graph.nodes[t]["good"] for t in reached if graph.nodes[t]["final"]}))

        expenditure = nv.prices * nv.outputs
        mean_final = float(np.mean([sum(expenditure[nv.index[t]] for t in ts) for ts in finals.values()])) if finals else 0.0
        mean_intermediate = float(np.mean([expenditure[nv.index[t]] for t in intermediates])) if intermediates else 0.0
        return ComplexityStats(
            S=float(np.mean(upstream_counts)) if upstream_counts else 0.0,
            q=mean_intermediate / mean_final if mean_final > 0 else 0.0,
            m=float(np.mean(downstream_counts)) if downstream_counts else 0.0,
            M_count=len(intermediates),
            F_count=len(finals),
        )

    def expected_loss_mc(
        self, pi: float, lam: float, trials: int, seed: int, progress: bool = False
    ) -> MonteCarloEstimate:
        """
        Monte Carlo expected loss fractions.

        Each trial shocks every intermediate technology independently with
        probability ``pi``; all shocked technologies keep ``lam`` of their
        output. The short-run loss is the propagated loss; the long-run loss is
        the Hulten extrapolation summed over the shocked technologies. Draws
        come from ``numpy.random.default_rng(seed)`` in fixed-size chunks, so
        the seed determines every trial's shock set.
        """
        _check_probability(pi, lam)
        if trials < 1:
            raise InvariantError(f"trials must be positive, got {trials}", entity="trials")
        nv = self.network
        intermediates = self._intermediates()
        if not intermediates:
            return MonteCarloEstimate(
                short_run_mean=0.0, long_run_mean=0.0, short_run_se=0.0, long_run_se=0.0, trials=trials, seed=seed
            )
        shares = np.array([nv.prices[nv.index[t]] * nv.outputs[nv.index[t]] for t in intermediates]) / nv.gdp
        short_run = PropagationAnalyzer(self.economy, self.state, tolerance=self.tolerance, validate=False)

        cache: Dict[bytes, float] = {}

        def short_run_loss(pattern: np.ndarray) -> float:
            key = pattern.tobytes()
            if key not in cache:
                shocked = [t for t, hit in zip(intermediates, pattern) if hit]
                cache[key] = short_run.propagate(ShockSpec.of(shocked, lam)).loss_fraction if shocked else 0.0
            return cache[key]

        rng = np.random.default_rng(seed)
        sr_losses = np.empty(trials)
        lr_losses = np.empty(trials)
        done = 0
        with tqdm(total=trials, desc="trials", disable=not progress) as bar:
            while done < trials:
                size = min(MC_CHUNK, trials - done)
                hits = rng.random((size, len(intermediates))) < pi
                patterns, inverse = np.unique(hits, axis=0, return_inverse=True)
                values = np.array([short_run_loss(p) for p in patterns])
                sr_losses[done:done + size] = values[inverse.reshape(-1)]
                lr_losses[done:done + size] = (1.0 - lam) * (hits @ shares)
                done += size
                bar.update(size)

        ddof = 1 if trials > 1 else 0
        logger.info("Ran %d trials over %d distinct shock patterns", trials, len(cache))
        return MonteCarloEstimate(
            short_run_mean=float(np.mean(sr_losses)),
            long_run_mean=float(np.mean(lr_losses)),
            short_run_se=float(np.std(sr_losses, ddof=ddof) / np.sqrt(trials)),
            long_run_se=float(np.std(lr_losses, ddof=ddof) / np.sqrt(trials)),
            trials=trials,
            seed=seed,
            patterns=len(cache),
        )

    def upstream_of(self, good: GoodId) -> Tuple[List[TechId], float]:
        """Intermediate technologies upstream of a final good, and the good's value."""
        nv = self.network
        producers = [t for t in self.economy.producers(good) if nv.active[nv.index[t]]]
        if not producers:
            raise PreconditionError(f"good {good!r} is not produced", entity=good)
        upstream = set().union(*(nx.ancestors(nv.graph, t) for t in producers))
        value = sum(nv.prices[nv.index[t]] * nv.outputs[nv.index[t]] for t in producers)
        return sorted(t for t in upstream if not nv.graph.nodes[t]["final"]), float(value)


def complexity_stats(economy: Economy, state: FlowState) -> ComplexityStats:
    return FragilityAnalyzer(economy, state).complexity_stats()


def expected_loss_mc(
    economy: Economy, state: FlowState, pi: float, lam: float, trials: int, seed: int, progress: bool = False
) -> MonteCarloEstimate:
    return FragilityAnalyzer(economy, state).expected_loss_mc(pi, lam, trials, seed, progress)


def consolidation_compare(
    economy1: Economy,
    state1: FlowState,
    economy2: Economy,
    state2: FlowState,
    final_good: GoodId,
    pi: float,
    lam: float,
) -> ConsolidationReport:
    """
    Compare a final good in a complex economy against a consolidated one.

    Economy 2 must source the good from a strict subset of economy 1's
    upstream technologies (matched by id) and produce more of it. The
    conditional loss size assumes the shock removes a fraction 1 - lam of the
    good's value.

    Raises:
        PreconditionError: Either hypothesis fails or the good is not produced
    """
    _check_probability(pi, lam)
    upstream_1, value_1 = FragilityAnalyzer(economy1, state1).upstream_of(final_good)
    upstream_2, value_2 = FragilityAnalyzer(economy2, state2).upstream_of(final_good)
    if not set(upstream_2) < set(upstream_1):
        raise PreconditionError(
            "upstream technologies of economy 2 are not a strict subset of economy 1's", entity=final_good
        )
    output_1 = sum(state1.output(t) for t in economy1.producers(final_good))
    output_2 = sum(state2.output(t) for t in economy2.producers(final_good))
    if output_2 <= output_1:
        raise PreconditionError(
            f"economy 2 produces {output_2:g} of {final_good!r}, not more than economy 1's {output_1:g}",
            entity=final_good,
        )
    prob_1 = 1.0 - (1.0 - pi) ** len(upstream_1)
    prob_2 = 1.0 - (1.0 - pi) ** len(upstream_2)
    size_1 = (1.0 - lam) * value_1
    size_2 = (1.0 - lam) * value_2
    return ConsolidationReport(
        final_good=final_good,
        upstream_1=upstream_1,
        upstream_2=upstream_2,
        prob_1=prob_1,
        prob_2=prob_2,
        conditional_size_1=size_1,
        conditional_size_2=size_2,
        unconditional_1=prob_1 * size_1,
        unconditional_2=prob_2 * size_2,
        fewer_disruptions=prob_2 < prob_1,
        larger_disruptions=size_2 > size_1,
    )


def configuration_table(
    pi: float, lam: float, trials: int, seed: int, progress: bool = False
) -> List[Dict[str, Any]]:
    """Vertical, horizontal and parallel configurations side by side, formula next to Monte Carlo."""
    from ..fixtures import FixtureId, build

    rows = []
    for fixture in (FixtureId.FIG12_VERTICAL, FixtureId.FIG12_HORIZONTAL, FixtureId.FIG12_PARALLEL):
        analyzer = FragilityAnalyzer(*build(fixture))
        stats = analyzer.complexity_stats()
        short_run, long_run = expected_loss_formulas(stats, pi, lam)
        estimate = analyzer.expected_loss_mc(pi, lam, trials, seed, progress)
        rows.append(
            {
                "configuration": fixture.value,
                "S": stats.S,
                "q": stats.q,
                "m": stats.m,
                "formula_short_run": short_run,
                "formula_long_run": long_run,
                "mc_short_run": estimate.short_run_mean,
                "mc_long_run": estimate.long_run_mean,
                "se_short_run": estimate.short_run_se,
                "se_long_run": estimate.long_run_se,
            }
        )
    return rows


def fragility_report(
    economy: Economy,
    state: FlowState,
    pi: float,
    lam: float,
    trials: int,
    seed: int,
    compare_formula: bool = False,
    progress: Optional[bool] = None,
) -> Dict[str, Any]:
    return FragilityAnalyzer(economy, state).analyze(
        pi=pi, lam=lam, trials=trials, seed=seed, compare_formula=compare_formula, progress=bool(progress)
    )
