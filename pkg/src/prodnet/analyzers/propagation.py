"""
Short run: shock propagation under proportional rationing.

This module computes the fixed point of the sweep "each technology produces
as much as its scarcest input allows, and shares its output proportionally",
checks it against an exact minimum-disruption oracle, and evaluates the
upper bound on lost GDP together with the two sufficient conditions under
which that bound is attained.

Operations:
1. propagate: Sweep to the rationing fixed point
2. minimum_disruption_oracle: Solve the minimum disruption problem directly
3. shock_bound: Lost-GDP bound from the affected final goods
4. check_cut_condition / check_industry_shock_condition: Tightness checks
"""

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import linprog

from ..base_analyzer import BaseAnalyzer
from ..data_objects import DisruptionOutcome, Economy, FlowState, ShockSpec, TechId
from ..errors import InvariantError, NonConvergenceError, SolverError, TooLargeError

logger = logging.getLogger(__name__)

CYCLIC_STOP = 1e-12
TIGHTNESS_TOLERANCE = 1e-6
ORACLE_TIEBREAK_WEIGHT = 1e-6
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}

SweepObserver = Callable[[int, np.ndarray], None]


class PropagationConfig(BaseModel):
    """Stopping rule for the propagation sweeps."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(0.0, description="Stop when the max per-tech output change is at most delta")
    max_sweeps: int = Field(10_000, description="Sweep cap")

    @model_validator(mode="after")
    def _check(self) -> "PropagationConfig":
        if not self.delta >= 0:
            raise InvariantError(f"delta must be nonnegative, got {self.delta}", entity="delta")
        if self.max_sweeps < 1:
            raise InvariantError(f"max_sweeps must be at least 1, got {self.max_sweeps}", entity="max_sweeps")
        return self


class BoundReport(BaseModel):
    """Lost-GDP bound from the final goods downstream of the shock, next to the realized loss."""

    model_config = ConfigDict(frozen=True)

    affected_finals: FrozenSet[TechId]
    bound_fraction: float
    actual_fraction: float
    tight: bool


class CutReport(BaseModel):
    """
    Outcome of the cut-set check.

    ``holds`` is true when the disrupted-industries sub-network is acyclic and
    the shocked technologies separate its roots from the affected finals.
    Otherwise ``cycle`` or ``surviving_path`` certifies the failure.
    """

    model_config = ConfigDict(frozen=True)

    holds: bool
    acyclic: bool
    roots: List[TechId] = Field(default_factory=list)
    affected_finals: List[TechId] = Field(default_factory=list)
    cycle: List[TechId] = Field(default_factory=list)
    surviving_path: List[TechId] = Field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds


class PropagationAnalyzer(BaseAnalyzer):
    """Short-run disruption analysis over an equilibrium flow network."""

    def analyze(self, shock: Optional[ShockSpec] = None, **kwargs: Any) -> Dict[str, Any]:
        """
        Propagate a shock and evaluate the bound and both tightness conditions.

        Args:
            shock: The shock to propagate

        Returns:
            Dictionary with per-technology outputs before/after, losses and tightness flags
        """
        if shock is None:
            raise InvariantError("a shock is required", entity="shock")
        config = kwargs.get("config")
        outcome = self.propagate(shock, config)
        bound = self.shock_bound(shock, outcome=outcome)
        cut = self.check_cut_condition(shock)
        return {
            "outputs": [
                {"tech": tech, "before": self.state.output(tech), "after": outcome.flows.output(tech)}
                for tech in self.network.tech_ids
            ],
            "lost_gdp": outcome.lost_gdp_total,
            "loss_fraction": outcome.loss_fraction,
            "lost_gdp_by_country": outcome.lost_gdp_by_country,
            "idle_labor": outcome.idle_labor,
            "sweeps": outcome.sweeps,
            "bound_fraction": bound.bound_fraction,
            "tight": bound.tight,
            "affected_finals": sorted(bound.affected_finals),
            "cut_condition": cut.holds,
            "industry_shock_condition": self.check_industry_shock_condition(shock),
        }

    # ------------------------------------------------------------------
    # Shock propagation
    # ------------------------------------------------------------------

    def propagate(
        self,
        shock: ShockSpec,
        config: Optional[PropagationConfig] = None,
        on_sweep: Optional[SweepObserver] = None,
    ) -> DisruptionOutcome:
        """
        Sweep outputs to the proportional-rationing fixed point.

        Every sweep reads only the previous sweep's outputs. Input availability
        of a technology is measured per input good against the original
        equilibrium inflow of that good, aggregated across suppliers.

        Args:
            shock: Shocked technologies and retained fraction
            config: Stopping rule; defaults to delta 0 and PRODNET_MAX_SWEEPS
            on_sweep: Called with (sweep number, outputs) after every sweep

        Returns:
            DisruptionOutcome with the post-shock flows and loss accounting
        """
        if config is None:
            config = PropagationConfig(max_sweeps=self.settings.max_sweeps)
        nv = self.network
        nv.check_shock(shock)
        cap, multiplier = self._shock_caps(shock)

        weights = self._edge_weights()
        ratios = cap.copy()
        converged = False
        change = float("inf")
        sweep = 0
        for sweep in range(1, config.max_sweeps + 1):
            updated = self._sweep(ratios, cap, weights)
            change = float(np.max(np.abs(updated - ratios) * nv.outputs)) if nv.n_techs else 0.0
            ratios = updated
            if on_sweep is not None:
                on_sweep(sweep, ratios * nv.outputs)
            logger.debug("sweep %d: max output change %.3e", sweep, change)
            if change == 0.0 or (config.delta > 0 and change <= config.delta):
                converged = True
                break
            if config.delta == 0 and not nv.is_acyclic and change < CYCLIC_STOP:
                converged = True
                break

        if not converged:
            if config.delta == 0 and not nv.is_acyclic:
                raise NonConvergenceError(
                    f"propagation did not converge within {config.max_sweeps} sweeps (residual {change:.3e})",
                    residual=change,
                )
            logger.warning(
                "propagation stopped after %d sweeps with max output change %.3e", config.max_sweeps, change
            )

        logger.info("Propagated shock to %d technologies in %d sweeps", len(shock.shocked), sweep)
        return self._outcome(ratios, multiplier, sweeps=sweep)

    def _shock_caps(self, shock: ShockSpec) -> Tuple[np.ndarray, np.ndarray]:
        """Output caps (never above 1) and final-output multipliers for positive shocks."""
        nv = self.network
        cap = np.ones(nv.n_techs)
        multiplier = np.ones(nv.n_techs)
        for tech in shock.shocked:
            i = nv.index[tech]
            # Output cap at min(lambda, 1); extra intermediate output is discarded.
            cap[i] = min(shock.lam, 1.0)
            if shock.lam > 1.0 and nv.is_final[i]:
                multiplier[i] = shock.lam
        return cap, multiplier

    def _edge_weights(self) -> np.ndarray:
        nv = self.network
        if not len(nv.edge_received):
            return np.zeros(0)
        return nv.edge_received / nv.group_inflow[nv.edge_group]

    def _sweep(self, ratios: np.ndarray, cap: np.ndarray, weights: np.ndarray) -> np.ndarray:
        nv = self.network
        updated = cap.copy()
        if nv.n_groups:
            available = np.bincount(nv.edge_group, weights=weights * ratios[nv.edge_src], minlength=nv.n_groups)
            np.minimum.at(updated, nv.group_tech, available)
        return updated

    def _outcome(self, ratios: np.ndarray, multiplier: np.ndarray, sweeps: int = 0) -> DisruptionOutcome:
        nv = self.network
        realized = ratios * multiplier
        lost = nv.gdp - nv.final_value(nv.outputs * realized)
        idle, lost_by_country = nv.country_losses(ratios)
        return DisruptionOutcome(
            flows=nv.scaled_state(ratios, multiplier),
            lost_gdp_total=float(lost),
            lost_gdp_by_country=lost_by_country,
            idle_labor=idle,
            baseline_gdp=nv.gdp,
            sweeps=sweeps,
        )

    # ------------------------------------------------------------------
    # Minimum disruption oracle
    # ------------------------------------------------------------------

    def minimum_disruption_oracle(
        self,
        shock: ShockSpec,
        objective_prices: Optional[Dict[TechId, float]] = None,
        max_techs: Optional[int] = None,
    ) -> DisruptionOutcome:
        """
        Solve the minimum disruption problem directly.

        Acyclic networks are solved exactly in rational arithmetic along a
        topological order. Cyclic networks are solved as a linear program in
        per-technology retention ratios; every strictly positive objective
        selects the greatest feasible point, so ``objective_prices`` only
        matters for the reported value, never for outputs.

        Raises:
            TooLargeError: More active technologies than the oracle limit
        """
        nv = self.network
        limit = self.settings.oracle_max_techs if max_techs is None else max_techs
        n_active = int(np.sum(nv.active))
        if n_active > limit:
            raise TooLargeError(f"oracle supports at most {limit} active technologies, got {n_active}")
        nv.check_shock(shock)
        cap, multiplier = self._shock_caps(shock)

        if nv.is_acyclic:
            ratios = self._oracle_exact(cap)
        else:
            ratios = self._oracle_lp(cap, objective_prices)
        return self._outcome(ratios, multiplier)

    def _oracle_exact(self, cap: np.ndarray) -> np.ndarray:
        nv = self.network
        exact: Dict[int, Fraction] = {i: Fraction(float(cap[i])) for i in range(nv.n_techs)}
        incoming: Dict[int, Dict[int, List[int]]] = {}
        for k in range(len(nv.edge_keys)):
            incoming.setdefault(int(nv.edge_dst[k]), {}).setdefault(int(nv.edge_group[k]), []).append(k)
        for tech in nv.topological_order:
            i = nv.index[tech]
            for edges in incoming.get(i, {}).values():
                total = sum((Fraction(float(nv.edge_received[k])) for k in edges), Fraction(0))
                available = sum(
                    (Fraction(float(nv.edge_received[k])) * exact[int(nv.edge_src[k])] for k in edges), Fraction(0)
                ) / total
                exact[i] = min(exact[i], available)
        return np.array([float(exact[i]) for i in range(nv.n_techs)])

    def _oracle_lp(self, cap: np.ndarray, objective_prices: Optional[Dict[TechId, float]]) -> np.ndarray:
        nv = self.network
        prices = nv.prices if objective_prices is None else np.array(
            [objective_prices.get(t, 0.0) for t in nv.tech_ids], dtype=float
        )
        # linprog minimizes; a small positive weight on every ratio makes the optimum the greatest fixed point.
        c = -(prices * nv.outputs * nv.is_final + ORACLE_TIEBREAK_WEIGHT)
        weights = self._edge_weights()
        rows = np.zeros((nv.n_groups, nv.n_techs))
        rows[np.arange(nv.n_groups), nv.group_tech] = 1.0
        np.add.at(rows, (nv.edge_group, nv.edge_src), -weights)
        result = linprog(
            c,
            A_ub=rows if nv.n_groups else None,
            b_ub=np.zeros(nv.n_groups) if nv.n_groups else None,
            bounds=[(0.0, float(cap[i])) for i in range(nv.n_techs)],
            method="highs",
            options=LP_OPTIONS,
        )
        if result.status != 0:
            raise SolverError(f"minimum disruption LP failed: {result.message}")
        return np.clip(result.x, 0.0, cap)

    # ------------------------------------------------------------------
    # Bound and tightness
    # ------------------------------------------------------------------

    def shock_bound(self, shock: ShockSpec, outcome: Optional[DisruptionOutcome] = None) -> BoundReport:
        """
        Upper bound (1 - lambda) * value of affected finals / GDP, and the realized loss fraction.
        """
        nv = self.network
        nv.check_shock(shock)
        affected = nv.downstream_finals(shock.shocked)
        value = sum(nv.prices[nv.index[t]] * nv.outputs[nv.index[t]] for t in affected)
        bound = (1.0 - shock.lam) * value / nv.gdp if nv.gdp > 0 else 0.0
        if outcome is None:
            outcome = self.propagate(shock)
        actual = outcome.loss_fraction
        return BoundReport(
            affected_finals=frozenset(affected),
            bound_fraction=float(bound),
            actual_fraction=float(actual),
            tight=abs(bound - actual) <= TIGHTNESS_TOLERANCE,
        )

    def disrupted_subnetwork(self, shocked: Set[TechId]) -> nx.DiGraph:
        """Sub-network induced on all technologies lying on a directed path into the affected finals."""
        nv = self.network
        finals = nv.downstream_finals(shocked)
        nodes: Set[TechId] = set(finals)
        for final in finals:
            nodes |= nv.upstream_set(final)
        return nv.graph.subgraph(nodes).copy()

    def check_cut_condition(self, shock: ShockSpec) -> CutReport:
        """
        Check that the disrupted-industries sub-network is acyclic and that the
        shocked technologies cut every path from its roots to the affected finals.
        """
        self.network.check_shock(shock)
        sub = self.disrupted_subnetwork(set(shock.shocked))
        finals = sorted(self.network.downstream_finals(shock.shocked))
        roots = sorted(node for node in sub if sub.in_degree(node) == 0)
        try:
            cycle = [edge[0] for edge in nx.find_cycle(sub)]
        except nx.NetworkXNoCycle:
            cycle = []
        if cycle:
            return CutReport(holds=False, acyclic=False, roots=roots, affected_finals=finals, cycle=cycle)

        remaining = sub.copy()
        remaining.remove_nodes_from(shock.shocked)
        for root in roots:
            if root not in remaining:
                continue
            for final in finals:
                if final in remaining and nx.has_path(remaining, root, final):
                    path = nx.shortest_path(remaining, root, final)
                    return CutReport(
                        holds=False, acyclic=True, roots=roots, affected_finals=finals, surviving_path=path
                    )
        return CutReport(holds=True, acyclic=True, roots=roots, affected_finals=finals)

    def check_industry_shock_condition(self, shock: ShockSpec) -> bool:
        """
        True iff all active producers of each good use the same input goods and
        every shocked technology's whole industry is shocked.
        """
        nv = self.network
        nv.check_shock(shock)
        for good in self.economy.goods:
            recipes = {
                frozenset(self.economy.tech(t).inputs)
                for t in self.economy.producers(good.id)
                if nv.active[nv.index[t]]
            }
            if len(recipes) > 1:
                return False
        for tech in shock.shocked:
            good = self.economy.tech(tech).output
            for producer in self.economy.producers(good):
                if nv.active[nv.index[producer]] and producer not in shock.shocked:
                    return False
        return True


def propagate(
    economy: Economy,
    state: FlowState,
    shock: ShockSpec,
    config: Optional[PropagationConfig] = None,
    on_sweep: Optional[SweepObserver] = None,
    tolerance: Optional[float] = None,
) -> DisruptionOutcome:
    return PropagationAnalyzer(economy, state, tolerance=tolerance).propagate(shock, config, on_sweep)


def minimum_disruption_oracle(
    economy: Economy,
    state: FlowState,
    shock: ShockSpec,
    objective_prices: Optional[Dict[TechId, float]] = None,
) -> DisruptionOutcome:
    return PropagationAnalyzer(economy, state).minimum_disruption_oracle(shock, objective_prices)


def shock_bound(economy: Economy, state: FlowState, shock: ShockSpec) -> BoundReport:
    return PropagationAnalyzer(economy, state).shock_bound(shock)


def check_cut_condition(economy: Economy, state: FlowState, shock: ShockSpec) -> CutReport:
    return PropagationAnalyzer(economy, state).check_cut_condition(shock)


def check_industry_shock_condition(economy: Economy, state: FlowState, shock: ShockSpec) -> bool:
    return PropagationAnalyzer(economy, state).check_industry_shock_condition(shock)


def disrupted_subnetwork(economy: Economy, state: FlowState, shocked: Set[TechId]) -> nx.DiGraph:
    return PropagationAnalyzer(economy, state).disrupted_subnetwork(set(shocked))
