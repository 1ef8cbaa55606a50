"""
Medium run: efficient rationing with fixed labor and technologies.

Prices are flexible, so any producer may ship to any user of its good. The
surviving allocation maximizes the pre-shock value of final output and is
found with a linear program solved by HiGHS. Comparing it with the short-run
rationing outcome gives the loss to price rigidity.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from ..base_analyzer import BaseAnalyzer
from ..data_objects import Economy, FlowState, ShockSpec, TechId
from ..errors import InvariantError, SolverError, TooLargeError
from ..fixtures import lpr_family
from .propagation import LP_OPTIONS, PropagationAnalyzer

logger = logging.getLogger(__name__)

FLOW_EPSILON = 1e-12
LOSS_EPSILON = 1e-12


class MediumRunResult(BaseModel):
    """Value-maximizing post-shock allocation."""

    model_config = ConfigDict(frozen=True)

    flows: FlowState
    lost_gdp: float
    baseline_gdp: float
    reroutes: List[Tuple[TechId, TechId, float]] = Field(default_factory=list)

    @property
    def loss_fraction(self) -> float:
        return self.lost_gdp / self.baseline_gdp if self.baseline_gdp > 0 else 0.0


class LprReport(BaseModel):
    """Short-run over medium-run lost final value; +inf when only the short run loses."""

    model_config = ConfigDict(frozen=True)

    short_run_loss: float
    medium_run_loss: float
    lpr: float


class MediumRunAnalyzer(BaseAnalyzer):
    """Medium-run rationing and the loss to price rigidity."""

    def analyze(self, shock: Optional[ShockSpec] = None, **kwargs: Any) -> Dict[str, Any]:
        if shock is None:
            raise InvariantError("a shock is required", entity="shock")
        result = self.medium_run_optimize(shock)
        report = self.lpr(shock, medium=result)
        return {
            "outputs": [
                {"tech": t, "before": self.state.output(t), "after": result.flows.output(t)}
                for t in self.network.tech_ids
            ],
            "lost_gdp": result.lost_gdp,
            "loss_fraction": result.loss_fraction,
            "reroutes": [{"from": s, "to": d, "amount": x} for s, d, x in result.reroutes],
            "short_run_loss": report.short_run_loss,
            "medium_run_loss": report.medium_run_loss,
            "lpr": report.lpr,
        }

    def _candidate_edges(self) -> List[Tuple[int, int, str]]:
        """Every (producer, user, good) pair among active technologies."""
        nv = self.network
        edges = []
        for j, user in enumerate(nv.tech_ids):
            if not nv.active[j]:
                continue
            for good in sorted(self.economy.tech(user).inputs):
                for producer in self.economy.producers(good):
                    i = nv.index[producer]
                    if nv.active[i] and i != j:
                        edges.append((i, j, good))
        return edges

    def medium_run_optimize(
        self,
        shock: ShockSpec,
        objective_prices: Optional[Dict[TechId, float]] = None,
        variable_limit: Optional[int] = None,
    ) -> MediumRunResult:
        """
        Maximize the value of final output subject to fixed labor, the shock,
        and Leontief input requirements, letting flows reroute freely.

        Args:
            shock: Shocked technologies; lambda must not exceed 1
            objective_prices: Per-technology prices to value final output with (default: pre-shock prices)
            variable_limit: LP size guard (default PRODNET_LP_VARIABLE_LIMIT)

        Returns:
            MediumRunResult; lost_gdp is always valued at pre-shock prices

        Raises:
            TooLargeError: The LP would exceed the variable limit
            SolverError: HiGHS did not return an optimum
        """
        nv = self.network
        nv.check_shock(shock)
        if shock.lam > 1.0:
            raise InvariantError("positive shocks are handled by the short-run analysis only", entity="lambda")
        limit = self.settings.lp_variable_limit if variable_limit is None else variable_limit
        edges = self._candidate_edges()
        n, m = nv.n_techs, len(edges)
        if n + m > limit:
            raise TooLargeError(f"medium-run LP needs {n + m} variables, limit is {limit}")

        rows: List[int] = []
        cols: List[int] = []
        vals: List[float] = []

        def add(r: int, col: int, value: float) -> None:
            rows.append(r)
            cols.append(col)
            vals.append(value)

        row = 0
        # Shipments out of a technology cannot exceed what it produces.
        outgoing: Dict[int, List[int]] = {}
        for e, (i, _, _) in enumerate(edges):
            outgoing.setdefault(i, []).append(e)
        for i, out_edges in sorted(outgoing.items()):
            add(row, i, -1.0)
            for e in out_edges:
                add(row, n + e, 1.0)
            row += 1
        # Received input (net of iceberg losses) covers the recipe.
        incoming: Dict[Tuple[int, str], List[int]] = {}
        for e, (_, j, good) in enumerate(edges):
            incoming.setdefault((j, good), []).append(e)
        for j, user in enumerate(nv.tech_ids):
            if not nv.active[j]:
                continue
            for good, qty in sorted(self.economy.tech(user).inputs.items()):
                add(row, j, qty)
                for e in incoming.get((j, good), []):
                    theta = self.economy.transport.good_cost(nv.tech_ids[edges[e][0]], user)
                    add(row, n + e, -1.0 / theta)
                row += 1
        a_ub = coo_matrix((vals, (rows, cols)), shape=(row, n + m)).tocsr()

        caps = nv.outputs.copy()
        for tech in shock.shocked:
            caps[nv.index[tech]] *= shock.lam
        bounds = [(0.0, float(caps[i])) for i in range(n)] + [(0.0, None)] * m
        prices = nv.prices if objective_prices is None else np.array(
            [objective_prices.get(t, 0.0) for t in nv.tech_ids], dtype=float
        )
        c = np.concatenate((-(prices * nv.is_final), np.zeros(m)))

        logger.info("Solving medium-run LP with %d variables and %d constraints", n + m, row)
        result = linprog(c, A_ub=a_ub, b_ub=np.zeros(row), bounds=bounds, method="highs", options=LP_OPTIONS)
        if result.status != 0:
            raise SolverError(f"medium-run LP failed: {result.message}")

        outputs = np.clip(result.x[:n], 0.0, caps)
        shipped = np.clip(result.x[n:], 0.0, None)
        return self._result(outputs, shipped, edges)

    def _result(self, outputs: np.ndarray, shipped: np.ndarray, edges: List[Tuple[int, int, str]]) -> MediumRunResult:
        nv = self.network
        good_flows: Dict[Tuple[str, str], float] = {}
        for e, (i, j, _) in enumerate(edges):
            if shipped[e] > FLOW_EPSILON:
                key = (nv.tech_ids[i], nv.tech_ids[j])
                good_flows[key] = good_flows.get(key, 0.0) + float(shipped[e])
        utilization = np.divide(outputs, nv.outputs, out=np.zeros_like(outputs), where=nv.outputs > 0)
        labor_flows = {
            key: float(nv.labor_amount[k] * utilization[nv.labor_tech[k]]) for k, key in enumerate(nv.labor_keys)
        }
        flows = FlowState(
            good_flows=good_flows,
            labor_flows=labor_flows,
            outputs={t: float(outputs[i]) for i, t in enumerate(nv.tech_ids)},
            prices=dict(self.state.prices),
            wages=dict(self.state.wages),
        )
        reroutes = [
            (source, dest, amount)
            for (source, dest), amount in sorted(good_flows.items())
            if self.state.good_flows.get((source, dest), 0.0) <= 0
        ]
        lost = nv.gdp - nv.final_value(outputs)
        return MediumRunResult(flows=flows, lost_gdp=float(max(lost, 0.0)), baseline_gdp=nv.gdp, reroutes=reroutes)

    def is_feasible(self, flows: FlowState, shock: ShockSpec, tolerance: float = 1e-9) -> bool:
        """Whether a post-shock flow state satisfies every medium-run LP constraint."""
        nv = self.network
        for i, tech in enumerate(nv.tech_ids):
            cap = nv.outputs[i] * (shock.lam if tech in shock.shocked else 1.0)
            if flows.output(tech) > cap + tolerance:
                return False
        shipped: Dict[str, float] = {}
        received: Dict[Tuple[str, str], float] = {}
        for (source, dest), amount in flows.good_flows.items():
            shipped[source] = shipped.get(source, 0.0) + amount
            key = (dest, self.economy.tech(source).output)
            received[key] = received.get(key, 0.0) + amount / self.economy.transport.good_cost(source, dest)
        for tech in nv.tech_ids:
            if shipped.get(tech, 0.0) > flows.output(tech) + tolerance:
                return False
            for good, qty in self.economy.tech(tech).inputs.items():
                if qty * flows.output(tech) > received.get((tech, good), 0.0) + tolerance:
                    return False
        return True

    def lpr(self, shock: ShockSpec, medium: Optional[MediumRunResult] = None) -> LprReport:
        """
        Loss to price rigidity: short-run lost final value over medium-run lost final value.

        Both zero gives 1; a positive short-run loss with no medium-run loss gives +inf.
        """
        if medium is None:
            medium = self.medium_run_optimize(shock)
        short = PropagationAnalyzer(self.economy, self.state, tolerance=self.tolerance, validate=False).propagate(shock)
        short_loss, medium_loss = max(short.lost_gdp_total, 0.0), medium.lost_gdp
        ratio = self.safe_ratio(short_loss, medium_loss, tolerance=max(self.network.gdp, 1.0) * LOSS_EPSILON)
        return LprReport(short_run_loss=short_loss, medium_run_loss=medium_loss, lpr=ratio)


def medium_run_optimize(
    economy: Economy,
    state: FlowState,
    shock: ShockSpec,
    objective_prices: Optional[Dict[TechId, float]] = None,
) -> MediumRunResult:
    return MediumRunAnalyzer(economy, state).medium_run_optimize(shock, objective_prices)


def lpr(economy: Economy, state: FlowState, shock: ShockSpec) -> LprReport:
    return MediumRunAnalyzer(economy, state).lpr(shock)


def generate_lpr_family(t: int) -> Tuple[Economy, FlowState]:
    """
    Economy whose loss to price rigidity for a shock to technology ``01`` is t.

    See ``prodnet.fixtures.lpr_family`` for the construction.
    """
    return lpr_family(t)
