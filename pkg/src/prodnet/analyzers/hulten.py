"""
Long run: Hulten's marginal statistic and exact re-equilibration.

The marginal impact of a productivity shock to a technology on GDP equals
its sales share p*y / GDP. For economies where every good has a single
active producer, the long-run equilibrium after a finite productivity shock
is computed exactly: zero-profit prices from a Leontief system, final demand
from Cobb-Douglas expenditure shares, and outputs scaled to full employment.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import root

from ..base_analyzer import BaseAnalyzer
from ..core_model import country_gdp, economy_from_dict, economy_to_dict, validate_equilibrium
from ..data_objects import CountryId, DisruptionOutcome, Economy, FlowState, ShockSpec, TechId
from ..errors import (
    InactiveTechError,
    InfeasibleError,
    InvariantError,
    SolverError,
    UnsupportedEconomyError,
)
from .propagation import PropagationAnalyzer

logger = logging.getLogger(__name__)


class HultenReport(BaseModel):
    """Sales share of a technology and the first-order GDP loss of a shock to it."""

    model_config = ConfigDict(frozen=True)

    tech: TechId
    expenditure: float
    gdp: float
    marginal_share: float
    extrapolated_loss: float


class HultenAnalyzer(BaseAnalyzer):
    """Long-run analysis with mobile labor and fixed technologies."""

    def analyze(self, tech: Optional[TechId] = None, shock_size: float = 0.1, **kwargs: Any) -> Dict[str, Any]:
        if tech is None:
            raise InvariantError("a technology is required", entity="tech")
        return self.hulten_marginal(tech, shock_size).model_dump()

    def hulten_marginal(self, tech: TechId, shock_size: float) -> HultenReport:
        """
        Hulten statistic for one technology.

        Args:
            tech: Technology id
            shock_size: Fraction of productivity lost, in [0, 1]

        Returns:
            HultenReport with marginal_share = p*y / GDP and extrapolated_loss = shock_size * marginal_share

        Raises:
            InactiveTechError: The technology does not operate
        """
        self.economy.tech(tech)
        if not 0.0 <= shock_size <= 1.0:
            raise InvariantError(f"shock size must lie in [0, 1], got {shock_size}", entity="shock_size")
        y = self.state.output(tech)
        if y <= 0:
            raise InactiveTechError(f"technology {tech!r} is not active", entity=tech)
        expenditure = self.state.prices.get(tech, 0.0) * y
        gdp = self.network.gdp
        share = expenditure / gdp if gdp > 0 else 0.0
        return HultenReport(
            tech=tech,
            expenditure=expenditure,
            gdp=gdp,
            marginal_share=share,
            extrapolated_loss=shock_size * share,
        )

    def long_run_reequilibrate(self, shock: ShockSpec) -> DisruptionOutcome:
        """
        Re-solve the equilibrium after a productivity shock.

        Shocked technologies need 1/lambda times every input per unit of
        output. Labor moves freely within each country; prices are rescaled
        so that the consumer price index keeps its pre-shock value.

        Raises:
            UnsupportedEconomyError: A good has several active producers or the Leontief system is singular
            InfeasibleError: The shocked input-requirement matrix has spectral radius >= 1
        """
        nv = self.network
        nv.check_shock(shock)
        baseline = nv.gdp
        if not shock.shocked or shock.lam == 1.0:
            return DisruptionOutcome(
                flows=self.state,
                lost_gdp_total=0.0,
                lost_gdp_by_country={c: 0.0 for c in nv.country_ids},
                idle_labor={c: 0.0 for c in nv.country_ids},
                baseline_gdp=baseline,
            )
        if shock.lam <= 0:
            raise InfeasibleError("a technology with zero productivity cannot produce", entity="lambda")

        solver = _LeontiefSystem(self.economy, self.state, shock)
        flows = solver.solve()
        violations = validate_equilibrium(productivity_adjusted_economy(self.economy, shock), flows, self.tolerance)
        if violations:
            logger.warning(
                "long-run state misses %d equilibrium conditions, first: %s on %s",
                len(violations),
                violations[0].condition,
                violations[0].entity,
            )
        new_gdp = sum(flows.prices[t] * flows.output(t) for t in solver.final_techs)
        before = country_gdp(self.economy, self.state)
        after = country_gdp(self.economy, flows)
        logger.info("Long-run GDP after shock: %.6g (baseline %.6g)", new_gdp, baseline)
        return DisruptionOutcome(
            flows=flows,
            lost_gdp_total=baseline - new_gdp,
            lost_gdp_by_country={c: before[c] - after[c] for c in nv.country_ids},
            idle_labor={c: 0.0 for c in nv.country_ids},
            baseline_gdp=baseline,
        )

    def long_run_loss_curve(self, tech: TechId, lambdas: Sequence[float]) -> List[Dict[str, float]]:
        """
        Loss fractions for a grid of shock sizes to one technology: the Hulten
        extrapolation, the exact long-run loss, and the short-run loss.
        """
        share = self.hulten_marginal(tech, 0.0).marginal_share
        short_run = PropagationAnalyzer(self.economy, self.state, tolerance=self.tolerance, validate=False)
        rows = []
        for lam in lambdas:
            shock = ShockSpec.of([tech], lam)
            rows.append(
                {
                    "lambda": float(lam),
                    "hulten_loss": (1.0 - lam) * share,
                    "long_run_loss": self.long_run_reequilibrate(shock).loss_fraction,
                    "short_run_loss": short_run.propagate(shock).loss_fraction,
                }
            )
        return rows


class _LeontiefSystem:
    """Linear price and quantity system of a single-producer-per-good economy."""

    def __init__(self, economy: Economy, state: FlowState, shock: ShockSpec):
        self.economy = economy
        self.state = state
        self.techs: List[TechId] = [t.id for t in economy.technologies if state.output(t.id) > 0]
        self.index = {tech: i for i, tech in enumerate(self.techs)}
        producer: Dict[str, TechId] = {}
        for tech in self.techs:
            good = economy.tech(tech).output
            if good in producer:
                raise UnsupportedEconomyError(
                    f"good {good!r} has several active producers ({producer[good]}, {tech})", entity=good
                )
            producer[good] = tech
        self.final_techs = [t for t in self.techs if economy.is_final_tech(t)]

        n = len(self.techs)
        self.requirements = np.zeros((n, n))
        self.labor = np.zeros(n)
        for j, tech_id in enumerate(self.techs):
            tech = economy.tech(tech_id)
            productivity = shock.lam if tech_id in shock.shocked else 1.0
            self.labor[j] = tech.labor_input / productivity
            for good, qty in tech.inputs.items():
                if good not in producer:
                    raise UnsupportedEconomyError(f"input {good!r} of {tech_id!r} has no active producer", entity=good)
                supplier = producer[good]
                theta = economy.transport.good_cost(supplier, tech_id)
                self.requirements[self.index[supplier], j] = theta * qty / productivity

        radius = float(np.max(np.abs(np.linalg.eigvals(self.requirements)))) if n else 0.0
        if radius >= 1.0:
            raise InfeasibleError(f"input requirements have spectral radius {radius:.6g} >= 1")
        try:
            self.leontief_inverse = np.linalg.inv(np.eye(n) - self.requirements)
        except np.linalg.LinAlgError as exc:
            raise UnsupportedEconomyError("the Leontief system is singular") from exc

        self.countries: List[CountryId] = [c.id for c in economy.countries]
        self.endowment = np.array([c.labor for c in economy.countries])
        country_index = {c: k for k, c in enumerate(self.countries)}
        self.tech_country = np.array([country_index[economy.tech(t).country] for t in self.techs], dtype=int)
        self.shares = self._demand_shares()

    def _demand_shares(self) -> np.ndarray:
        shares = np.zeros(len(self.techs))
        finals = self.final_techs
        if self.economy.demand_shares is not None:
            for tech in finals:
                shares[self.index[tech]] = self.economy.demand_shares[self.economy.tech(tech).output]
            return shares
        # Without explicit shares, calibrate Cobb-Douglas weights to observed expenditure.
        spent = np.array([self.state.prices.get(t, 0.0) * self.state.output(t) for t in finals])
        if spent.sum() <= 0:
            raise UnsupportedEconomyError("no final expenditure to calibrate demand shares from")
        for tech, value in zip(finals, spent / spent.sum()):
            shares[self.index[tech]] = value
        return shares

    def prices(self, wages: np.ndarray) -> np.ndarray:
        return self.leontief_inverse.T @ (self.labor * wages[self.tech_country])

    def outputs(self, wages: np.ndarray) -> np.ndarray:
        prices = self.prices(wages)
        income = float(wages @ self.endowment)
        demand = np.divide(self.shares * income, prices, out=np.zeros_like(prices), where=self.shares > 0)
        return self.leontief_inverse @ demand

    def labor_demand(self, wages: np.ndarray) -> np.ndarray:
        use = self.labor * self.outputs(wages)
        return np.bincount(self.tech_country, weights=use, minlength=len(self.countries))

    def solve_wages(self) -> np.ndarray:
        initial = np.array([self.state.wages.get(c, 1.0) or 1.0 for c in self.countries], dtype=float)
        initial = initial / initial[0]
        if len(self.countries) == 1:
            return initial

        def excess(log_wages: np.ndarray) -> np.ndarray:
            wages = np.concatenate(([1.0], np.exp(log_wages)))
            return (self.labor_demand(wages) / self.endowment - 1.0)[1:]

        result = root(excess, np.log(initial[1:]), method="hybr", tol=1e-13)
        if not result.success:
            raise SolverError(f"long-run wage system did not solve: {result.message}")
        return np.concatenate(([1.0], np.exp(result.x)))

    def solve(self) -> FlowState:
        wages = self.solve_wages()
        prices = self.prices(wages)
        outputs = self.outputs(wages)

        # Hold the Cobb-Douglas price index at its pre-shock level.
        finals = [self.index[t] for t in self.final_techs]
        shares = self.shares[finals]
        old = np.array([self.state.prices[self.techs[i]] for i in finals])
        scale = float(np.exp(np.sum(shares * (np.log(old) - np.log(prices[finals])))))
        prices = prices * scale
        wages = wages * scale

        good_flows = {}
        for j, dest in enumerate(self.techs):
            for i in np.nonzero(self.requirements[:, j])[0]:
                good_flows[(self.techs[i], dest)] = float(self.requirements[i, j] * outputs[j])
        return FlowState(
            good_flows=good_flows,
            labor_flows={
                (self.economy.tech(t).country, t): float(self.labor[j] * outputs[j]) for j, t in enumerate(self.techs)
            },
            outputs={t: float(outputs[j]) for j, t in enumerate(self.techs)},
            prices={t: float(prices[j]) for j, t in enumerate(self.techs)},
            wages={c: float(wages[k]) for k, c in enumerate(self.countries)},
        )


def productivity_adjusted_economy(economy: Economy, shock: ShockSpec) -> Economy:
    """Economy in which shocked technologies need 1/lambda times every input."""
    document = economy_to_dict(economy)
    for tech in document["technologies"]:
        if tech["id"] in shock.shocked:
            tech["labor_input"] = tech["labor_input"] / shock.lam
            tech["inputs"] = {good: qty / shock.lam for good, qty in tech["inputs"].items()}
    return economy_from_dict(document)


def hulten_marginal(economy: Economy, state: FlowState, tech: TechId, shock_size: float) -> HultenReport:
    return HultenAnalyzer(economy, state).hulten_marginal(tech, shock_size)


def long_run_reequilibrate(economy: Economy, state: FlowState, shock: ShockSpec) -> DisruptionOutcome:
    return HultenAnalyzer(economy, state).long_run_reequilibrate(shock)


def long_run_loss_curve(
    economy: Economy, state: FlowState, tech: TechId, lambdas: Sequence[float]
) -> List[Dict[str, float]]:
    return HultenAnalyzer(economy, state).long_run_loss_curve(tech, lambdas)
