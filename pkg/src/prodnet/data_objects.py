"""
Core data objects for prodnet.

This module defines the fundamental data structures of a production network:
- Good: An intermediate or final good
- Country: A labor-endowed country
- Technology: A fixed constant-returns recipe producing one good
- TransportCosts: Iceberg costs on good and labor shipments
- Economy: The complete list of countries, goods, technologies and costs
- FlowState: A flow assignment (shipments, outputs, prices, wages)
- ShockSpec: A set of shocked technologies and the retained fraction
- DisruptionOutcome: A post-shock flow state with GDP and idle-labor accounting
- Violation: One failed equilibrium condition
"""

import math
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from .errors import InvariantError, NegativeFlowError, UnknownEntityError

TechId = str
CountryId = str
GoodId = str
FlowKey = Tuple[str, str]

DEMAND_SHARE_TOLERANCE = 1e-9


class GoodKind(str, Enum):
    INTERMEDIATE = "intermediate"
    FINAL = "final"


class Good(BaseModel):
    """
    A good traded in the economy.

    Attributes:
        id: Unique good identifier
        kind: Whether the good is an intermediate input or a final consumption good
    """

    model_config = ConfigDict(frozen=True)

    id: GoodId = Field(description="Unique good identifier")
    kind: GoodKind = Field(description="intermediate or final")

    @property
    def is_final(self) -> bool:
        return self.kind is GoodKind.FINAL


class Country(BaseModel):
    """A country and its labor endowment."""

    model_config = ConfigDict(frozen=True)

    id: CountryId = Field(description="Unique country identifier")
    labor: float = Field(description="Labor endowment L_n, strictly positive")

    @model_validator(mode="after")
    def _labor_positive(self) -> "Country":
        if not math.isfinite(self.labor) or self.labor <= 0:
            raise InvariantError(
                f"labor endowment of {self.id!r} must be positive, got {self.labor}", entity=self.id
            )
        return self


class Technology(BaseModel):
    """
    A fixed recipe turning labor and intermediate inputs into one unit of output.

    Attributes:
        id: Unique technology identifier
        country: Country the technology operates in
        output: Good produced
        labor_input: Labor units required per unit of output
        inputs: Units of each input good required per unit of output
    """

    model_config = ConfigDict(frozen=True)

    id: TechId = Field(description="Unique technology identifier")
    country: CountryId = Field(description="Country hosting the technology")
    output: GoodId = Field(description="Good produced")
    labor_input: float = Field(description="Labor per unit of output")
    inputs: Dict[GoodId, float] = Field(default_factory=dict, description="Input good requirements per unit")

    @model_validator(mode="after")
    def _check_recipe(self) -> "Technology":
        if not math.isfinite(self.labor_input) or self.labor_input <= 0:
            raise InvariantError(
                f"technology {self.id!r} must use a positive amount of labor, got {self.labor_input}",
                entity=self.id,
            )
        if self.output in self.inputs:
            raise InvariantError(
                f"technology {self.id!r} lists its own output {self.output!r} as an input", entity=self.id
            )
        for good, qty in self.inputs.items():
            if not math.isfinite(qty) or qty <= 0:
                raise InvariantError(
                    f"technology {self.id!r} has non-positive requirement {qty} of {good!r}", entity=self.id
                )
        return self


class GoodOverride(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    source: TechId = Field(alias="from")
    dest: TechId = Field(alias="to")
    cost: float


class LaborOverride(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    country: CountryId
    dest: TechId = Field(alias="to")
    cost: float


class TransportCosts(BaseModel):
    """
    Iceberg transport costs: theta units shipped per unit received.

    Labor is supplied only by the technology's home country unless a labor
    override names the (country, technology) pair.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    default: float = Field(1.0, description="Cost for good shipments without an override")
    good_overrides: List[GoodOverride] = Field(default_factory=list)
    labor_overrides: List[LaborOverride] = Field(default_factory=list)

    _good_index: Dict[FlowKey, float] = PrivateAttr(default_factory=dict)
    _labor_index: Dict[FlowKey, float] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_costs(self) -> "TransportCosts":
        costs = [("default", self.default)]
        costs += [(f"{o.source}->{o.dest}", o.cost) for o in self.good_overrides]
        costs += [(f"{o.country}->{o.dest}", o.cost) for o in self.labor_overrides]
        for entity, cost in costs:
            if not math.isfinite(cost) or cost < 1:
                raise InvariantError(f"transport cost {cost} is below 1", entity=entity)
        self._good_index = {(o.source, o.dest): o.cost for o in self.good_overrides}
        self._labor_index = {(o.country, o.dest): o.cost for o in self.labor_overrides}
        return self

    def good_cost(self, source: TechId, dest: TechId) -> float:
        return self._good_index.get((source, dest), self.default)

    def labor_cost(self, country: CountryId, tech: "Technology") -> Optional[float]:
        """Return theta for labor from ``country`` to ``tech``, or None when it cannot be supplied."""
        if (country, tech.id) in self._labor_index:
            return self._labor_index[(country, tech.id)]
        if country == tech.country:
            return 1.0
        return None


class Economy(BaseModel):
    """
    Represents a complete economy: countries, goods, technologies and transport costs.

    This is the main container every analysis reads from. It is immutable;
    lookup indices are built once at construction.
    """

    model_config = ConfigDict(frozen=True)

    countries: List[Country] = Field(min_length=1, description="Countries and labor endowments")
    goods: List[Good] = Field(min_length=1, description="Intermediate and final goods")
    technologies: List[Technology] = Field(min_length=1, description="Available technologies")
    transport: TransportCosts = Field(default_factory=TransportCosts)
    demand_shares: Optional[Dict[GoodId, float]] = Field(
        None, description="Cobb-Douglas expenditure shares over final goods"
    )

    _countries: Dict[CountryId, Country] = PrivateAttr(default_factory=dict)
    _goods: Dict[GoodId, Good] = PrivateAttr(default_factory=dict)
    _techs: Dict[TechId, Technology] = PrivateAttr(default_factory=dict)
    _producers: Dict[GoodId, List[TechId]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_economy(self) -> "Economy":
        self._countries = _unique_index(self.countries, "country")
        self._goods = _unique_index(self.goods, "good")
        self._techs = _unique_index(self.technologies, "technology")
        self._producers = {good.id: [] for good in self.goods}

        for tech in self.technologies:
            if tech.country not in self._countries:
                raise UnknownEntityError(
                    f"technology {tech.id!r} references unknown country {tech.country!r}", entity=tech.id
                )
            if tech.output not in self._goods:
                raise InvariantError(
                    f"technology {tech.id!r} produces unknown good {tech.output!r}", entity=tech.id
                )
            for good in tech.inputs:
                if good not in self._goods:
                    raise InvariantError(
                        f"technology {tech.id!r} uses unknown good {good!r}", entity=tech.id
                    )
                if self._goods[good].is_final:
                    raise InvariantError(
                        f"technology {tech.id!r} uses final good {good!r} as an input", entity=tech.id
                    )
            self._producers[tech.output].append(tech.id)

        for good in self.goods:
            if good.is_final and not self._producers[good.id]:
                raise InvariantError(f"final good {good.id!r} has no producing technology", entity=good.id)

        for override in self.transport.good_overrides:
            for tech_id in (override.source, override.dest):
                if tech_id not in self._techs:
                    raise UnknownEntityError(f"transport override references unknown technology {tech_id!r}", entity=tech_id)
            if self.is_final_tech(override.source):
                raise InvariantError(
                    "final goods ship to consumers at zero transport cost; "
                    f"override from {override.source!r} is not allowed",
                    entity=override.source,
                )
        for labor in self.transport.labor_overrides:
            if labor.country not in self._countries:
                raise UnknownEntityError(f"labor override references unknown country {labor.country!r}", entity=labor.country)
            if labor.dest not in self._techs:
                raise UnknownEntityError(f"labor override references unknown technology {labor.dest!r}", entity=labor.dest)

        if self.demand_shares is not None:
            finals = {good.id for good in self.goods if good.is_final}
            if set(self.demand_shares) != finals:
                raise InvariantError("demand_shares must cover exactly the final goods", entity="demand_shares")
            for good, share in self.demand_shares.items():
                if not (0 < share <= 1):
                    raise InvariantError(f"demand share {share} outside (0, 1]", entity=good)
            if abs(sum(self.demand_shares.values()) - 1.0) > DEMAND_SHARE_TOLERANCE:
                raise InvariantError("demand_shares must sum to 1", entity="demand_shares")
        return self

    def country(self, country_id: CountryId) -> Country:
        try:
            return self._countries[country_id]
        except KeyError:
            raise UnknownEntityError(f"unknown country {country_id!r}", entity=country_id) from None

    def good(self, good_id: GoodId) -> Good:
        try:
            return self._goods[good_id]
        except KeyError:
            raise UnknownEntityError(f"unknown good {good_id!r}", entity=good_id) from None

    def tech(self, tech_id: TechId) -> Technology:
        try:
            return self._techs[tech_id]
        except KeyError:
            raise UnknownEntityError(f"unknown technology {tech_id!r}", entity=tech_id) from None

    def has_tech(self, tech_id: TechId) -> bool:
        return tech_id in self._techs

    def has_country(self, country_id: CountryId) -> bool:
        return country_id in self._countries

    def producers(self, good_id: GoodId) -> List[TechId]:
        """Get the ids of all technologies producing a good, in declaration order."""
        return list(self._producers.get(good_id, []))

    def is_final_tech(self, tech_id: TechId) -> bool:
        return self._goods[self._techs[tech_id].output].is_final

    def techs_of(self, country_id: CountryId) -> List[TechId]:
        return [t.id for t in self.technologies if t.country == country_id]

    def final_goods(self) -> List[GoodId]:
        return [good.id for good in self.goods if good.is_final]

    def __str__(self) -> str:
        return (
            f"Economy({len(self.countries)} countries, {len(self.goods)} goods, "
            f"{len(self.technologies)} technologies)"
        )


class FlowState(BaseModel):
    """
    A complete flow assignment over an economy.

    Attributes:
        good_flows: Units shipped from a source technology to a destination technology
        labor_flows: Labor units shipped from a country to a technology
        outputs: Output level y of each technology
        prices: Price of each technology's output at the point of sale
        wages: Wage of each country
    """

    model_config = ConfigDict(frozen=True)

    good_flows: Dict[FlowKey, float] = Field(default_factory=dict)
    labor_flows: Dict[FlowKey, float] = Field(default_factory=dict)
    outputs: Dict[TechId, float] = Field(default_factory=dict)
    prices: Dict[TechId, float] = Field(default_factory=dict)
    wages: Dict[CountryId, float] = Field(default_factory=dict)

    @field_validator("good_flows", mode="before")
    @classmethod
    def _good_flow_records(cls, value: Any) -> Any:
        return _records_to_map(value, "from", "to")

    @field_validator("labor_flows", mode="before")
    @classmethod
    def _labor_flow_records(cls, value: Any) -> Any:
        return _records_to_map(value, "country", "to")

    @model_validator(mode="after")
    def _check_values(self) -> "FlowState":
        tables: List[Tuple[str, Dict[Any, float]]] = [
            ("good flow", self.good_flows),
            ("labor flow", self.labor_flows),
            ("output", self.outputs),
            ("price", self.prices),
            ("wage", self.wages),
        ]
        for label, table in tables:
            for key, value in table.items():
                if not math.isfinite(value) or value < 0:
                    entity = "->".join(key) if isinstance(key, tuple) else key
                    raise NegativeFlowError(f"{label} {entity} is {value}", entity=entity)
        return self

    def output(self, tech_id: TechId) -> float:
        return self.outputs.get(tech_id, 0.0)

    def active_techs(self) -> List[TechId]:
        return [tech for tech, y in self.outputs.items() if y > 0]

    def __str__(self) -> str:
        return (
            f"FlowState({len(self.good_flows)} good flows, {len(self.labor_flows)} labor flows, "
            f"{len(self.active_techs())} active technologies)"
        )


class ShockSpec(BaseModel):
    """
    A shock to a set of technologies.

    ``lam`` (``lambda`` in files and on the command line) is the fraction of
    output retained. Values above 1 are positive shocks.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    shocked: FrozenSet[TechId] = Field(description="Shocked technology ids")
    lam: float = Field(alias="lambda", description="Fraction of output retained")

    @field_validator("lam")
    @classmethod
    def _lambda_nonnegative(cls, value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise InvariantError(f"lambda must be a nonnegative number, got {value}", entity="lambda")
        return value

    @classmethod
    def of(cls, shocked: Any, lam: float) -> "ShockSpec":
        if isinstance(shocked, str):
            shocked = [shocked]
        return cls(shocked=frozenset(shocked), lam=lam)


class DisruptionOutcome(BaseModel):
    """
    A post-shock flow state together with GDP and idle-labor accounting.

    ``lost_gdp_total`` is the price-weighted lost final output. Per-country
    losses are wage-weighted idle labor at pre-shock wages.
    """

    model_config = ConfigDict(frozen=True)

    flows: FlowState
    lost_gdp_total: float
    lost_gdp_by_country: Dict[CountryId, float] = Field(default_factory=dict)
    idle_labor: Dict[CountryId, float] = Field(default_factory=dict)
    baseline_gdp: float = Field(0.0, description="Pre-shock GDP")
    sweeps: int = Field(0, description="Iterations used by iterative solvers")

    @property
    def loss_fraction(self) -> float:
        if self.baseline_gdp <= 0:
            return 0.0
        return self.lost_gdp_total / self.baseline_gdp

    def final_outputs(self, economy: Economy) -> Dict[TechId, float]:
        return {
            tech.id: self.flows.output(tech.id)
            for tech in economy.technologies
            if economy.is_final_tech(tech.id)
        }


class Violation(BaseModel):
    """One failed equilibrium condition."""

    model_config = ConfigDict(frozen=True)

    condition: str
    entity: str
    residual: float
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.condition}[{self.entity}] residual={self.residual:.3g}"
        return f"{text} ({self.detail})" if self.detail else text


def _unique_index(items: List[Any], label: str) -> Dict[str, Any]:
    index: Dict[str, Any] = {}
    for item in items:
        if item.id in index:
            raise InvariantError(f"duplicate {label} id {item.id!r}", entity=item.id)
        index[item.id] = item
    return index


def _records_to_map(value: Any, source_key: str, dest_key: str) -> Any:
    """Turn file records ``[{from, to, amount}]`` into a map keyed by (source, dest)."""
    if not isinstance(value, list):
        return value
    mapping: Dict[FlowKey, Any] = {}
    for record in value:
        if not isinstance(record, dict):
            return value
        if source_key not in record or dest_key not in record or "amount" not in record:
            return value
        key = (record[source_key], record[dest_key])
        if key in mapping:
            raise InvariantError(f"duplicate flow entry {key[0]}->{key[1]}", entity=f"{key[0]}->{key[1]}")
        mapping[key] = record["amount"]
    return mapping
