"""
Worked example economies with their equilibrium flows.

Every constructor returns an ``(Economy, FlowState)`` pair whose flow state
validates as an equilibrium. Quantities are entered as exact rationals; prices
are derived by zero-profit back-substitution at the stated wage unless a
fixture lists them explicitly.
"""

import logging
import re
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from .core_model import economy_from_dict, save_economy, save_flow_state
from .data_objects import Economy, FlowState
from .errors import InvariantError, UnknownEntityError

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]
Fixture = Tuple[Economy, FlowState]


class FixtureId(str, Enum):
    FIG1_CHAIN = "Fig1Chain"
    FIG5_PANEL_A = "Fig5PanelA"
    FIG5_PANEL_B = "Fig5PanelB"
    FIG7_POWER = "Fig7Power"
    FIG9_FIVE_COUNTRY = "Fig9FiveCountry"
    FIG11_NON_CONCAVE = "Fig11NonConcave"
    FIG12_VERTICAL = "Fig12Vertical"
    FIG12_HORIZONTAL = "Fig12Horizontal"
    FIG12_PARALLEL = "Fig12Parallel"
    APPENDIX_B_EXTENDED = "AppendixBExtended"
    APPENDIX_B_WITH_BRANCH = "AppendixBWithBranch"
    CHIPS_MEDIUM_RUN = "ChipsMediumRun"
    CHIPS_EQUAL_VALUE = "ChipsEqualValue"
    FLEXIBLE_REROUTING = "FlexibleRerouting"
    STRATEGIC_POWER = "StrategicPower"
    LPR_FAMILY = "LprFamily"


class EconomyBuilder:
    """Small helper for writing fixtures as tech-by-tech tables."""

    def __init__(self) -> None:
        self.countries: Dict[str, Fraction] = {}
        self.goods: Dict[str, str] = {}
        self.techs: Dict[str, dict] = {}
        self.flows: Dict[Tuple[str, str], Fraction] = {}
        self.demand_shares: Optional[Dict[str, Fraction]] = None

    def country(self, country_id: str, labor: Number) -> "EconomyBuilder":
        self.countries[country_id] = Fraction(labor)
        return self

    def good(self, good_id: str, final: bool = False) -> "EconomyBuilder":
        self.goods[good_id] = "final" if final else "intermediate"
        return self

    def tech(
        self,
        tech_id: str,
        country: str,
        output: str,
        labor: Number,
        y: Number,
        inputs: Optional[Dict[str, Number]] = None,
    ) -> "EconomyBuilder":
        self.techs[tech_id] = {
            "country": country,
            "output": output,
            "labor": Fraction(labor),
            "y": Fraction(y),
            "inputs": {good: Fraction(qty) for good, qty in (inputs or {}).items()},
        }
        return self

    def ship(self, source: str, dest: str, amount: Number) -> "EconomyBuilder":
        self.flows[(source, dest)] = Fraction(amount)
        return self

    def build(
        self,
        wages: Dict[str, Number],
        good_prices: Optional[Dict[str, Number]] = None,
    ) -> Fixture:
        wage = {country: Fraction(w) for country, w in wages.items()}
        prices = self._derive_prices(wage, good_prices)
        document = {
            "countries": [{"id": c, "labor": float(labor)} for c, labor in self.countries.items()],
            "goods": [{"id": g, "kind": kind} for g, kind in self.goods.items()],
            "technologies": [
                {
                    "id": tech_id,
                    "country": spec["country"],
                    "output": spec["output"],
                    "labor_input": float(spec["labor"]),
                    "inputs": {good: float(qty) for good, qty in spec["inputs"].items()},
                }
                for tech_id, spec in self.techs.items()
            ],
            "transport": {"default": 1.0, "good_overrides": [], "labor_overrides": []},
        }
        if self.demand_shares is not None:
            document["demand_shares"] = {g: float(s) for g, s in self.demand_shares.items()}
        economy = economy_from_dict(document)
        state = FlowState(
            good_flows={key: float(amount) for key, amount in self.flows.items()},
            labor_flows={
                (spec["country"], tech_id): float(spec["labor"] * spec["y"]) for tech_id, spec in self.techs.items()
            },
            outputs={tech_id: float(spec["y"]) for tech_id, spec in self.techs.items()},
            prices={tech_id: float(price) for tech_id, price in prices.items()},
            wages={country: float(w) for country, w in wage.items()},
        )
        return economy, state

    def _derive_prices(
        self, wage: Dict[str, Fraction], good_prices: Optional[Dict[str, Number]]
    ) -> Dict[str, Fraction]:
        if good_prices is not None:
            return {tech_id: Fraction(good_prices[spec["output"]]) for tech_id, spec in self.techs.items()}
        prices: Dict[str, Fraction] = {}
        while len(prices) < len(self.techs):
            progress = False
            for tech_id, spec in self.techs.items():
                if tech_id in prices:
                    continue
                cost = spec["labor"] * wage[spec["country"]]
                for good, qty in spec["inputs"].items():
                    sellers = [prices[t] for t, s in self.techs.items() if s["output"] == good and t in prices]
                    producers = [t for t, s in self.techs.items() if s["output"] == good]
                    if len(sellers) < len(producers):
                        break
                    cost += qty * min(sellers)
                else:
                    prices[tech_id] = cost
                    progress = True
            if not progress:
                raise InvariantError("fixture prices cannot be derived on a cyclic recipe graph; list them")
        return prices


def fig1_chain() -> Fixture:
    """Raw material, intermediate and final good in one country with 10 units of labor."""
    b = EconomyBuilder().country("home", 10)
    b.good("R").good("I").good("F", final=True)
    b.tech("tauR", "home", "R", labor=1, y=2)
    b.tech("tauI", "home", "I", labor=7, y=1, inputs={"R": 1})
    b.tech("tauF", "home", "F", labor=1, y=1, inputs={"R": 1, "I": 1})
    b.ship("tauR", "tauI", 1).ship("tauR", "tauF", 1).ship("tauI", "tauF", 1)
    return b.build({"home": Fraction(1, 10)})


def _fig5(crossed: bool) -> Fixture:
    b = EconomyBuilder().country("home", 20)
    for good in ("R1", "R2", "I1", "I2"):
        b.good(good)
    b.good("F1", final=True).good("F2", final=True)
    b.demand_shares = {"F1": Fraction(1, 2), "F2": Fraction(1, 2)}
    # Crossed wiring: each final good draws its raw material from the other chain.
    f1_raw, f2_raw = ("R2", "R1") if crossed else ("R1", "R2")
    b.tech("tau1", "home", "R1", labor=1, y=2)
    b.tech("tau2", "home", "R2", labor=1, y=2)
    b.tech("tau3", "home", "I1", labor=7, y=1, inputs={"R1": 1})
    b.tech("tau4", "home", "I2", labor=7, y=1, inputs={"R2": 1})
    b.tech("tau5", "home", "F1", labor=1, y=1, inputs={f1_raw: 1, "I1": 1})
    b.tech("tau6", "home", "F2", labor=1, y=1, inputs={f2_raw: 1, "I2": 1})
    b.ship("tau1", "tau3", 1).ship("tau2", "tau4", 1).ship("tau3", "tau5", 1).ship("tau4", "tau6", 1)
    if crossed:
        b.ship("tau1", "tau6", 1).ship("tau2", "tau5", 1)
    else:
        b.ship("tau1", "tau5", 1).ship("tau2", "tau6", 1)
    return b.build({"home": Fraction(1, 10)})


def fig5_panel_a() -> Fixture:
    """Two parallel copies of the three-technology chain."""
    return _fig5(crossed=False)


def fig5_panel_b() -> Fixture:
    """The same two chains with the raw-material links crossed."""
    return _fig5(crossed=True)


def fig7_power() -> Fixture:
    """
    Two countries sharing one final good. Country i supplies B to both
    country j's assembler and its own final producer.
    """
    b = EconomyBuilder().country("j", 50).country("i", 70)
    b.good("A").good("B").good("C").good("F", final=True)
    b.tech("tau1", "j", "A", labor=2, y=10)
    b.tech("tau2", "i", "B", labor=1, y=20)
    b.tech("tau3", "j", "C", labor=2, y=10, inputs={"A": 1, "B": 1})
    b.tech("tau4", "j", "F", labor=Fraction(1, 2), y=20, inputs={"C": Fraction(1, 2)})
    b.tech("tau5", "i", "F", labor=Fraction(5, 2), y=20, inputs={"B": Fraction(1, 2)})
    b.ship("tau1", "tau3", 10).ship("tau2", "tau3", 10).ship("tau2", "tau5", 10).ship("tau3", "tau4", 10)
    return b.build({"j": Fraction(1, 3), "i": Fraction(1, 3)})


def fig9_five_country() -> Fixture:
    """
    Five countries; technology ids read <good>-<country>.

    Prices follow from unit wages and are not meaningful beyond validating
    the flows. F4-1 uses 0.8 labor per unit so that country 1 employs exactly
    its 100 units.
    """
    b = EconomyBuilder()
    for country, labor in (("1", 100), ("2", 100), ("3", 4), ("4", 11), ("5", 35)):
        b.country(country, labor)
    for good in ("R1", "R2", "R3", "I1", "I2", "I3", "I4", "I5", "I6"):
        b.good(good)
    for good in ("F1", "F2", "F3", "F4"):
        b.good(good, final=True)
    tenth = Fraction(1, 10)
    f1_recipe = {"I1": Fraction(10, 35), "I2": Fraction(10, 35)}
    f2_recipe = {"I5": Fraction(1, 2), "I6": tenth}
    b.tech("R1-3", "3", "R1", labor=1, y=4)
    b.tech("R2-1", "1", "R2", labor=1, y=11)
    b.tech("R3-4", "4", "R3", labor=1, y=11)
    b.tech("I1-2", "2", "I1", labor=1, y=20, inputs={"R1": tenth})
    b.tech("I2-1", "1", "I2", labor=1, y=20, inputs={"R1": tenth})
    b.tech("I3-1", "1", "I3", labor=1, y=11, inputs={"R2": 1})
    b.tech("I4-1", "1", "I4", labor=1, y=4, inputs={"R3": Fraction(11, 4)})
    b.tech("I5-2", "2", "I5", labor=1, y=15, inputs={"I3": Fraction(1, 5)})
    b.tech("I5-1", "1", "I5", labor=1, y=10, inputs={"I3": Fraction(1, 5)})
    b.tech("I6-1", "1", "I6", labor=1, y=6, inputs={"I3": 1})
    b.tech("F1-5", "5", "F1", labor=1, y=35, inputs=f1_recipe)
    b.tech("F1-2", "2", "F1", labor=1, y=35, inputs=f1_recipe)
    b.tech("F2-2", "2", "F2", labor=1, y=30, inputs=f2_recipe)
    b.tech("F2-1", "1", "F2", labor=1, y=20, inputs=f2_recipe)
    b.tech("F3-1", "1", "F3", labor=1, y=10, inputs={"I6": tenth})
    b.tech("F4-1", "1", "F4", labor=Fraction(4, 5), y=10, inputs={"I4": Fraction(2, 5)})
    b.ship("R1-3", "I1-2", 2).ship("R1-3", "I2-1", 2)
    b.ship("R2-1", "I3-1", 11).ship("R3-4", "I4-1", 11).ship("I4-1", "F4-1", 4)
    b.ship("I1-2", "F1-5", 10).ship("I1-2", "F1-2", 10)
    b.ship("I2-1", "F1-5", 10).ship("I2-1", "F1-2", 10)
    b.ship("I3-1", "I5-2", 3).ship("I3-1", "I5-1", 2).ship("I3-1", "I6-1", 6)
    b.ship("I5-2", "F2-2", 15).ship("I5-1", "F2-1", 10)
    b.ship("I6-1", "F2-2", 3).ship("I6-1", "F2-1", 2).ship("I6-1", "F3-1", 1)
    return b.build({country: 1 for country in ("1", "2", "3", "4", "5")})


def fig11_non_concave() -> Fixture:
    """
    Country j assembles C from orange and blue parts and sells it to both
    countries' final producers; country i supplies half the blue parts.
    """
    b = EconomyBuilder().country("j", 50).country("i", 20)
    b.good("orange").good("blue").good("C").good("G", final=True)
    b.tech("tau1", "j", "orange", labor=1, y=10)
    b.tech("tau2", "j", "blue", labor=2, y=5)
    b.tech("tau3", "i", "blue", labor=2, y=5)
    b.tech("tauC", "j", "C", labor=1, y=20, inputs={"orange": Fraction(1, 2), "blue": Fraction(1, 2)})
    b.tech("tau4", "j", "G", labor=1, y=10, inputs={"C": 1})
    b.tech("tau5", "i", "G", labor=1, y=10, inputs={"C": 1})
    b.ship("tau1", "tauC", 10).ship("tau2", "tauC", 5).ship("tau3", "tauC", 5)
    b.ship("tauC", "tau4", 10).ship("tauC", "tau5", 10)
    return b.build({"j": Fraction(2, 7), "i": Fraction(2, 7)})


def fig12_vertical() -> Fixture:
    """Four intermediate stages in a single line feeding one final good."""
    b = EconomyBuilder().country("home", 5)
    for k in range(1, 5):
        b.good(f"V{k}")
    b.good("F1", final=True)
    previous: Optional[str] = None
    for k in range(1, 5):
        b.tech(f"tau{k}", "home", f"V{k}", labor=1, y=1, inputs={previous: 1} if previous else None)
        if k > 1:
            b.ship(f"tau{k - 1}", f"tau{k}", 1)
        previous = f"V{k}"
    b.tech("tauF1", "home", "F1", labor=1, y=1, inputs={"V4": 1})
    b.ship("tau4", "tauF1", 1)
    return b.build({"home": Fraction(1, 5)})


def fig12_horizontal() -> Fixture:
    """Four independent intermediates assembled by one final good."""
    b = EconomyBuilder().country("home", 5)
    for k in range(1, 5):
        b.good(f"H{k}")
    b.good("F1", final=True)
    for k in range(1, 5):
        b.tech(f"tau{k}", "home", f"H{k}", labor=1, y=1)
        b.ship(f"tau{k}", "tauF1", 1)
    b.tech("tauF1", "home", "F1", labor=1, y=1, inputs={f"H{k}": 1 for k in range(1, 5)})
    return b.build({"home": Fraction(1, 5)})


def fig12_parallel() -> Fixture:
    """Four final goods, each with its own single supplier."""
    b = EconomyBuilder().country("home", 5)
    for k in range(1, 5):
        b.good(f"P{k}")
    for k in range(1, 5):
        b.good(f"F{k}", final=True)
    b.demand_shares = {f"F{k}": Fraction(1, 4) for k in range(1, 5)}
    for k in range(1, 5):
        b.tech(f"tau{k}", "home", f"P{k}", labor=1, y=1)
        b.tech(f"tauF{k}", "home", f"F{k}", labor=Fraction(1, 4), y=1, inputs={f"P{k}": 1})
        b.ship(f"tau{k}", f"tauF{k}", 1)
    return b.build({"home": Fraction(1, 5)})


def appendix_b_extended() -> Fixture:
    """
    Ten technologies, five goods, with a feedback loop: C needs D, D is made
    from E, and E is made from C. Every technology uses one unit of labor per
    unit of output.
    """
    b = EconomyBuilder().country("home", 50)
    b.good("A").good("C").good("D").good("E").good("F", final=True)
    c_recipe = {"A": 1, "D": Fraction(1, 2)}
    b.tech("tau1", "home", "A", labor=1, y=6)
    b.tech("tau2", "home", "A", labor=1, y=4)
    b.tech("tau3", "home", "C", labor=1, y=8, inputs=c_recipe)
    b.tech("tau4", "home", "C", labor=1, y=2, inputs=c_recipe)
    b.tech("tau5", "home", "E", labor=1, y=5, inputs={"C": Fraction(2, 3)})
    b.tech("tau6", "home", "E", labor=1, y=10, inputs={"C": Fraction(2, 3)})
    b.tech("tau7", "home", "D", labor=1, y=5, inputs={"E": 1})
    b.tech("tau8", "home", "F", labor=1, y=3, inputs={"E": 1})
    b.tech("tau9", "home", "F", labor=1, y=4, inputs={"E": 1})
    b.tech("tau10", "home", "F", labor=1, y=3, inputs={"E": 1})
    b.ship("tau1", "tau3", 6).ship("tau2", "tau3", 2).ship("tau2", "tau4", 2)
    b.ship("tau7", "tau3", 4).ship("tau7", "tau4", 1)
    b.ship("tau3", "tau5", Fraction(10, 3)).ship("tau3", "tau6", Fraction(14, 3)).ship("tau4", "tau6", 2)
    b.ship("tau5", "tau8", 3).ship("tau5", "tau9", 2)
    b.ship("tau6", "tau7", 5).ship("tau6", "tau9", 2).ship("tau6", "tau10", 3)
    # The C-D-E loop makes back-substitution circular; these solve zero profit at wage 1/5.
    prices = {"A": Fraction(1, 5), "C": Fraction(9, 10), "D": 1, "E": Fraction(4, 5), "F": 1}
    return b.build({"home": Fraction(1, 5)}, good_prices=prices)


def appendix_b_with_branch() -> Fixture:
    """
    Acyclic variant with diverse sourcing of A, C and E, plus a branch from
    tau2 through tau11 to a second final good.
    """
    b = EconomyBuilder().country("home", 70)
    b.good("K").good("A").good("B").good("C").good("E")
    b.good("F", final=True).good("G", final=True)
    b.tech("tau0", "home", "K", labor=1, y=10)
    b.tech("tau1", "home", "A", labor=1, y=6)
    b.tech("tau2", "home", "A", labor=1, y=6)
    b.tech("tau3", "home", "C", labor=1, y=8, inputs={"A": 1})
    b.tech("tau4", "home", "C", labor=1, y=2, inputs={"A": 1})
    b.tech("tau5", "home", "E", labor=Fraction(7, 3), y=5, inputs={"C": Fraction(2, 3)})
    b.tech("tau6", "home", "E", labor=1, y=5, inputs={"C": Fraction(4, 3)})
    for tech_id, y in (("tau8", 3), ("tau9", 4), ("tau10", 3)):
        b.tech(tech_id, "home", "F", labor=1, y=y, inputs={"E": 1})
    b.tech("tau11", "home", "B", labor=1, y=5, inputs={"K": 2, "A": Fraction(2, 5)})
    b.tech("tau12", "home", "G", labor=Fraction(19, 15), y=5, inputs={"B": 1})
    b.ship("tau0", "tau11", 10)
    b.ship("tau1", "tau3", 6).ship("tau2", "tau3", 2).ship("tau2", "tau4", 2).ship("tau2", "tau11", 2)
    b.ship("tau3", "tau5", Fraction(10, 3)).ship("tau3", "tau6", Fraction(14, 3)).ship("tau4", "tau6", 2)
    b.ship("tau5", "tau8", 3).ship("tau5", "tau9", 2)
    b.ship("tau6", "tau9", 2).ship("tau6", "tau10", 3)
    b.ship("tau11", "tau12", 5)
    return b.build({"home": Fraction(3, 14)})


def chips_medium_run() -> Fixture:
    """One raw input shared by a low-value and a high-value final good (values 1 and 9)."""
    b = EconomyBuilder().country("home", 10)
    b.good("R1").good("F1", final=True).good("F2", final=True)
    b.tech("R1", "home", "R1", labor=Fraction(1, 2), y=2)
    b.tech("F1", "home", "F1", labor=Fraction(1, 2), y=1, inputs={"R1": 1})
    b.tech("F2", "home", "F2", labor=Fraction(17, 18), y=9, inputs={"R1": Fraction(1, 9)})
    b.ship("R1", "F1", 1).ship("R1", "F2", 1)
    return b.build({"home": 1})


def chips_equal_value() -> Fixture:
    """The shared raw input feeding two identical final goods of equal value."""
    b = EconomyBuilder().country("home", 10)
    b.good("R1").good("F1", final=True).good("F2", final=True)
    b.tech("R1", "home", "R1", labor=Fraction(1, 2), y=10)
    b.tech("F1", "home", "F1", labor=Fraction(1, 2), y=5, inputs={"R1": 1})
    b.tech("F2", "home", "F2", labor=Fraction(1, 2), y=5, inputs={"R1": 1})
    b.ship("R1", "F1", 5).ship("R1", "F2", 5)
    return b.build({"home": 1})


def flexible_rerouting() -> Fixture:
    """Two raw-material suppliers with crossed, uneven customer shares."""
    b = EconomyBuilder().country("home", 16)
    b.good("R").good("I").good("F", final=True)
    b.tech("tau1", "home", "R", labor=1, y=4)
    b.tech("tau2", "home", "R", labor=1, y=4)
    b.tech("tau3", "home", "I", labor=1, y=4, inputs={"R": 1})
    b.tech("tau4", "home", "F", labor=1, y=4, inputs={"R": 1, "I": 1})
    b.ship("tau1", "tau3", 3).ship("tau1", "tau4", 1).ship("tau2", "tau3", 1).ship("tau2", "tau4", 3)
    b.ship("tau3", "tau4", 4)
    return b.build({"home": Fraction(1, 4)})


def strategic_power() -> Fixture:
    """Country i supplies country j's intermediate, which serves both countries' final producers."""
    b = EconomyBuilder().country("i", 60).country("j", 70)
    b.good("B").good("C").good("G", final=True)
    b.tech("tau2", "i", "B", labor=1, y=10)
    b.tech("tau3", "j", "C", labor=1, y=20, inputs={"B": Fraction(1, 2)})
    b.tech("tau4", "j", "G", labor=Fraction(5, 2), y=20, inputs={"C": Fraction(1, 2)})
    b.tech("tau5", "i", "G", labor=Fraction(5, 2), y=20, inputs={"C": Fraction(1, 2)})
    b.ship("tau2", "tau3", 10).ship("tau3", "tau4", 10).ship("tau3", "tau5", 10)
    return b.build({"i": Fraction(4, 13), "j": Fraction(4, 13)})


def lpr_tech_id(t: int, good: int, country: int) -> str:
    """Technology id in the rigidity family: zero-padded good index then country index."""
    width = len(str(t + 1))
    return f"{good:0{width}d}{country:0{width}d}"


def lpr_family(t: int) -> Fixture:
    """
    Economy whose short-run loss exceeds its medium-run loss by a factor t.

    Good 0 is made in countries 1 and 2. Goods 1..t are made in every
    country from one unit of good 0, and each country's final producer needs
    one of each. Country i's producer of good i buys good 0 from country 1;
    every other producer buys from country 2.
    """
    if t < 2:
        raise InvariantError(f"the family needs t >= 2, got {t}", entity="t")
    b = EconomyBuilder()
    final_index = t + 1
    for n in range(1, t + 1):
        b.country(str(n), 2 * t + 1 if n == 1 else t * t + 1 if n == 2 else t + 1)
    for g in range(0, t + 1):
        b.good(f"g{g}")
    b.good(f"g{final_index}", final=True)

    b.tech(lpr_tech_id(t, 0, 1), "1", "g0", labor=1, y=t)
    b.tech(lpr_tech_id(t, 0, 2), "2", "g0", labor=1, y=t * (t - 1))
    for n in range(1, t + 1):
        final_id = lpr_tech_id(t, final_index, n)
        for g in range(1, t + 1):
            tech_id = lpr_tech_id(t, g, n)
            b.tech(tech_id, str(n), f"g{g}", labor=1, y=1, inputs={"g0": 1})
            supplier = lpr_tech_id(t, 0, 1 if g == n else 2)
            b.ship(supplier, tech_id, 1)
            b.ship(tech_id, final_id, 1)
        b.tech(final_id, str(n), f"g{final_index}", labor=1, y=1, inputs={f"g{g}": 1 for g in range(1, t + 1)})
    return b.build({str(n): 1 for n in range(1, t + 1)})


FIXTURES: Dict[FixtureId, Callable[[], Fixture]] = {
    FixtureId.FIG1_CHAIN: fig1_chain,
    FixtureId.FIG5_PANEL_A: fig5_panel_a,
    FixtureId.FIG5_PANEL_B: fig5_panel_b,
    FixtureId.FIG7_POWER: fig7_power,
    FixtureId.FIG9_FIVE_COUNTRY: fig9_five_country,
    FixtureId.FIG11_NON_CONCAVE: fig11_non_concave,
    FixtureId.FIG12_VERTICAL: fig12_vertical,
    FixtureId.FIG12_HORIZONTAL: fig12_horizontal,
    FixtureId.FIG12_PARALLEL: fig12_parallel,
    FixtureId.APPENDIX_B_EXTENDED: appendix_b_extended,
    FixtureId.APPENDIX_B_WITH_BRANCH: appendix_b_with_branch,
    FixtureId.CHIPS_MEDIUM_RUN: chips_medium_run,
    FixtureId.CHIPS_EQUAL_VALUE: chips_equal_value,
    FixtureId.FLEXIBLE_REROUTING: flexible_rerouting,
    FixtureId.STRATEGIC_POWER: strategic_power,
}

DEFAULT_LPR_T = 3
_LPR_PATTERN = re.compile(r"^LprFamily(?:\((\d+)\))?$")


def list_fixtures() -> List[str]:
    """Names accepted by ``build``; the rigidity family takes a size, e.g. ``LprFamily(4)``."""
    return [fixture.value for fixture in FixtureId]


def build(fixture: Union[FixtureId, str], t: Optional[int] = None) -> Fixture:
    """
    Build a fixture by id or name.

    Args:
        fixture: A FixtureId or its name; ``LprFamily(t)`` selects the family size
        t: Family size for LprFamily (default 3)

    Raises:
        UnknownEntityError: No fixture has that name
    """
    if isinstance(fixture, str):
        match = _LPR_PATTERN.match(fixture)
        if match:
            size = int(match.group(1)) if match.group(1) else t
            return lpr_family(size if size is not None else DEFAULT_LPR_T)
        try:
            fixture = FixtureId(fixture)
        except ValueError:
            raise UnknownEntityError(f"unknown fixture {fixture!r}", entity=fixture) from None
    if fixture is FixtureId.LPR_FAMILY:
        return lpr_family(t if t is not None else DEFAULT_LPR_T)
    return FIXTURES[fixture]()


def fixture_name(fixture: Union[FixtureId, str], t: Optional[int] = None) -> str:
    """File-name stem for a fixture; family members carry their size, e.g. ``LprFamily4``."""
    if isinstance(fixture, str):
        match = _LPR_PATTERN.match(fixture)
        if match:
            size = int(match.group(1)) if match.group(1) else t
            return f"LprFamily{size if size is not None else DEFAULT_LPR_T}"
        fixture = FixtureId(fixture)
    if fixture is FixtureId.LPR_FAMILY:
        return f"LprFamily{t if t is not None else DEFAULT_LPR_T}"
    return fixture.value


def emit(fixture: Union[FixtureId, str], out_dir: Union[str, Path], t: Optional[int] = None) -> List[Path]:
    """Write ``<name>.economy.json`` and ``<name>.flows.json`` into ``out_dir``."""
    economy, state = build(fixture, t)
    name = fixture_name(fixture, t)
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    economy_path = directory / f"{name}.economy.json"
    flows_path = directory / f"{name}.flows.json"
    save_economy(economy, economy_path)
    save_flow_state(state, flows_path)
    logger.info("Wrote fixture %s to %s", name, directory)
    return [economy_path, flows_path]
