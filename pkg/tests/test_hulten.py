from fractions import Fraction

import numpy as np
import pytest

from prodnet.analyzers.hulten import (
    HultenAnalyzer,
    hulten_marginal,
    long_run_loss_curve,
    long_run_reequilibrate,
    productivity_adjusted_economy,
)
from prodnet.core_model import validate_equilibrium
from prodnet.data_objects import ShockSpec
from prodnet.errors import InactiveTechError, UnsupportedEconomyError
from prodnet.fixtures import EconomyBuilder, FixtureId, build


def test_hulten_share_of_raw_material(fig1):
    report = hulten_marginal(*fig1, "tauR", 0.1)
    assert report.marginal_share == pytest.approx(0.2)
    assert report.extrapolated_loss == pytest.approx(0.02)


def test_final_good_share_is_its_expenditure_share(fig1):
    assert hulten_marginal(*fig1, "tauF", 0.1).marginal_share == pytest.approx(1.0)


def test_long_run_chain(fig1):
    outcome = long_run_reequilibrate(*fig1, ShockSpec.of(["tauR"], 0.9))
    # Unit labor requirement of the final good rises from 10 to 10 + 2/9.
    assert outcome.baseline_gdp - outcome.lost_gdp_total == pytest.approx(10 / (10 + 2 / 9), rel=1e-9)
    assert outcome.flows.output("tauF") == pytest.approx(10 / (10 + 2 / 9), rel=1e-9)
    assert sum(outcome.idle_labor.values()) == 0.0


def test_long_run_loss_below_short_run(fig1):
    rows = long_run_loss_curve(*fig1, "tauR", [0.5, 0.9, 0.99])
    for row in rows:
        assert row["long_run_loss"] <= row["short_run_loss"] + 1e-12
    # First order: the Hulten extrapolation is close for small shocks.
    assert rows[-1]["long_run_loss"] == pytest.approx(rows[-1]["hulten_loss"], rel=1e-2)


def test_long_run_independent_of_wiring():
    shock = ShockSpec.of(["tau1"], 0.9)
    panel_a = long_run_reequilibrate(*build(FixtureId.FIG5_PANEL_A), shock)
    panel_b = long_run_reequilibrate(*build(FixtureId.FIG5_PANEL_B), shock)
    assert panel_a.loss_fraction == pytest.approx(panel_b.loss_fraction, abs=1e-4)


def test_no_shock_is_identity(fig1):
    outcome = long_run_reequilibrate(*fig1, ShockSpec.of(["tauR"], 1.0))
    assert outcome.lost_gdp_total == 0.0


def test_several_producers_rejected():
    economy, state = build(FixtureId.APPENDIX_B_WITH_BRANCH)
    with pytest.raises(UnsupportedEconomyError):
        long_run_reequilibrate(economy, state, ShockSpec.of(["tau1"], 0.9))


def test_inactive_technology(fig1):
    economy, state = fig1
    idle = state.model_copy(update={"outputs": {**state.outputs, "tauR": 0.0}})
    with pytest.raises(InactiveTechError):
        HultenAnalyzer(economy, idle, validate=False).hulten_marginal("tauR", 0.1)


@pytest.mark.parametrize(
    "fixture,tech",
    [
        (FixtureId.FIG1_CHAIN, "tauR"),
        (FixtureId.FIG5_PANEL_A, "tau1"),
        (FixtureId.FIG5_PANEL_B, "tau1"),
    ],
)
def test_long_run_state_is_an_equilibrium_of_the_shocked_economy(fixture, tech):
    economy, state = build(fixture)
    shock = ShockSpec.of([tech], 0.9)
    outcome = long_run_reequilibrate(economy, state, shock)
    assert validate_equilibrium(productivity_adjusted_economy(economy, shock), outcome.flows) == []


@pytest.mark.parametrize(
    "fixture,tech",
    [
        (FixtureId.FIG1_CHAIN, "tauR"),
        (FixtureId.FIG1_CHAIN, "tauI"),
        (FixtureId.FIG5_PANEL_A, "tau1"),
    ],
)
def test_small_shocks_approach_the_sales_share(fixture, tech):
    economy, state = build(fixture)
    big, small = 1e-3, 1e-4
    slope = {
        eps: long_run_reequilibrate(economy, state, ShockSpec.of([tech], 1 - eps)).loss_fraction / eps
        for eps in (big, small)
    }
    extrapolated = (big * slope[small] - small * slope[big]) / (big - small)
    share = hulten_marginal(economy, state, tech, 0.1).marginal_share
    assert extrapolated == pytest.approx(share, rel=1e-3)


def _random_chain(rng):
    """
    Four goods in a line, g3 final. Labor per unit of final output stays
    between 1 and 2 at every stage so the grid search below can resolve it.
    """
    cost = [Fraction(int(rng.integers(2, 5)), 2) for _ in range(4)]
    need = [Fraction(0)] + [Fraction(2) ** int(rng.integers(-1, 2)) for _ in range(3)]
    labor = []
    for k in range(4):
        downstream = Fraction(1)
        for j in range(k + 1, 4):
            downstream *= need[j]
        labor.append(cost[k] / downstream)
    outputs = [Fraction(0)] * 3 + [Fraction(int(rng.integers(2, 7)))]
    for k in range(3, 0, -1):
        outputs[k - 1] = need[k] * outputs[k]
    endowment = sum(a * y for a, y in zip(labor, outputs))
    b = EconomyBuilder().country("home", endowment)
    for k in range(4):
        b.good(f"g{k}", final=k == 3)
        inputs = {f"g{k - 1}": need[k]} if k else None
        b.tech(f"t{k}", "home", f"g{k}", labor=labor[k], y=outputs[k], inputs=inputs)
    for k in range(1, 4):
        b.ship(f"t{k - 1}", f"t{k}", outputs[k - 1])
    economy, state = b.build({"home": 1})
    return economy, state, [float(a) for a in labor], [float(n) for n in need], float(endowment)


def _grid_search_final_output(labor, need, endowment, shocked, lam, points=81, rounds=9):
    """Best final output over labor splits, on a box grid halved around the incumbent each round."""
    labor, need = np.array(labor), np.array(need)
    labor[shocked] /= lam
    need[shocked] /= lam
    center, half = np.full(3, endowment / 4), endowment / 2
    best = 0.0
    for _ in range(rounds):
        axes = [np.linspace(c - half, c + half, points) for c in center]
        split = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        split = np.column_stack([split, endowment - split.sum(axis=1)])
        split = split[(split >= 0).all(axis=1)]
        y = split[:, 0] / labor[0]
        for k in range(1, 4):
            y = np.minimum(split[:, k] / labor[k], y / need[k])
        i = int(np.argmax(y))
        best = max(best, float(y[i]))
        center, half = split[i, :3], half / 2
    return best


@pytest.mark.parametrize("seed", range(5))
def test_long_run_chain_matches_grid_search(seed):
    rng = np.random.default_rng(seed)
    economy, state, labor, need, endowment = _random_chain(rng)
    shocked = seed % 4
    outcome = long_run_reequilibrate(economy, state, ShockSpec.of([f"t{shocked}"], 0.9))
    exact = outcome.flows.output("t3")
    searched = _grid_search_final_output(labor, need, endowment, shocked, 0.9)
    assert searched <= exact + 1e-9
    assert searched == pytest.approx(exact, rel=2e-3)
