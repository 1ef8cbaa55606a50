"""Shared fixtures for the prodnet test suite."""

from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np
import pytest

from prodnet.fixtures import EconomyBuilder, FixtureId, build


@pytest.fixture
def fig1():
    return build(FixtureId.FIG1_CHAIN)


@pytest.fixture
def fig7():
    return build(FixtureId.FIG7_POWER)


@pytest.fixture
def fig9():
    return build(FixtureId.FIG9_FIVE_COUNTRY)


@pytest.fixture
def fig11():
    return build(FixtureId.FIG11_NON_CONCAVE)


@pytest.fixture
def strategic():
    return build(FixtureId.STRATEGIC_POWER)


@pytest.fixture
def branch():
    return build(FixtureId.APPENDIX_B_WITH_BRANCH)


@pytest.fixture
def extended():
    return build(FixtureId.APPENDIX_B_EXTENDED)


def random_layered_economy(
    rng: np.random.Generator,
    layers: int = 3,
    width: int = 3,
    countries: Optional[List[str]] = None,
):
    """
    Random acyclic economy in equilibrium.

    Every technology makes its own good. Technologies in layer k draw inputs
    from a random nonempty subset of layer k - 1; the last layer makes final
    goods. Outputs are set from the finals backwards so that markets clear,
    and labor endowments equal labor use. Only countries that end up owning
    a technology are declared.
    """
    countries = countries or ["home"]
    b = EconomyBuilder()
    grid: List[List[str]] = []
    owner: Dict[str, str] = {}
    for layer in range(layers):
        row = []
        for k in range(width):
            tech = f"t{layer}_{k}"
            row.append(tech)
            owner[tech] = countries[int(rng.integers(len(countries)))]
            b.good(f"g{layer}_{k}", final=layer == layers - 1)
        grid.append(row)

    recipes: Dict[str, Dict[str, Fraction]] = {}
    for layer in range(1, layers):
        for tech in grid[layer]:
            size = int(rng.integers(1, width + 1))
            picks = sorted(rng.choice(width, size=size, replace=False).tolist())
            recipes[tech] = {f"g{layer - 1}_{k}": Fraction(int(rng.integers(1, 4)), 2) for k in picks}

    outputs: Dict[str, Fraction] = {tech: Fraction(int(rng.integers(2, 9))) for tech in grid[-1]}
    for layer in range(layers - 2, -1, -1):
        for k, tech in enumerate(grid[layer]):
            good = f"g{layer}_{k}"
            demand = sum((recipes[user].get(good, 0) * outputs[user] for user in grid[layer + 1]), Fraction(0))
            # Unused intermediates still produce a little for a final user that takes it.
            if demand == 0:
                user = grid[layer + 1][0]
                recipes[user][good] = Fraction(1, 2)
                demand = recipes[user][good] * outputs[user]
            outputs[tech] = demand

    labor = {tech: Fraction(int(rng.integers(1, 4)), 2) for row in grid for tech in row}
    used: Dict[str, Fraction] = {}
    for row in grid:
        for tech in row:
            used[owner[tech]] = used.get(owner[tech], Fraction(0)) + labor[tech] * outputs[tech]
    for country in sorted(used):
        b.country(country, used[country])
    for layer, row in enumerate(grid):
        for k, tech in enumerate(row):
            b.tech(tech, owner[tech], f"g{layer}_{k}", labor=labor[tech], y=outputs[tech], inputs=recipes.get(tech))
    for layer in range(1, layers):
        for user in grid[layer]:
            for good, qty in recipes[user].items():
                b.ship(f"t{good[1:]}", user, qty * outputs[user])
    return b.build({c: 1 for c in used})


@pytest.fixture
def layered():
    """Factory for seeded random layered economies."""
    return random_layered_economy
