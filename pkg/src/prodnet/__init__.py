"""
prodnet: supply disruptions in production networks

This package analyzes shocks to equilibrium supply networks over three time
horizons:

1. Short run: Fixed prices, proportional rationing, shortages propagate downstream
2. Medium run: Flexible prices, efficient rerouting with fixed labor
3. Long run: Mobile labor, re-solved equilibrium and the Hulten statistic

On top of these it measures disruption centrality, the power one country has
over another's GDP, and the fragility of complex supply chains.
"""

from .analyzers import (
    CentralityAnalyzer,
    FragilityAnalyzer,
    HultenAnalyzer,
    MediumRunAnalyzer,
    PowerAnalyzer,
    PropagationAnalyzer,
)
from .config import Settings, get_settings
from .core_model import (
    NetworkView,
    country_gdp,
    gdp,
    load_economy,
    load_flow_state,
    save_economy,
    save_flow_state,
    validate_equilibrium,
)
from .data_objects import (
    Country,
    DisruptionOutcome,
    Economy,
    FlowState,
    Good,
    GoodKind,
    ShockSpec,
    Technology,
    TransportCosts,
    Violation,
)
from .errors import ProdnetError
from .report_generator import ReportGenerator

__version__ = "0.1.0"

__all__ = [
    # Core data objects
    "Country",
    "Good",
    "GoodKind",
    "Technology",
    "TransportCosts",
    "Economy",
    "FlowState",
    "ShockSpec",
    "DisruptionOutcome",
    "Violation",
    # Files and accounting
    "load_economy",
    "load_flow_state",
    "save_economy",
    "save_flow_state",
    "validate_equilibrium",
    "gdp",
    "country_gdp",
    "NetworkView",
    # Analyzers
    "HultenAnalyzer",
    "PropagationAnalyzer",
    "MediumRunAnalyzer",
    "CentralityAnalyzer",
    "PowerAnalyzer",
    "FragilityAnalyzer",
    # Plumbing
    "ReportGenerator",
    "ProdnetError",
    "Settings",
    "get_settings",
]


def main():
    """Entry point for the prodnet command line interface."""
    from .cli import main as cli_main

    cli_main()
