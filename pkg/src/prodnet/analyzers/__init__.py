"""
Analyzers for prodnet.

This package contains one analyzer per question asked of a supply network:
1. Hulten: Long-run losses with mobile labor
2. Propagation: Short-run losses under proportional rationing
3. Medium run: Efficient rationing and the loss to price rigidity
4. Centrality: Disruption centrality of single technologies
5. Power: What one country can do to another's GDP
6. Fragility: Expected losses from random disruptions
"""

from .centrality import CentralityAnalyzer, CentralityReport, SourcingShares
from .fragility import ComplexityStats, ConsolidationReport, FragilityAnalyzer, MonteCarloEstimate
from .hulten import HultenAnalyzer, HultenReport
from .medium_run import LprReport, MediumRunAnalyzer, MediumRunResult
from .power import Frontier, PowerAnalyzer, PowerReport, RoutingStrategy
from .propagation import BoundReport, CutReport, PropagationAnalyzer, PropagationConfig

__all__ = [
    "HultenAnalyzer",
    "HultenReport",
    "PropagationAnalyzer",
    "PropagationConfig",
    "BoundReport",
    "CutReport",
    "MediumRunAnalyzer",
    "MediumRunResult",
    "LprReport",
    "CentralityAnalyzer",
    "CentralityReport",
    "SourcingShares",
    "PowerAnalyzer",
    "PowerReport",
    "RoutingStrategy",
    "Frontier",
    "FragilityAnalyzer",
    "ComplexityStats",
    "ConsolidationReport",
    "MonteCarloEstimate",
]
