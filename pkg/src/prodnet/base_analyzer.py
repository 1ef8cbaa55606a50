"""
Base analyzer class for prodnet.

This module defines the abstract base class that all time-horizon and
network analyzers inherit from.
"""

import logging
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Any, Dict, Optional

from .config import get_settings
from .core_model import NetworkView, require_equilibrium
from .data_objects import Economy, FlowState

logger = logging.getLogger(__name__)


class BaseAnalyzer(ABC):
    """Abstract base class for all analyzers over an equilibrium flow network."""

    def __init__(
        self,
        economy: Economy,
        state: FlowState,
        tolerance: Optional[float] = None,
        validate: bool = True,
    ):
        """
        Initialize the analyzer.

        Args:
            economy: The economy
            state: An equilibrium flow state of that economy
            tolerance: Residual tolerance; defaults to PRODNET_TOLERANCE
            validate: Refuse states that fail equilibrium validation
        """
        self.economy = economy
        self.state = state
        self.settings = get_settings()
        self.tolerance = self.settings.tolerance if tolerance is None else tolerance
        if validate:
            require_equilibrium(economy, state, self.tolerance)

    @cached_property
    def network(self) -> NetworkView:
        return NetworkView(self.economy, self.state)

    @abstractmethod
    def analyze(self, **kwargs: Any) -> Dict[str, Any]:
        """
        Run this analyzer's headline computation.

        Returns:
            Dictionary of results, ready for the report generator
        """

    @staticmethod
    def safe_ratio(numerator: float, denominator: float, tolerance: float = 1e-12) -> float:
        """
        Loss ratio with the conventions used by the loss statistics: both
        sides zero gives 1, a positive numerator over zero gives +inf.
        """
        if abs(denominator) <= tolerance:
            return float("inf") if abs(numerator) > tolerance else 1.0
        return numerator / denominator
