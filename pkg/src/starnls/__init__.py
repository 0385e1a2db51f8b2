"""Ground states of the NLS energy with a point nonlinearity on star graphs."""

from .params import (DomainError, InfeasiblePairError, NonlinearParams, NoThresholdError,
                     Regime, RegimeError, SearchFailure)

__all__ = ["DomainError", "InfeasiblePairError", "NoThresholdError", "NonlinearParams",
           "Regime", "RegimeError", "SearchFailure"]
__version__ = "0.1.0"
