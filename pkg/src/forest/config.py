"""
Forest Configuration
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass, field, asdict
from typing import Dict, Optional, Tuple

import numpy as np

from src.utils.errors import ConfigurationError


@dataclass(frozen=True)
class SplitRuleParams:
    """Weights of the interaction-targeting split score

    omega1 blends the C-index term against the interaction z-score term;
    omega2 scales the z-score ("den" in the parameter tables).
    """
    omega1: float = 0.0
    omega2: float = 3.5

    def __post_init__(self):
        if not 0.0 <= self.omega1 <= 1.0:
            raise ConfigurationError(f"omega1 must lie in [0, 1], got {self.omega1}")
        if not self.omega2 > 0.0:
            raise ConfigurationError(f"omega2 must be positive, got {self.omega2}")

    def score(self, concordance: float, interaction_z: float) -> float:
        return self.omega1 * (concordance - 0.5) / 2.0 + (1.0 - self.omega1) * (interaction_z / self.omega2)


@dataclass(frozen=True)
class ForestConfig:
    """Hyperparameters of one random survival forest"""
    ntree: int = 100
    mtry: int = 2
    nodesize: int = 50
    nodedepth: int = 3
    nsplit: int = 0
    split_params: SplitRuleParams = field(default_factory=SplitRuleParams)
    xvar_weights: Optional[Tuple[float, ...]] = None
    seed: int = 0

    def __post_init__(self):
        if self.ntree < 1:
            raise ConfigurationError("ntree must be positive")
        if self.mtry < 1:
            raise ConfigurationError("mtry must be at least 1")
        if self.nodesize < 1:
            raise ConfigurationError("nodesize must be positive")
        if self.nodedepth < 1:
            raise ConfigurationError("nodedepth must be positive")
        if self.nsplit < 0:
            raise ConfigurationError("nsplit must be non-negative")
        if self.xvar_weights is not None:
            weights = np.asarray(self.xvar_weights, dtype=float)
            if np.any(weights < 0) or weights.sum() <= 0:
                raise ConfigurationError("xvar_weights must be non-negative with a positive sum")

    def validate_for(self, p: int):
        """Checks that depend on the covariate count"""
        if self.mtry > p:
            raise ConfigurationError(f"mtry={self.mtry} exceeds the covariate count {p}")
        if self.xvar_weights is not None and len(self.xvar_weights) != p:
            raise ConfigurationError(f"xvar_weights has {len(self.xvar_weights)} entries, expected {p}")

    def to_dict(self) -> Dict:
        document = asdict(self)
        document["split_params"] = asdict(self.split_params)
        return document
