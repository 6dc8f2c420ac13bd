"""
Hyperparameter Grid
Dense Survival Forest Subgroup Profiler
"""

from dataclasses import dataclass, field, asdict
from itertools import product
from typing import Dict, List, Optional, Tuple

from config.settings import settings
from src.forest.config import ForestConfig, SplitRuleParams
from src.utils.errors import ConfigurationError

# Parameter order of the Cartesian product
GRID_PARAMETERS = ("mtry", "nodedepth", "nsplit", "nodesize", "weight")

_PRESETS: Dict[str, Dict] = {
    "case_study": {
        "mtry": (2, 3),
        "nodedepth": (2, 3),
        "nsplit": (0, 20, 50),
        "nodesize": (50, 70, 100),
        "weight": (0.0, 0.1, 0.2, 0.3, 0.4, 0.5),
        "ntree": 500,
        "den": 3.5,
    },
    "simulation": {
        "mtry": (6, 7),
        "nodedepth": (2, 3, 4),
        "nsplit": (0, 20, 50),
        "nodesize": (50, 70, 120),
        "weight": (0.0, 0.1, 0.2, 0.3, 0.4, 0.5),
        "ntree": 1500,
        "den": 3.5,
    },
    "desk": {
        "mtry": (2, 3),
        "nodedepth": (2, 3),
        "nsplit": (20,),
        "nodesize": (50,),
        "weight": (0.0, 0.3),
        "ntree": 50,
        "den": 3.5,
    },
}


@dataclass(frozen=True)
class ParamGrid:
    """Value lists of the forest hyperparameters; one forest per combination"""
    mtry: Tuple[int, ...] = (2,)
    nodedepth: Tuple[int, ...] = (3,)
    nsplit: Tuple[int, ...] = (0,)
    nodesize: Tuple[int, ...] = (50,)
    weight: Tuple[float, ...] = (0.0,)
    ntree: int = 100
    den: float = 3.5
    seed: int = field(default_factory=lambda: settings.DEFAULT_SEED)
    xvar_weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for name in GRID_PARAMETERS:
            values = getattr(self, name)
            if len(values) == 0:
                raise ConfigurationError(f"grid parameter '{name}' has no values")
        if self.ntree < 1:
            raise ConfigurationError("ntree must be positive")

    @property
    def size(self) -> int:
        total = 1
        for name in GRID_PARAMETERS:
            total *= len(getattr(self, name))
        return total

    @classmethod
    def preset(cls, name: str, seed: Optional[int] = None, **overrides) -> "ParamGrid":
        """
        Named grid (case_study, simulation or desk)

        Args:
            name: Preset name
            seed: Base seed (settings.DEFAULT_SEED when None)
            **overrides: Field values replacing the preset's

        Returns:
            ParamGrid
        """
        if name not in _PRESETS:
            raise ConfigurationError(f"unknown grid preset '{name}' (choose from {', '.join(sorted(_PRESETS))})")
        values = dict(_PRESETS[name])
        values.update(overrides)
        values["seed"] = settings.DEFAULT_SEED if seed is None else seed
        return cls(**values)

    def with_min_nodesize(self, minimum: int) -> "ParamGrid":
        """Grid whose nodesize values are raised to at least `minimum`"""
        raised = tuple(sorted({max(int(v), int(minimum)) for v in self.nodesize}))
        values = asdict(self)
        values["nodesize"] = raised
        return ParamGrid(**values)

    def to_dict(self) -> Dict:
        return {key: (list(value) if isinstance(value, tuple) else value) for key, value in asdict(self).items()}


def expand_grid(grid: ParamGrid) -> List[ForestConfig]:
    """
    Cartesian product of the grid in (mtry, nodedepth, nsplit, nodesize, weight) order

    Configuration i receives seed grid.seed + i.
    """
    configs = []
    for i, (mtry, nodedepth, nsplit, nodesize, weight) in enumerate(
        product(*(getattr(grid, name) for name in GRID_PARAMETERS))
    ):
        configs.append(ForestConfig(
            ntree=grid.ntree,
            mtry=int(mtry),
            nodesize=int(nodesize),
            nodedepth=int(nodedepth),
            nsplit=int(nsplit),
            split_params=SplitRuleParams(omega1=float(weight), omega2=float(grid.den)),
            xvar_weights=grid.xvar_weights,
            seed=grid.seed + i,
        ))
    return configs
