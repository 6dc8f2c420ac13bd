"""
Covariate Recovery
Dense Survival Forest Subgroup Profiler
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from src.profiling.selection import ProfileResult


@dataclass
class RecoveryReport:
    """How often selected profiles use the target covariates"""
    method: str
    replicates: int
    target_names: Tuple[str, str]
    rate_first: float
    rate_second: float
    rate_both: float
    covariate_count_distribution: Dict[int, float] = field(default_factory=dict)

    def rows(self) -> List[Dict]:
        """CSV rows: the three rates, then one row per covariate count"""
        first, second = self.target_names
        rows = [
            {"method": self.method, "measure": f"rate_{first}", "value": self.rate_first},
            {"method": self.method, "measure": f"rate_{second}", "value": self.rate_second},
            {"method": self.method, "measure": f"rate_{first}&{second}", "value": self.rate_both},
        ]
        for count in sorted(self.covariate_count_distribution):
            rows.append({"method": self.method, "measure": f"share_{count}_covariates",
                         "value": self.covariate_count_distribution[count]})
        return rows


def covariate_recovery(profiles: Sequence[ProfileResult], targets: Sequence[int] = (5, 6),
                       method: str = "proposed", declared_only: bool = False) -> RecoveryReport:
    """
    Rates at which profiles split on each target covariate and on both

    Args:
        profiles: One selected profile per replicate
        targets: Two covariate indices (X6, X7 by default)
        method: Label carried into the report
        declared_only: Count only profiles that declared heterogeneity

    Returns:
        RecoveryReport
    """
    if declared_only:
        profiles = [profile for profile in profiles if profile.heterogeneous]
    if not profiles:
        raise ValueError("covariate recovery needs at least one profile")

    first, second = int(targets[0]), int(targets[1])
    names = profiles[0].tree.schema
    target_names = (names[first].name, names[second].name)

    hits_first = hits_second = hits_both = 0
    counts: Counter = Counter()
    for profile in profiles:
        used = set(profile.tree.split_variables)
        hits_first += first in used
        hits_second += second in used
        hits_both += first in used and second in used
        counts[len(used)] += 1

    m = len(profiles)
    return RecoveryReport(
        method=method,
        replicates=m,
        target_names=target_names,
        rate_first=hits_first / m,
        rate_second=hits_second / m,
        rate_both=hits_both / m,
        covariate_count_distribution={count: number / m for count, number in sorted(counts.items())},
    )
