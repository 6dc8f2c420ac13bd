"""
Dense Survival Forest Subgroup Profiler
"""

__version__ = "1.0.0"
