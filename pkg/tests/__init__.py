"""
Test Suite
Dense Survival Forest Subgroup Profiler
"""
