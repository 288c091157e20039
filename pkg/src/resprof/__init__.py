"""Resilience profiling for microservice systems.

Ranks monitoring metrics by how much they contribute to failure-induced
degradation and condenses the ranking into a resilience index that is high
when degradation stays within system-performance metrics and low when it
reaches user-aware metrics.
"""

__version__ = "0.1.0"
