"""Fault detection on cellular KPI snapshots under heavy class imbalance."""

__version__ = "0.1.0"
