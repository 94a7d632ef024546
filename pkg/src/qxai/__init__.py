"""Statevector quantum classifiers, classical baselines and model explainers."""

__version__ = "0.1.0"
