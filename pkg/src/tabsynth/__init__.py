"""Tableau calculus synthesis from first-order semantic specifications,
with refinement, blocking, a generic tableau engine and a finite-model
oracle."""

__version__ = "0.1.0"
