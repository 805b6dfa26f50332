"""Semantic dependency systems: denotations, dependency graphs, acceptable
valuations and dangerousness at desk scale."""

__version__ = "0.1.0"
