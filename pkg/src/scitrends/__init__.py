"""Ontology-driven topic classification, scholarly knowledge-graph assembly,
and research-trend analytics and forecasting."""

__version__ = "0.1.0"
