"""facihub: hypergraph-targeted, human-reviewed AI discussion facilitation
engine with a presence-analytics and quasi-experimental statistics pipeline."""

__version__ = "0.1.0"
