"""Cross-lingual retrieval-based generative QA engine."""

__version__ = "0.1.0"
