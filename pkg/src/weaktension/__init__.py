"""Weak values, complex weak conditional probabilities and the logical tension of state triples."""

__version__ = "0.1.0"
