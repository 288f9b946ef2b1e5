"""Exact conditional-independence predicates, abelian group labelings, and
network-coding reduction gadgets over finite fields."""

__version__ = "0.1.0"
