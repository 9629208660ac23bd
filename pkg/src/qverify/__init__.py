"""q-series primitives, q-difference operators and an identity checker."""

__version__ = "0.1.0"
