"""Truncation policy and global defaults.

The only module-level state is ``DEFAULT_POLICY``; it is never mutated.
Callers that need different settings build a new policy with
:meth:`TruncationPolicy.replace`.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class TruncationPolicy:
    rel_tol: float = 1e-12
    n_max: int = 100_000
    delta: float = 0.05
    q_max: float = 0.95
    product_cutoff: float = 1e-18
    # consecutive small terms required before a float series is accepted
    patience: int = 3

    def replace(self, **changes) -> "TruncationPolicy":
        return dataclasses.replace(self, **changes)


DEFAULT_POLICY = TruncationPolicy()
