"""Size caps and numeric settings.

Caps are configuration: every function that honours one takes a ``limits``
argument defaulting to :data:`DEFAULT_LIMITS`.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    max_vertices: int = 64
    # enumeration of labeled regular graphs / degree sequences
    enum_n_dense: int = 10   # d >= 3
    enum_n_sparse: int = 12  # d <= 2
    pair_bruteforce_n: int = 10
    exact_pairs_n: int = 10
    config_model_max_d: int = 8

    def enum_cap(self, d: int) -> int:
        return self.enum_n_sparse if d <= 2 else self.enum_n_dense


DEFAULT_LIMITS = Limits()

# Working precision (decimal digits) for log-scale evaluators.
MP_DPS = 40
