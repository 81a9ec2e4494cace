"""Per-token loss-weight masks that boost numeric tokens.

Intended for external fine-tuning pipelines whose vocabularies carry
predefined tokens for small integers: weights are `scale` on tokens the
spec flags as numeric and 1.0 everywhere else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

#: scale factors exercised in the loss-weighting experiments
PRESET_SCALES = (1.5, 2.0, 2.5, 3.5)

# Plain base-10 integer token: no sign, no leading zeros (bare "0" allowed).
_PLAIN_INT = re.compile(r"0|[1-9][0-9]*")


@dataclass(frozen=True)
class NumericTokenSpec:
    """Which token strings count as numeric.

    Either an inclusive integer value range over plain digit strings, or
    an explicit token set. Exactly one mode is active.
    """

    min_value: Optional[int] = None
    max_value: Optional[int] = None
    tokens: Optional[frozenset[str]] = None

    def __post_init__(self):
        ranged = self.min_value is not None and self.max_value is not None
        if ranged == (self.tokens is not None):
            raise ValueError("specify either a value range or a token set")
        if ranged and self.min_value > self.max_value:
            raise ValueError("min_value must not exceed max_value")
        if self.tokens is not None and not self.tokens:
            raise ValueError("token set must be non-empty")

    @classmethod
    def value_range(cls, min_value: int, max_value: int) -> "NumericTokenSpec":
        return cls(min_value=min_value, max_value=max_value)

    @classmethod
    def explicit(cls, tokens) -> "NumericTokenSpec":
        return cls(tokens=frozenset(tokens))

    def is_numeric(self, token: str) -> bool:
        if self.tokens is not None:
            return token in self.tokens
        if not _PLAIN_INT.fullmatch(token):
            return False
        return self.min_value <= int(token) <= self.max_value


@dataclass(frozen=True)
class WeightMask:
    weights: tuple[float, ...]


def numeric_weight_mask(tokens: Sequence[str], spec: NumericTokenSpec,
                        scale: float) -> WeightMask:
    """weight[i] = scale iff tokens[i] is numeric under spec, else 1.0."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return WeightMask(weights=tuple(
        float(scale) if spec.is_numeric(t) else 1.0 for t in tokens
    ))
