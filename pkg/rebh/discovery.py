"""Result types shared by all procedures."""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional

import numpy as np

__all__ = ("DiscoverySet", "EbhResult", "ByResult", "MergedP", "SelectionResult")


@dataclass(frozen=True)
class DiscoverySet:
    """Hypotheses rejected by a procedure.

    Parameters
    ----------
    rejected : frozenset of int
        0-based indices of the rejected hypotheses.
    k_star : int
        Number of rejections.
    threshold : float or None
        The realized rejection threshold, on the scale of the statistic the procedure
        thresholds (e-values for e-BH variants, p-values for BH-type procedures), when
        the procedure defines one.
    """
    rejected: FrozenSet[int]
    k_star: int
    threshold: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "rejected", frozenset(int(i) for i in self.rejected))
        if len(self.rejected) != self.k_star:
            raise ValueError("Discovery set holds %d indices but k_star is %d" %
                             (len(self.rejected), self.k_star))

    @classmethod
    def from_indices(cls, indices: Iterable[int], threshold: Optional[float] = None) -> "DiscoverySet":
        rejected = frozenset(int(i) for i in indices)
        return cls(rejected, len(rejected), None if threshold is None else float(threshold))

    @classmethod
    def from_mask(cls, mask: np.ndarray, threshold: Optional[float] = None) -> "DiscoverySet":
        return cls.from_indices(np.flatnonzero(mask), threshold)

    def indices(self) -> np.ndarray:
        """Sorted array of rejected indices."""
        return np.array(sorted(self.rejected), dtype=np.int64)

    def mask(self, K: int) -> np.ndarray:
        out = np.zeros(K, dtype=bool)
        out[self.indices()] = True
        return out

    def __contains__(self, i) -> bool:
        return i in self.rejected

    def __len__(self) -> int:
        return self.k_star

    def issuperset(self, other: "DiscoverySet") -> bool:
        return self.rejected >= other.rejected


@dataclass(frozen=True)
class EbhResult:
    """Output of e-BH and its randomized variants.

    `alpha_hat_star` is ``alpha * (k_star + 1) / K`` computed from the e-BH step-up
    count of the (possibly rounded) input, and `rounded_values` holds the e-values after
    any stochastic rounding, for auditing a randomized run.
    """
    discoveries: DiscoverySet
    k_star: int
    alpha_hat_star: float
    rounded_values: Optional[np.ndarray] = None

    @property
    def rejected(self) -> FrozenSet[int]:
        return self.discoveries.rejected


@dataclass(frozen=True)
class ByResult:
    discoveries: DiscoverySet
    k_star: int
    threshold: float

    @property
    def rejected(self) -> FrozenSet[int]:
        return self.discoveries.rejected


@dataclass(frozen=True)
class MergedP:
    """A merged p-value for the global null, capped at 1."""
    value: float
    randomized: bool = False
    u_used: Optional[float] = None

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError("Merged p-value must be nonnegative, got %r" % (self.value))
        if self.randomized and self.u_used is None:
            raise ValueError("A randomized merged p-value must record the uniform it used")
        object.__setattr__(self, "value", min(float(self.value), 1.0))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class SelectionResult:
    """Selected parameters and the miscoverage level of each selected interval.

    Every level rule in :mod:`rebh.fcr` assigns the same level to all selected indices.
    """
    selected: FrozenSet[int]
    levels: Dict[int, float]

    def __post_init__(self):
        object.__setattr__(self, "selected", frozenset(int(i) for i in self.selected))
        if set(self.levels) != self.selected:
            raise ValueError("Levels must be given for exactly the selected indices")
        for i, level in self.levels.items():
            if not (0 < level <= 1):
                raise ValueError("Level of index %d must be in (0, 1], got %r" % (i, level))

    def __len__(self) -> int:
        return len(self.selected)
