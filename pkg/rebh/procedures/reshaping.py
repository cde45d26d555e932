from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from rebh.utils.helpers import floor_ratio, harmonic

__all__ = ("ReshapingFunction", "DiscreteReshaping", "BYReshape")


class ReshapingFunction(ABC):
    r"""A reshaping function :math:`\beta(r) = \int_0^r x \, d\nu(x)` for a probability measure :math:`\nu`.

    Running a step-up procedure with thresholds :math:`\alpha\beta(i)/K` controls the
    FDR under arbitrary dependence. The randomized variants evaluate :math:`\beta` at
    :math:`i/U`, which :meth:`at_ratio` computes.
    """

    @abstractmethod
    def __call__(self, r) -> np.ndarray:
        """Evaluate :math:`\\beta` elementwise.

        Parameters
        ----------
        r : float or array
            Nonnegative arguments.

        Returns
        -------
        beta : array
            Values of the reshaping function, same shape as `r`.
        """
        pass

    def at_ratio(self, i, u: float) -> np.ndarray:
        """:math:`\\beta(i / u)` for integer `i` and a uniform `u`."""
        return self(np.asarray(i, dtype=np.float64) / u)


class DiscreteReshaping(ReshapingFunction):
    """Reshaping function of a discrete measure given by atoms and their masses.

    Parameters
    ----------
    atoms : sequence of float
        Nonnegative, finite support points.
    masses : sequence of float
        Nonnegative masses summing to one.
    """

    def __init__(self, atoms: Sequence[float], masses: Sequence[float]):
        atoms = np.asarray(atoms, dtype=np.float64).reshape(-1)
        masses = np.asarray(masses, dtype=np.float64).reshape(-1)
        if atoms.shape != masses.shape or atoms.shape[0] == 0:
            raise ValueError("atoms and masses must be non-empty and of equal length, got %d and %d" %
                             (atoms.shape[0], masses.shape[0]))
        if not np.isfinite(atoms).all() or (atoms < 0).any():
            raise ValueError("atoms must be finite and nonnegative")
        if (masses < 0).any() or not np.isfinite(masses).all():
            raise ValueError("masses must be finite and nonnegative")
        if abs(masses.sum() - 1) > 1e-12:
            raise ValueError("masses must sum to 1, got %r" % (masses.sum()))

        order = np.argsort(atoms, kind="stable")
        self.atoms = atoms[order]
        self.masses = masses[order]
        self._cum = np.cumsum(self.atoms * self.masses)

    @classmethod
    def by_measure(cls, K: int) -> "DiscreteReshaping":
        """Mass ``1 / (j * ell_K)`` at every ``j = 1..K``; its reshaping function is that of BY."""
        j = np.arange(1, K + 1, dtype=np.float64)
        return cls(j, 1.0 / (j * harmonic(K)))

    @classmethod
    def point_mass(cls, x: float) -> "DiscreteReshaping":
        return cls([x], [1.0])

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        idx = np.searchsorted(self.atoms, r, side="right")
        return np.where(idx > 0, self._cum[(idx - 1).clip(min=0)], 0.0)

    def __repr__(self):
        return "DiscreteReshaping(n_atoms=%d)" % (self.atoms.shape[0])


class BYReshape(ReshapingFunction):
    """The reshaping function of BY, ``min(floor(r), K) / ell_K``, evaluated in closed form."""

    def __init__(self, K: int):
        self.K = K
        self.ell = harmonic(K)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return np.minimum(np.floor(r), self.K) / self.ell

    def at_ratio(self, i, u: float) -> np.ndarray:
        return np.asarray(floor_ratio(i, u, self.K), dtype=np.float64) / self.ell

    def __repr__(self):
        return "BYReshape(K=%d)" % (self.K)
