from .tictoc import TicToc
from .threading import PropagatingThread
from .random import UniformSource
from .helpers import harmonic, harmonic_numbers, HarmonicTable

__all__ = ("PropagatingThread", "TicToc", "UniformSource", "harmonic", "harmonic_numbers",
           "HarmonicTable")
