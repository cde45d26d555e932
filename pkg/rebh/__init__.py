import os

from . import procedures, merging, rounding, fcr, sim
from .options import RebhOptions
from .discovery import DiscoverySet, EbhResult, ByResult, MergedP, SelectionResult
from .procedures import ebh, r1_ebh, r2_ebh, rboth_ebh, u_ebh, j_ebh, pe_ebh, bh, by, u_by
from .merging import hommel_p, u_hommel_p, closed_hommel, closed_u_hommel, merge_p, merge_p_randomized
from .utils import UniformSource

__all__ = ('procedures', 'merging', 'rounding', 'fcr', 'sim',
           'RebhOptions', 'DiscoverySet', 'EbhResult', 'ByResult', 'MergedP', 'SelectionResult',
           'ebh', 'r1_ebh', 'r2_ebh', 'rboth_ebh', 'u_ebh', 'j_ebh', 'pe_ebh', 'bh', 'by', 'u_by',
           'hommel_p', 'u_hommel_p', 'closed_hommel', 'closed_u_hommel', 'merge_p', 'merge_p_randomized',
           'UniformSource')


# Set __version__ attribute on the package
with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'VERSION')) as version_file:
    __version__ = version_file.read().strip()
