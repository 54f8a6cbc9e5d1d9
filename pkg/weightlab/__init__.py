"""Exact linear algebra for weight filtrations of nilpotent orbits, the
combinatorial logarithmic complexes over S(M), and the unipotent
nearby-cycles complex."""
from .constants import TOOL_VERSION

__version__ = TOOL_VERSION
