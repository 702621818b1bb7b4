"""Exact and asymptotic moments of traces of Haar orthogonal matrices.

Genus-expansion evaluation over nonorientable gluings, exact orthogonal
Weingarten tables as rational functions of the dimension, trace cumulants,
and independent brute-force and Monte Carlo oracles for every formula.
"""

__version__ = "0.1.0"

from .errors import CapExceededError, PoleError, ValidationError  # noqa: F401
from .setpart import SetPartition, YoungDiagram  # noqa: F401
from .permap import Premap, SignedPermutation  # noqa: F401
from .ratpoly import PolyFrac  # noqa: F401
from .weingarten import TableSet, WeingartenTable, weingarten_table  # noqa: F401
from .matrixlab import DenseMatrix, McEstimate  # noqa: F401
from .expansion import TraceExpression, evaluate_moment, expand_moment  # noqa: F401
