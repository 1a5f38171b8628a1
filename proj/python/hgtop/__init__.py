"""Netflow hypergraph topology and persistence-based anomaly detection."""

from ._core import *  # noqa: F401,F403
from ._core import Error, ParseError, __doc__  # noqa: F401

__version__ = "0.1.0"
