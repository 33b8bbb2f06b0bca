"""Two-weight norm inequalities for fractional integrals on discretized measures."""

from ._twoweight import *  # noqa: F401,F403
from ._twoweight import REPORT_SCHEMA, REPORT_VERSION, InvalidInput

__version__ = "0.1.0"
