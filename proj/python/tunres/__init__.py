"""Design and measurement-extraction toolkit for gate-tunable CPW resonators."""

from ._tunres import *  # noqa: F401,F403
from ._tunres import __doc__  # noqa: F401
