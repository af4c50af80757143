"""Kuramoto gradient flow on random geometric graphs on the circle."""

from ._krgg import *  # noqa: F401,F403
from ._krgg import __doc__  # noqa: F401
