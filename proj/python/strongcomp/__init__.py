"""Strong-competition reaction-diffusion solver."""

from ._strongcomp import *  # noqa: F401,F403
from ._strongcomp import __doc__  # noqa: F401
