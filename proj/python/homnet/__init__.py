"""Saddle-focus homoclinic network laboratory.

Python bindings over the C++ core: the linearized local flow and local map
inside the isolating block, the affine flow-box transitions and the first
return map, switching-path realization by nested interval refinement, and
the attraction / horseshoe-absence audits.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
