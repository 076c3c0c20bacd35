"""Satellite distribution of hybrid cat/photon-number entanglement.

Truncated Fock-space states, direct distribution through lossy links, and
teleportation of either mode through an attenuated two-mode squeezed vacuum.
"""

from .errors import *  # noqa: F401,F403
from .fock import *  # noqa: F401,F403
from .hybrid import *  # noqa: F401,F403
from .direct import *  # noqa: F401,F403
from .dv_teleport import *  # noqa: F401,F403
from .cv_teleport import *  # noqa: F401,F403
from .sweep import *  # noqa: F401,F403

__version__ = "0.1.0"
