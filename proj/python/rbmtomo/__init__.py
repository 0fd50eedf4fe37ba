"""RBM reconstruction of positive pure quantum states from bit-string data."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
