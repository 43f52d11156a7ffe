"""Cooperative and cascaded quantum interface models."""

from ._core import *  # noqa: F401,F403
from ._core import Scheme, DeviceParams, NodeResponse  # noqa: F401
