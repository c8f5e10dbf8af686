# SPDX-License-Identifier: Apache-2.0
"""Low-light action recognition toolkit: Ind-GIC enhancement, delta sampling,
optical flow and a linear classification head."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
