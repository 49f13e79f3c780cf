"""Desk-scale density-matrix simulator and noisy QML experiment harness."""

from noisyq.backend import backend_name

__all__ = ["backend_name"]
__version__ = "0.1.0"
