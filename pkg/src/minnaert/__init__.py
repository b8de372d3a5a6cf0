"""Minnaert resonances of 2D gas bubbles by boundary integral equations."""

__version__ = "0.1.0"
