"""Long-time asymptotics machinery for the defocusing NLS equation."""

__version__ = "0.1.0"
