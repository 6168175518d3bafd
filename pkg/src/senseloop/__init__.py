"""senseloop: a deterministic sensorimotor simulation workbench."""

__version__ = "0.1.0"
