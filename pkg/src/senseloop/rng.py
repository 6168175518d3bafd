"""Counter-based seeded random streams.

A stream is identified by a root seed plus a path of integer labels.
Substreams with distinct paths are statistically independent, and any
substream can be re-opened from scratch, so kernels can be re-run or
parallelised without replaying a shared generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream addressed by (seed, path)."""

    seed: int
    path: tuple[int, ...] = ()

    def substream(self, *labels: int) -> "RngStream":
        """Derive a child stream by appending labels to the path."""
        return RngStream(self.seed, self.path + tuple(labels))

    def generator(self) -> np.random.Generator:
        """Open a fresh numpy Generator for this (seed, path) address.

        Repeated calls return identically-seeded generators.
        """
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.default_rng(ss)
