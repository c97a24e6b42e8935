"""Metric star graph: bond geometry, sample grids, and Simpson quadrature.

A star graph is N finite bonds joined at a single vertex. Bond j is the
interval [0, L_j] with the vertex at x = 0 on every bond. Units are chosen
so that hbar = 2m = 1 and energies are k^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EvenPointCount,
    LengthMismatch,
    NonFiniteInput,
    NonPositiveLength,
    OutOfDomain,
    TooFewBonds,
)

#: grid size used for inner products and normalization checks
DEFAULT_RESOLUTION = 2001


@dataclass(frozen=True)
class MetricStarGraph:
    """Star graph defined by its bond lengths (vertex at x=0 on each bond)."""

    lengths: tuple[float, ...]

    @property
    def n_bonds(self) -> int:
        return len(self.lengths)

    def length(self, bond: int) -> float:
        """Length of bond `bond` (1-based)."""
        if not 1 <= bond <= self.n_bonds:
            raise OutOfDomain(f"bond index {bond} not in 1..{self.n_bonds}")
        return self.lengths[bond - 1]


def make_star_graph(lengths) -> MetricStarGraph:
    """Validate bond lengths and build a star graph.

    Lengths are stored exactly as given; at least two bonds are required and
    every length must be finite and positive.
    """
    lengths = tuple(float(l) for l in lengths)
    if len(lengths) < 2:
        raise TooFewBonds(f"a star graph needs at least 2 bonds, got {len(lengths)}")
    for j, l in enumerate(lengths, start=1):
        if not math.isfinite(l):
            raise NonFiniteInput(f"bond {j} length is not finite: {l!r}")
        if l <= 0.0:
            raise NonPositiveLength(f"bond {j} length must be > 0, got {l}")
    return MetricStarGraph(lengths)


@dataclass(frozen=True)
class BondGrid:
    """Uniform sample grid on one bond, endpoints included, odd point count."""

    bond_index: int
    points: np.ndarray = field(repr=False)
    count: int

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])


def bond_grid(graph: MetricStarGraph, bond: int, count: int = DEFAULT_RESOLUTION) -> BondGrid:
    """Uniform grid of `count` points on [0, L_bond]; count must be odd >= 3."""
    if count < 3 or count % 2 == 0:
        raise EvenPointCount(f"Simpson quadrature needs an odd point count >= 3, got {count}")
    pts = np.linspace(0.0, graph.length(bond), count)
    pts.setflags(write=False)
    return BondGrid(bond_index=bond, points=pts, count=count)


def quadrature(values, grid: BondGrid) -> complex:
    """Composite Simpson integral of sampled values over the grid interval.

    Exact for polynomials of degree <= 3 on each two-interval panel.
    """
    vals = np.asarray(values, dtype=complex)
    if vals.shape != (grid.count,):
        raise LengthMismatch(f"expected {grid.count} samples, got shape {vals.shape}")
    if grid.count % 2 == 0:
        raise EvenPointCount(f"point count {grid.count} is even")
    h = grid.spacing
    acc = vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-1:2].sum()
    return complex(acc * h / 3.0)


def simpson_weights(count: int, spacing: float) -> np.ndarray:
    """Simpson weight vector, so that integral = weights @ samples."""
    if count < 3 or count % 2 == 0:
        raise EvenPointCount(f"Simpson quadrature needs an odd point count >= 3, got {count}")
    w = np.full(count, 2.0)
    w[1:-1:2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (spacing / 3.0)
