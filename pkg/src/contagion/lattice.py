"""Finite torus geometry: distances, neighborhoods, confined-move sets.

All coordinates live on a d-dimensional torus with side L and are kept
reduced mod L. Particles are confined to a ball of radius k around their
home site, measured in either the L1 or the Linf torus metric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterator

Coords = tuple[int, ...]


class Norm(Enum):
    L1 = "l1"
    LINF = "linf"


class LatticeError(ValueError):
    """Invalid lattice / region configuration."""


@dataclass(frozen=True)
class TorusLattice:
    d: int
    L: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise LatticeError(f"dimension must be >= 1, got {self.d}")
        if self.L < 3:
            raise LatticeError(f"side must be >= 3, got {self.L}")

    @property
    def total_sites(self) -> int:
        return self.L ** self.d

    def wrap(self, coords: Coords) -> Coords:
        return tuple(c % self.L for c in coords)

    def site_index(self, coords: Coords) -> int:
        idx = 0
        for c in coords:
            idx = idx * self.L + (c % self.L)
        return idx

    def site_coords(self, index: int) -> Coords:
        out = []
        for _ in range(self.d):
            out.append(index % self.L)
            index //= self.L
        return tuple(reversed(out))

    def sites(self) -> Iterator[Coords]:
        return itertools.product(range(self.L), repeat=self.d)


@dataclass(frozen=True)
class RegionSpec:
    home: Coords
    k: int
    norm: Norm = Norm.L1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise LatticeError(f"region radius must be >= 1, got {self.k}")

    def admits(self, pos: Coords, lattice: TorusLattice) -> bool:
        return torus_distance(pos, self.home, lattice, self.norm) <= self.k


def check_region_fits(lattice: TorusLattice, k: int) -> None:
    """A radius-k ball must not wrap onto itself: require L >= 2k+2."""
    if lattice.L < 2 * k + 2:
        raise LatticeError(
            f"L={lattice.L} too small for region radius k={k}; need L >= {2 * k + 2}"
        )


def torus_distance(a: Coords, b: Coords, lattice: TorusLattice, norm: Norm = Norm.L1) -> int:
    if len(a) != lattice.d or len(b) != lattice.d:
        raise LatticeError(f"coordinate dimension mismatch: {a}, {b}, d={lattice.d}")
    per_axis = []
    for ai, bi in zip(a, b):
        delta = abs(ai % lattice.L - bi % lattice.L)
        per_axis.append(min(delta, lattice.L - delta))
    if norm is Norm.L1:
        return sum(per_axis)
    return max(per_axis)


def neighbors(x: Coords, lattice: TorusLattice) -> set[Coords]:
    """The 2d nearest neighbors of x on the torus (distinct since L >= 3)."""
    out: set[Coords] = set()
    for axis in range(lattice.d):
        for step in (1, -1):
            nb = list(x)
            nb[axis] = (nb[axis] + step) % lattice.L
            out.add(tuple(nb))
    return out


def accessible_moves(pos: Coords, region: RegionSpec, lattice: TorusLattice) -> set[Coords]:
    """Neighbors of pos that stay inside the region; nonempty for admissible pos."""
    if not region.admits(pos, lattice):
        raise LatticeError(f"position {pos} outside region around {region.home}")
    moves = {nb for nb in neighbors(pos, lattice) if region.admits(nb, lattice)}
    assert moves, "an admissible position always has an admissible neighbor"
    return moves


def l1_ball_size(d: int, k: int) -> int:
    """Number of lattice points within L1 distance k of a point in Z^d.

    Counted on the infinite lattice:  sum_i 2^i C(d,i) C(k,i).
    """
    if d < 1 or k < 0:
        raise LatticeError(f"need d >= 1 and k >= 0, got d={d}, k={k}")
    return sum(2**i * comb(d, i) * comb(k, i) for i in range(0, min(d, k) + 1))


def region_sites(region: RegionSpec, lattice: TorusLattice) -> set[Coords]:
    """All admissible positions of a region (enumerated over the torus)."""
    return {
        s for s in lattice.sites() if region.admits(s, lattice)
    }
