"""Percolation comparison harness for the small-clearance-rate regime.

One particle per sparse-grid region performs a confined walk in an Linf
square of radius k with corner sites at the four (+-k, +-k) offsets. A
region trial succeeds when the particle reaches the activating corner
while it is still contaminated and then, in a single continuously
infected excursion, covers the remaining three corners before the corner
clears. The success probability feeds an independent site percolation
model on the grid of regions, compared against the percolation
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numba import njit


class Adjacency(Enum):
    FOUR = "four"
    EIGHT = "eight"


# ---------------------------------------------------------------------------
# single-region trials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionTrialConfig:
    k: int
    lam: float
    gamma: float
    start_policy: str = "at_farthest_corner"  # or "at_center", "uniform"
    max_sim_time: Optional[float] = None  # default 1e4 / gamma
    # "infection_transfer": the particle contaminates every site it enters
    # while infected (each with its own clearance clock) and is re-infected
    # by any contaminated site; success when all other corners have been
    # contaminated before the activating corner's initial clearance time.
    # "single_excursion": stricter reading; all other corners must be
    # covered within one continuously infected excursion out of z_act.
    rule: str = "infection_transfer"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite positive, got {self.gamma}")
        if self.start_policy not in ("at_center", "at_farthest_corner", "uniform"):
            raise ValueError(f"unknown start policy {self.start_policy!r}")
        if self.rule not in ("infection_transfer", "single_excursion"):
            raise ValueError(f"unknown trial rule {self.rule!r}")

    @property
    def time_cap(self) -> float:
        return self.max_sim_time if self.max_sim_time is not None else 1e4 / self.gamma


@dataclass(frozen=True)
class RegionTrialOutcome:
    success: bool
    jumps: int
    safeguard_tripped: bool

    def __bool__(self) -> bool:
        return self.success


def region_open_trial(config: RegionTrialConfig, rng: np.random.Generator) -> RegionTrialOutcome:
    """One trial of the region-openness event.

    The activating corner z_act = (k, k) starts contaminated with an
    Exp(gamma) clearance time. The particle walks at rate 1 inside the
    Linf ball of radius k, becomes infected on jumping onto z_act while
    contaminated, and recovers at rate lam. Success must occur before
    z_act's initial clearance time; see RegionTrialConfig.rule for the
    two success readings.
    """
    k = config.k
    z_act = (k, k)
    other_corners = {(k, -k), (-k, k), (-k, -k)}
    if config.start_policy == "at_center":
        pos = (0, 0)
    elif config.start_policy == "at_farthest_corner":
        pos = (-k, -k)
    else:
        pos = (int(rng.integers(-k, k + 1)), int(rng.integers(-k, k + 1)))
    clear_time = rng.exponential(1.0 / config.gamma)
    horizon = min(clear_time, config.time_cap)
    trail = config.rule == "infection_transfer"

    t = 0.0
    infected = False
    in_excursion = False
    visited: set[tuple[int, int]] = set()
    clear_at: dict[tuple[int, int], float] = {z_act: clear_time}
    jumps = 0
    while True:
        rate = 1.0 + (config.lam if infected else 0.0)
        t += rng.exponential(1.0 / rate)
        if t >= horizon:
            tripped = config.time_cap < clear_time and t >= config.time_cap
            return RegionTrialOutcome(False, jumps, tripped)
        if infected and rng.random() * rate >= 1.0:
            # recovery ends any running excursion
            infected = False
            in_excursion = False
            if not trail:
                visited = set()
            continue
        # jump to a uniform admissible neighbor within the Linf ball
        cand = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (pos[0] + dx, pos[1] + dy)
            if max(abs(nxt[0]), abs(nxt[1])) <= k:
                cand.append(nxt)
        src = pos
        pos = cand[rng.integers(0, len(cand))]
        jumps += 1
        if trail:
            if not infected and t < clear_at.get(pos, 0.0):
                infected = True  # picked up from a contaminated site
            if infected:
                # arriving infected contaminates a clean site (fresh clock);
                # an already contaminated site keeps its memoryless clock
                if t >= clear_at.get(pos, 0.0):
                    clear_at[pos] = t + rng.exponential(1.0 / config.gamma)
                if pos in other_corners:
                    visited.add(pos)
                    if len(visited) == 3:
                        return RegionTrialOutcome(True, jumps, False)
        else:
            if src == z_act and infected:
                in_excursion = True
                visited = set()
            if pos == z_act:
                infected = True  # contaminated until horizon by construction
                in_excursion = False
                visited = set()
            elif in_excursion and pos in other_corners:
                visited.add(pos)
                if len(visited) == 3:
                    return RegionTrialOutcome(True, jumps, False)


@dataclass(frozen=True)
class OpennessEstimate:
    p_tilde: float
    ci_halfwidth: float
    trials: int
    p_m_ge_1: float
    p_open: float
    safeguard_trips: int


def estimate_openness(
    config: RegionTrialConfig,
    trials: int,
    p_m_ge_1: float,
    rng: np.random.Generator,
) -> OpennessEstimate:
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    if not 0.0 <= p_m_ge_1 <= 1.0:
        raise ValueError(f"p_m_ge_1 must be a probability, got {p_m_ge_1}")
    successes = 0
    trips = 0
    for _ in range(trials):
        outcome = region_open_trial(config, rng)
        successes += outcome.success
        trips += outcome.safeguard_tripped
    p_tilde = successes / trials
    ci = 1.96 * math.sqrt(max(p_tilde * (1.0 - p_tilde), 0.0) / trials)
    return OpennessEstimate(
        p_tilde=p_tilde,
        ci_halfwidth=ci,
        trials=trials,
        p_m_ge_1=p_m_ge_1,
        p_open=p_m_ge_1 * p_tilde,
        safeguard_trips=trips,
    )


# ---------------------------------------------------------------------------
# site percolation on the region grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PercGridResult:
    n: int
    adjacency: Adjacency
    p: float
    spanning: bool
    cluster_size_at_origin: int


@njit(cache=True, nogil=True)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@njit(cache=True, nogil=True)
def _uf_union(parent, size, a, b):
    ra = _uf_find(parent, a)
    rb = _uf_find(parent, b)
    if ra == rb:
        return
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]


@njit(cache=True, nogil=True)
def _percolate_kernel(open_grid, eight, origin_a, origin_b):
    """Union-find clustering; returns (spanning, origin cluster size).

    Virtual nodes n*n (left wall) and n*n+1 (right wall) detect
    left-right spanning; their sizes are excluded from cluster sizes.
    """
    n = open_grid.shape[0]
    total = n * n
    # two forests: `parent` includes the wall nodes (spanning detection only;
    # wall unions merge unrelated clusters, so its sizes are meaningless),
    # `parent_sz` carries the true cluster sizes
    parent = np.arange(total + 2, dtype=np.int64)
    size = np.ones(total + 2, dtype=np.int64)
    parent_sz = np.arange(total, dtype=np.int64)
    size_sz = np.ones(total, dtype=np.int64)
    size[total] = 0
    size[total + 1] = 0
    left = total
    right = total + 1
    for r in range(n):
        for c in range(n):
            if not open_grid[r, c]:
                continue
            idx = r * n + c
            if c == 0:
                _uf_union(parent, size, idx, left)
            if c == n - 1:
                _uf_union(parent, size, idx, right)
            if r > 0 and open_grid[r - 1, c]:
                _uf_union(parent, size, idx, idx - n)
                _uf_union(parent_sz, size_sz, idx, idx - n)
            if c > 0 and open_grid[r, c - 1]:
                _uf_union(parent, size, idx, idx - 1)
                _uf_union(parent_sz, size_sz, idx, idx - 1)
            if eight:
                if r > 0 and c > 0 and open_grid[r - 1, c - 1]:
                    _uf_union(parent, size, idx, idx - n - 1)
                    _uf_union(parent_sz, size_sz, idx, idx - n - 1)
                if r > 0 and c < n - 1 and open_grid[r - 1, c + 1]:
                    _uf_union(parent, size, idx, idx - n + 1)
                    _uf_union(parent_sz, size_sz, idx, idx - n + 1)
    spanning = _uf_find(parent, left) == _uf_find(parent, right)
    origin_size = 0
    ra = -1
    if open_grid[origin_a // n, origin_a % n]:
        ra = _uf_find(parent_sz, origin_a)
        origin_size += size_sz[ra]
    if open_grid[origin_b // n, origin_b % n]:
        rb = _uf_find(parent_sz, origin_b)
        if rb != ra:
            origin_size += size_sz[rb]
    return spanning, origin_size


def _origin_cells(n: int) -> tuple[int, int]:
    # images of the two regions activated by the initially infected origin:
    # vertically adjacent cells near the middle of the box
    r, c = n // 2, n // 2
    return (r * n + c, (r - 1) * n + c)


def percolate(
    n: int,
    p: float,
    adjacency: Adjacency,
    rng: Optional[np.random.Generator] = None,
    uniforms: Optional[np.ndarray] = None,
) -> PercGridResult:
    """Open each site independently with probability p; label clusters.

    Pass `uniforms` (shape (n, n)) to drive several p values from shared
    randomness; the open sets are then nested in p, making spanning
    monotone per realization.
    """
    if n < 2:
        raise ValueError(f"grid side must be >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    if uniforms is None:
        if rng is None:
            raise ValueError("need an rng when uniforms are not supplied")
        uniforms = rng.random((n, n))
    if uniforms.shape != (n, n):
        raise ValueError(f"uniforms must have shape ({n}, {n})")
    open_grid = uniforms < p
    a, b = _origin_cells(n)
    spanning, origin_size = _percolate_kernel(
        open_grid, adjacency is Adjacency.EIGHT, a, b
    )
    return PercGridResult(
        n=n,
        adjacency=adjacency,
        p=p,
        spanning=bool(spanning),
        cluster_size_at_origin=int(origin_size),
    )


def bfs_clusters(open_grid: np.ndarray, adjacency: Adjacency) -> np.ndarray:
    """Reference cluster labeling by BFS; label 0 = closed."""
    n = open_grid.shape[0]
    labels = np.zeros((n, n), dtype=np.int64)
    if adjacency is Adjacency.FOUR:
        steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    else:
        steps = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    next_label = 0
    for r in range(n):
        for c in range(n):
            if not open_grid[r, c] or labels[r, c]:
                continue
            next_label += 1
            queue = [(r, c)]
            labels[r, c] = next_label
            while queue:
                cr, cc = queue.pop()
                for dr, dc in steps:
                    nr, nc = cr + dr, cc + dc
                    if 0 <= nr < n and 0 <= nc < n and open_grid[nr, nc] and not labels[nr, nc]:
                        labels[nr, nc] = next_label
                        queue.append((nr, nc))
    return labels


def spanning_fraction(
    n: int, p: float, adjacency: Adjacency, realizations: int, rng: np.random.Generator
) -> float:
    hits = 0
    for _ in range(realizations):
        hits += percolate(n, p, adjacency, rng=rng).spanning
    return hits / realizations


@dataclass(frozen=True)
class ThresholdEstimate:
    p_hat: float
    ci_halfwidth: float
    n: int
    adjacency: Adjacency
    realizations_per_p: int


def threshold_estimate(
    n: int,
    adjacency: Adjacency,
    realizations_per_p: int,
    rng: np.random.Generator,
    p_lo: float = 0.30,
    p_hi: float = 0.80,
    iterations: int = 10,
) -> ThresholdEstimate:
    """Bisect for the p where the spanning probability crosses 1/2."""
    lo, hi = p_lo, p_hi
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if spanning_fraction(n, mid, adjacency, realizations_per_p, rng) < 0.5:
            lo = mid
        else:
            hi = mid
    p_hat = 0.5 * (lo + hi)
    # propagate binomial noise through a locally estimated slope
    delta = 0.02
    f_hi = spanning_fraction(n, p_hat + delta, adjacency, realizations_per_p, rng)
    f_lo = spanning_fraction(n, p_hat - delta, adjacency, realizations_per_p, rng)
    slope = max((f_hi - f_lo) / (2 * delta), 1.0)
    se_frac = math.sqrt(0.25 / realizations_per_p)
    ci = (hi - lo) / 2.0 + 1.96 * se_frac / slope
    return ThresholdEstimate(
        p_hat=p_hat,
        ci_halfwidth=ci,
        n=n,
        adjacency=adjacency,
        realizations_per_p=realizations_per_p,
    )


# ---------------------------------------------------------------------------
# end-to-end verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupercriticalityVerdict:
    p_open: float
    p_open_ci: float
    p_c_hat: float
    p_c_ci: float
    margin: float
    verdict: str  # supercritical-evidence | inconclusive | subcritical-evidence
    openness: OpennessEstimate
    threshold: ThresholdEstimate

    def to_dict(self) -> dict:
        return {
            "p_open": self.p_open,
            "p_open_ci": self.p_open_ci,
            "p_c_hat": self.p_c_hat,
            "p_c_ci": self.p_c_ci,
            "margin": self.margin,
            "verdict": self.verdict,
        }


def supercriticality_check(
    lam: float,
    gamma: float,
    k: int,
    p_m_ge_1: float,
    trials: int,
    n: int,
    adjacency: Adjacency,
    rng: np.random.Generator,
    threshold: Optional[ThresholdEstimate] = None,
    start_policy: str = "at_farthest_corner",
) -> SupercriticalityVerdict:
    """Compare the estimated region-openness probability to p_c."""
    openness = estimate_openness(
        RegionTrialConfig(k=k, lam=lam, gamma=gamma, start_policy=start_policy),
        trials,
        p_m_ge_1,
        rng,
    )
    if threshold is None:
        threshold = threshold_estimate(n, adjacency, max(trials // 4, 200), rng)
    margin = openness.p_open - threshold.p_hat
    if openness.p_open - openness.ci_halfwidth > threshold.p_hat + threshold.ci_halfwidth:
        verdict = "supercritical-evidence"
    elif openness.p_open + openness.ci_halfwidth < threshold.p_hat - threshold.ci_halfwidth:
        verdict = "subcritical-evidence"
    else:
        verdict = "inconclusive"
    return SupercriticalityVerdict(
        p_open=openness.p_open,
        p_open_ci=openness.ci_halfwidth,
        p_c_hat=threshold.p_hat,
        p_c_ci=threshold.ci_halfwidth,
        margin=margin,
        verdict=verdict,
        openness=openness,
        threshold=threshold,
    )
