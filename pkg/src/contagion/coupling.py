"""Shared-randomness couplings of epidemic pairs and domination checks.

Two processes differing only in the clearance rate (gamma pair) or only
in the recovery rate (lambda pair) are driven by one proposal stream:
jumps and destinations are shared, recovery proposals tick at the larger
recovery rate (applied to the smaller-rate process only when a retention
coin with probability lam0/lam1 succeeds) and clearance proposals tick
at the larger clearance rate (retention probability gamma0/gamma1). The
faster-recovering/faster-clearing process ("lax") then has its infected
and contaminated sets contained in those of the "strict" process after
every event, which the executor asserts exactly.

Retention with probability rate0/rate1 realizes a rate-rate0 Poisson
process by thinning the rate-rate1 one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import EngineConfig, InitialLoadDistribution, run
from .lattice import Norm, RegionSpec, TorusLattice, accessible_moves, check_region_fits
from .seeds import stream


@dataclass(frozen=True)
class CoupledConfig:
    lattice: TorusLattice
    pair_kind: str  # "gamma_pair" | "lambda_pair"
    lam0: float
    lam1: float
    gamma0: float
    gamma1: float
    k: int = 1
    norm: Norm = Norm.L1
    m_dist: InitialLoadDistribution = field(
        default_factory=lambda: InitialLoadDistribution.point_mass(1)
    )
    mode: str = "standard"
    max_events: int = 10_000
    shared_seed: int = 0
    infect_origin_site: bool = True
    full_check_interval: int = 1  # full subset audit every this many events

    def __post_init__(self) -> None:
        check_region_fits(self.lattice, self.k)
        if self.pair_kind == "gamma_pair":
            if not (0.0 < self.gamma0 <= self.gamma1 < math.inf):
                raise ValueError(f"need 0 < gamma0 <= gamma1 < inf, got {self.gamma0}, {self.gamma1}")
            if self.lam0 != self.lam1:
                raise ValueError("gamma_pair shares a single lam: set lam0 == lam1")
        elif self.pair_kind == "lambda_pair":
            if not (0.0 < self.lam0 <= self.lam1 < math.inf):
                raise ValueError(f"need 0 < lam0 <= lam1 < inf, got {self.lam0}, {self.lam1}")
            if self.gamma0 != self.gamma1:
                raise ValueError("lambda_pair shares a single gamma: set gamma0 == gamma1")
        else:
            raise ValueError(f"unknown pair kind {self.pair_kind!r}")

    @classmethod
    def gamma_pair(cls, lattice, lam, gamma0, gamma1, **kw) -> "CoupledConfig":
        return cls(lattice, "gamma_pair", lam, lam, gamma0, gamma1, **kw)

    @classmethod
    def lambda_pair(cls, lattice, lam0, lam1, gamma, **kw) -> "CoupledConfig":
        return cls(lattice, "lambda_pair", lam0, lam1, gamma, gamma, **kw)

    @property
    def identical_pair(self) -> bool:
        return self.lam0 == self.lam1 and self.gamma0 == self.gamma1


@dataclass(frozen=True)
class DominationReport:
    events_checked: int
    domination_held: bool
    first_violation: Optional[int]
    survived_strict: bool
    survived_lax: bool
    extinction_time_strict: Optional[float]
    extinction_time_lax: Optional[float]
    twin_identical: Optional[bool]  # tracked only for identical pair parameters

    def to_json_dict(self) -> dict:
        return {
            "events_checked": self.events_checked,
            "domination_held": self.domination_held,
            "first_violation": self.first_violation,
            "survived_strict": self.survived_strict,
            "survived_lax": self.survived_lax,
            "extinction_time_strict": self.extinction_time_strict,
            "extinction_time_lax": self.extinction_time_lax,
            "twin_identical": self.twin_identical,
        }


class _MarkState:
    """Infection marks of one process over the shared particle motion."""

    def __init__(self, gamma_finite: bool):
        self.infected: set[int] = set()
        self.contaminated: set[int] = set()
        self.gamma_finite = gamma_finite
        self.extinction_time: Optional[float] = None

    @property
    def extinct(self) -> bool:
        return not self.infected and not self.contaminated

    def note_time(self, t: float) -> None:
        if self.extinct and self.extinction_time is None:
            self.extinction_time = t


def coupled_run(config: CoupledConfig, rng: Optional[np.random.Generator] = None) -> DominationReport:
    """Drive both processes from one event stream; assert domination.

    A violated inclusion is recorded in the report, not raised.
    """
    if rng is None:
        rng = stream(config.shared_seed)
    lat = config.lattice
    gamma_pair = config.pair_kind == "gamma_pair"
    # proposal rates: the larger of each pair
    prop_lam = config.lam1
    prop_gamma = config.gamma1 if gamma_pair else config.gamma0
    gamma_finite = math.isfinite(prop_gamma)
    retain = (config.gamma0 / config.gamma1) if gamma_pair else (config.lam0 / config.lam1)

    # shared geometry and motion
    n_sites = lat.total_sites
    site_of = {i: lat.site_coords(i) for i in range(n_sites)}
    loads = config.m_dist.sample(rng, n_sites)
    homes: list[int] = []
    for s in range(n_sites):
        homes.extend([s] * int(loads[s]))
    n_p = len(homes)
    pos = list(homes)
    occupants: list[set[int]] = [set() for _ in range(n_sites)]
    for p, s in enumerate(pos):
        occupants[s].add(p)
    regions = [RegionSpec(site_of[h], config.k, config.norm) for h in homes]
    site_only = config.mode == "site_only"

    strict = _MarkState(gamma_finite)
    lax = _MarkState(gamma_finite)
    origin = 0
    for p in [q for q, h in enumerate(homes) if h == origin]:
        strict.infected.add(p)
        lax.infected.add(p)
    if gamma_finite and config.infect_origin_site:
        strict.contaminated.add(origin)
        lax.contaminated.add(origin)

    def apply_jump(world: _MarkState, p: int, dest: int) -> None:
        if p in world.infected:
            if world.gamma_finite:
                world.contaminated.add(dest)
            if not site_only:
                for q in occupants[dest]:
                    if q != p:
                        world.infected.add(q)
        else:
            hit = dest in world.contaminated
            if not hit and not site_only:
                hit = any(q in world.infected for q in occupants[dest] if q != p)
            if hit:
                world.infected.add(p)

    total_rate = n_p + prop_lam * n_p + (prop_gamma * n_sites if gamma_finite else 0.0)
    jump_w = float(n_p)
    rec_w = prop_lam * n_p

    t = 0.0
    events = 0
    first_violation: Optional[int] = None
    twin_identical: Optional[bool] = True if config.identical_pair else None
    check_every = max(1, config.full_check_interval)

    while events < config.max_events and not (strict.extinct and lax.extinct):
        t += rng.exponential(1.0 / total_rate)
        u = rng.random() * total_rate
        if u < jump_w:
            p = int(rng.integers(0, n_p))
            src = pos[p]
            moves = sorted(accessible_moves(site_of[src], regions[p], lat))
            dest = lat.site_index(moves[int(rng.integers(0, len(moves)))])
            occupants[src].discard(p)
            pos[p] = dest
            # infection rules consult each process before occupancy merge:
            # the jumper is not yet counted at dest
            apply_jump(strict, p, dest)
            apply_jump(lax, p, dest)
            occupants[dest].add(p)
        elif u < jump_w + rec_w:
            p = int(rng.integers(0, n_p))
            coin = rng.random()  # always drawn: keeps twin streams aligned
            lax.infected.discard(p)
            if gamma_pair or coin < retain:
                strict.infected.discard(p)
        else:
            s = int(rng.integers(0, n_sites))
            coin = rng.random()
            lax.contaminated.discard(s)
            if (not gamma_pair) or coin < retain:
                strict.contaminated.discard(s)
        events += 1
        strict.note_time(t)
        lax.note_time(t)
        if events % check_every == 0 or events == config.max_events:
            held = lax.infected <= strict.infected and lax.contaminated <= strict.contaminated
            if not held and first_violation is None:
                first_violation = events
            if twin_identical:
                twin_identical = (
                    lax.infected == strict.infected
                    and lax.contaminated == strict.contaminated
                )

    return DominationReport(
        events_checked=events,
        domination_held=first_violation is None,
        first_violation=first_violation,
        survived_strict=bool(strict.infected),
        survived_lax=bool(lax.infected),
        extinction_time_strict=strict.extinction_time,
        extinction_time_lax=lax.extinction_time,
        twin_identical=twin_identical,
    )


def survival_curve(
    config: EngineConfig, time_grid: list[float], replicas: int
) -> list[tuple[float, float]]:
    """Fraction of replicas with infection still present at each grid time.

    Per-replica presence is non-increasing in t (absorption), so the
    empirical curve is exactly non-increasing. A replica that reaches the
    event horizon with infection present counts as present at all later
    grid times (finite-horizon surrogate).
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    ext_times: list[Optional[float]] = []
    for r in range(replicas):
        result = run(config, rng=stream(config.seed, r))
        ext_times.append(result.extinction_time)
    curve = []
    for t in time_grid:
        present = sum(1 for e in ext_times if e is None or e > t)
        curve.append((float(t), present / replicas))
    return curve


def survival_curve_csv(curve: list[tuple[float, float]]) -> str:
    lines = ["t,survival_fraction"]
    for t, f in curve:
        lines.append(f"{t!r},{f!r}")
    return "\n".join(lines) + "\n"
