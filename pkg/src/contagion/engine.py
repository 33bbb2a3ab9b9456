"""Event-driven continuous-time simulation of the spatial SIS epidemic.

Particles live on a finite torus, each confined to a ball of radius k
around its home site, jumping at rate 1 to a uniform admissible neighbor.
Infection travels only on jumps: an infected arrival contaminates the
destination site (when clearance is finite) and, in standard mode,
infects every particle there; a healthy arrival picks up infection from a
contaminated site or (standard mode) from infected occupants. Infected
particles recover at rate lam, contaminated sites clear at rate gamma.
gamma = inf disables site contamination structurally. A recovering
particle is not immediately re-infected by its location, and a cleared
site is not immediately re-contaminated by its occupants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .lattice import Norm, TorusLattice, check_region_fits
from .seeds import stream


class EngineError(RuntimeError):
    """Engine state corruption detected by an audit."""


class EventCategory(Enum):
    JUMP = _kernels.CAT_JUMP
    RECOVERY = _kernels.CAT_RECOVERY
    CLEARANCE = _kernels.CAT_CLEARANCE


@dataclass(frozen=True)
class InitialLoadDistribution:
    """Finite pmf for the i.i.d. initial particle count per site."""

    values: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("pmf needs matching, non-empty values/probs")
        if any(v < 0 or v != int(v) for v in self.values):
            raise ValueError(f"support must be non-negative integers: {self.values}")
        if any(p < 0.0 or p > 1.0 for p in self.probs):
            raise ValueError(f"probabilities outside [0,1]: {self.probs}")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    @classmethod
    def point_mass(cls, m: int) -> "InitialLoadDistribution":
        return cls((m,), (1.0,))

    @classmethod
    def bernoulli(cls, p: float, m: int = 1) -> "InitialLoadDistribution":
        return cls((0, m), (1.0 - p, p))

    @property
    def m_bar(self) -> int:
        return max(v for v, p in zip(self.values, self.probs) if p > 0.0)

    @property
    def p_ge_1(self) -> float:
        return sum(p for v, p in zip(self.values, self.probs) if v >= 1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(np.asarray(self.values, dtype=np.int64), size=size, p=self.probs)


@dataclass(frozen=True)
class EngineConfig:
    lattice: TorusLattice
    lam: float
    gamma: float  # math.inf => no site contamination
    k: int = 1
    norm: Norm = Norm.L1
    m_dist: InitialLoadDistribution = field(
        default_factory=lambda: InitialLoadDistribution.point_mass(1)
    )
    mode: str = "standard"  # or "site_only"
    max_events: int = 100_000
    seed: int = 0
    record_trajectory: bool = False
    trajectory_points: int = 4096
    count_sites_as_survival: bool = False
    infect_origin_site: bool = True

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive (or inf), got {self.gamma}")
        if self.max_events < 1:
            raise ValueError(f"max_events must be >= 1, got {self.max_events}")
        if self.mode not in ("standard", "site_only"):
            raise ValueError(f"unknown mode {self.mode!r}")
        check_region_fits(self.lattice, self.k)

    @property
    def gamma_finite(self) -> bool:
        return math.isfinite(self.gamma)


@dataclass(frozen=True)
class EventRecord:
    category: EventCategory
    time: float
    actor: int  # particle id for JUMP/RECOVERY, -1 for CLEARANCE
    site: int  # source site (JUMP), particle location (RECOVERY), site (CLEARANCE)
    dest: int  # destination site for JUMP, -1 otherwise


@dataclass(frozen=True)
class RunResult:
    survived: bool
    events_executed: int
    final_time: float
    extinction_time: Optional[float]
    peak_infected_particles: int
    trajectory: Optional[list[tuple[float, int, int]]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "survived": self.survived,
                "events_executed": self.events_executed,
                "final_time": self.final_time,
                "extinction_time": self.extinction_time,
                "peak_infected_particles": self.peak_infected_particles,
                "trajectory": (
                    None
                    if self.trajectory is None
                    else [[t, i, c] for t, i, c in self.trajectory]
                ),
            }
        )

    def trajectory_csv(self) -> str:
        if self.trajectory is None:
            raise ValueError("run was not configured to record a trajectory")
        lines = ["t,infected_particles,contaminated_sites"]
        for t, i, c in self.trajectory:
            lines.append(f"{t!r},{i},{c}")
        return "\n".join(lines) + "\n"


class World:
    """Mutable simulation state; single-threaded owner per instance."""

    def __init__(self, config: EngineConfig, rng: Optional[np.random.Generator] = None):
        self.config = config
        lat = config.lattice
        self.rng = rng if rng is not None else stream(config.seed)
        n_sites = lat.total_sites

        loads = config.m_dist.sample(self.rng, n_sites)
        n_p = int(loads.sum())
        self.home = np.repeat(np.arange(n_sites, dtype=np.int64), loads)
        self.pos = self.home.copy()
        self.initial_particles = n_p

        self.infected = np.zeros(n_p, dtype=np.uint8)
        self.contaminated = np.zeros(n_sites, dtype=np.uint8)
        self.inf_list = np.zeros(max(n_p, 1), dtype=np.int64)
        self.inf_slot = np.full(max(n_p, 1), -1, dtype=np.int64)
        self.cont_list = np.zeros(n_sites, dtype=np.int64)
        self.cont_slot = np.full(n_sites, -1, dtype=np.int64)
        self.inf_occ = np.zeros(n_sites, dtype=np.int64)
        self.counts = np.zeros(5, dtype=np.int64)
        self.tstate = np.array([0.0, -1.0])
        self.places = np.array(
            [lat.L ** (lat.d - 1 - i) for i in range(lat.d)], dtype=np.int64
        )
        self._moves_scratch = np.zeros(2 * lat.d, dtype=np.int64)
        self._last_event = np.full(4, -1, dtype=np.int64)

        # occupant linked lists
        self.occ_head = np.full(n_sites, -1, dtype=np.int64)
        self.occ_next = np.full(max(n_p, 1), -1, dtype=np.int64)
        self.occ_prev = np.full(max(n_p, 1), -1, dtype=np.int64)
        for p in range(n_p):
            s = self.pos[p]
            head = self.occ_head[s]
            self.occ_next[p] = head
            if head != -1:
                self.occ_prev[head] = p
            self.occ_head[s] = p
            self.occ_prev[p] = -1

        # the origin and all its particles are infected
        origin = 0
        for p in np.nonzero(self.home == origin)[0]:
            self._infect(int(p))
        if config.gamma_finite and config.infect_origin_site:
            self.contaminated[origin] = 1
            self.cont_list[0] = origin
            self.cont_slot[origin] = 0
            self.counts[1] = 1
        self.counts[3] = self.counts[0]

        if config.record_trajectory:
            cap = config.trajectory_points
            self.rec_every = max(1, config.max_events // cap)
            self.traj_t = np.zeros(cap + 2, dtype=np.float64)
            self.traj_inf = np.zeros(cap + 2, dtype=np.int64)
            self.traj_cont = np.zeros(cap + 2, dtype=np.int64)
        else:
            self.rec_every = 0
            self.traj_t = np.zeros(1, dtype=np.float64)
            self.traj_inf = np.zeros(1, dtype=np.int64)
            self.traj_cont = np.zeros(1, dtype=np.int64)

    def _infect(self, p: int) -> None:
        if not self.infected[p]:
            self.infected[p] = 1
            self.inf_list[self.counts[0]] = p
            self.inf_slot[p] = self.counts[0]
            self.counts[0] += 1
            self.inf_occ[self.pos[p]] += 1

    # -- observables ----------------------------------------------------
    @property
    def time(self) -> float:
        return float(self.tstate[0])

    @property
    def event_count(self) -> int:
        return int(self.counts[2])

    @property
    def infected_particles(self) -> int:
        return int(self.counts[0])

    @property
    def contaminated_sites(self) -> int:
        return int(self.counts[1])

    @property
    def extinct(self) -> bool:
        return self.counts[0] == 0 and self.counts[1] == 0

    def total_rates(self) -> tuple[float, float, float]:
        """(jump, recovery, clearance) aggregate rates; clearance 0 for gamma=inf."""
        clr = self.config.gamma * self.counts[1] if self.config.gamma_finite else 0.0
        return (float(len(self.pos)), self.config.lam * float(self.counts[0]), clr)

    # -- dynamics -------------------------------------------------------
    def advance(self, n_events: int) -> int:
        """Run up to n_events events; returns kernel status."""
        if len(self.pos) == 0:
            raise EngineError("cannot step a world with no particles")
        cfg = self.config
        lat = cfg.lattice
        return _kernels.advance(
            n_events,
            self.pos,
            self.home,
            self.infected,
            self.inf_list,
            self.inf_slot,
            self.contaminated,
            self.cont_list,
            self.cont_slot,
            self.occ_head,
            self.occ_next,
            self.occ_prev,
            self.inf_occ,
            self.counts,
            self.tstate,
            self.places,
            self._moves_scratch,
            self._last_event,
            self.traj_t,
            self.traj_inf,
            self.traj_cont,
            self.rec_every,
            lat.L,
            lat.d,
            cfg.k,
            _kernels.NORM_LINF if cfg.norm is Norm.LINF else _kernels.NORM_L1,
            cfg.lam,
            cfg.gamma if cfg.gamma_finite else 0.0,
            cfg.gamma_finite,
            cfg.mode == "site_only",
            self.rng,
        )

    def step(self) -> EventRecord:
        """Execute exactly one event and describe it."""
        if self.extinct:
            raise EngineError("cannot step an extinct world (absorbing state)")
        self.advance(1)
        cat, actor, site, dest = (int(v) for v in self._last_event)
        return EventRecord(EventCategory(cat), self.time, actor, site, dest)

    # -- audit ----------------------------------------------------------
    def audit(self) -> None:
        """Full consistency check; raises EngineError on any violation."""
        cfg = self.config
        lat = cfg.lattice
        n_p = len(self.pos)
        if n_p != self.initial_particles:
            raise EngineError("particle conservation violated")
        # range restriction
        norm_code = 1 if cfg.norm is Norm.LINF else 0
        a = (self.pos[:, None] // self.places[None, :]) % lat.L
        b = (self.home[:, None] // self.places[None, :]) % lat.L
        delta = np.abs(a - b)
        delta = np.minimum(delta, lat.L - delta)
        dist = delta.max(axis=1) if norm_code else delta.sum(axis=1)
        if n_p and int(dist.max()) > cfg.k:
            raise EngineError("particle escaped its accessible region")
        # index sets mirror flags
        n_inf = int(self.counts[0])
        if n_inf != int(self.infected.sum()):
            raise EngineError("infected count out of sync with flags")
        if sorted(self.inf_list[:n_inf]) != sorted(np.nonzero(self.infected)[0]):
            raise EngineError("infected index set out of sync with flags")
        n_cont = int(self.counts[1])
        if n_cont != int(self.contaminated.sum()):
            raise EngineError("contaminated count out of sync with flags")
        if sorted(self.cont_list[:n_cont]) != sorted(np.nonzero(self.contaminated)[0]):
            raise EngineError("contaminated index set out of sync with flags")
        if not cfg.gamma_finite and n_cont != 0:
            raise EngineError("contamination present in gamma=inf mode")
        # occupancy coherence: linked lists vs positions, inf_occ vs flags
        occ = np.bincount(self.pos, minlength=lat.total_sites)
        seen = 0
        for s in range(lat.total_sites):
            q = self.occ_head[s]
            cnt = 0
            while q != -1:
                if self.pos[q] != s:
                    raise EngineError("occupant list holds a particle located elsewhere")
                cnt += 1
                seen += 1
                q = self.occ_next[q]
                if cnt > n_p:
                    raise EngineError("occupant list cycle detected")
            if cnt != occ[s]:
                raise EngineError("occupant list length mismatch")
        if seen != n_p:
            raise EngineError("occupant lists do not partition the particles")
        inf_occ_ref = np.bincount(
            self.pos[self.infected.astype(bool)], minlength=lat.total_sites
        )
        if not np.array_equal(inf_occ_ref, self.inf_occ):
            raise EngineError("per-site infected-occupant counts out of sync")


def run(config: EngineConfig, rng: Optional[np.random.Generator] = None) -> RunResult:
    """Simulate up to max_events events; deterministic in (config, seed).

    Pass `rng` to use an externally derived stream (replica orchestration);
    otherwise the stream is derived from config.seed.
    """
    world = World(config, rng=rng)
    if config.record_trajectory:
        world.traj_t[0] = 0.0
        world.traj_inf[0] = world.infected_particles
        world.traj_cont[0] = world.contaminated_sites
        world.counts[4] = 1
    remaining = config.max_events - world.event_count
    if not world.extinct and len(world.pos) > 0:
        world.advance(remaining)
    present = world.infected_particles > 0 or (
        config.count_sites_as_survival and world.contaminated_sites > 0
    )
    survived = (not world.extinct) and present and world.event_count >= config.max_events
    ext_t = float(world.tstate[1]) if world.tstate[1] >= 0.0 else None
    if world.extinct and ext_t is None:
        ext_t = 0.0  # extinct at init (e.g. empty origin, no contamination)
    traj = None
    if config.record_trajectory:
        n = int(world.counts[4])
        traj = [
            (float(world.traj_t[i]), int(world.traj_inf[i]), int(world.traj_cont[i]))
            for i in range(n)
        ]
    return RunResult(
        survived=survived,
        events_executed=world.event_count,
        final_time=world.time,
        extinction_time=ext_t,
        peak_infected_particles=int(world.counts[3]),
        trajectory=traj,
    )
