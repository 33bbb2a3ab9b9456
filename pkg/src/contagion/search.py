"""Phase-diagram estimation protocol.

For each parameter point, up to S simulations of K events each are run
sequentially; the point counts as surviving at the first replica with an
infected particle at the K-th event. The no-contamination critical
recovery rate is estimated by walking lam downward in fixed steps until
the first surviving value; the clearance-rate boundary is then estimated
for recovery rates above that value by a downward geometric sweep in
gamma (survival is monotone in decreasing gamma, so the first surviving
gamma is a boundary proxy).

Simulations use d=2, one particle per site, region radius k=1. Replica
streams are derived as stream(master_seed, block_tag, block_index,
replica) and never reused across parameter points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .engine import EngineConfig, InitialLoadDistribution, run
from .lattice import Norm, TorusLattice
from .seeds import stream

# block tags for stream derivation
_TAG_LAMBDA_SEARCH = 0
_TAG_GAMMA_SEARCH = 1
_TAG_GENERIC = 2


@dataclass(frozen=True)
class SearchConfig:
    L: int = 30
    K: int = 100_000
    S: int = 30
    lambda_init: float = 1.5
    lambda_step: float = 0.01
    gamma_init: float = 10.0
    gamma_factor: float = 0.9
    gamma_floor: float = 1e-4
    k: int = 1
    m: int = 1
    mode: str = "standard"
    threads: int = 1
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.S < 1 or self.K < 1:
            raise ValueError(f"need S >= 1 and K >= 1, got S={self.S}, K={self.K}")
        if not self.lambda_step > 0.0:
            raise ValueError(f"lambda_step must be positive, got {self.lambda_step}")
        if not 0.0 < self.gamma_factor < 1.0:
            raise ValueError(f"gamma_factor must be in (0,1), got {self.gamma_factor}")

    def engine_config(self, lam: float, gamma: float) -> EngineConfig:
        return EngineConfig(
            lattice=TorusLattice(2, self.L),
            lam=lam,
            gamma=gamma,
            k=self.k,
            norm=Norm.L1,
            m_dist=InitialLoadDistribution.point_mass(self.m),
            mode=self.mode,
            max_events=self.K,
            seed=self.master_seed,
        )


@dataclass(frozen=True)
class TrialBlockResult:
    survived: bool
    sims_used: int
    events_total: int


def survival_trial_block(
    lam: float,
    gamma: float,
    search: SearchConfig,
    block_key: tuple[int, ...] = (_TAG_GENERIC, 0),
) -> TrialBlockResult:
    """Up to S sequential replicas; stop at the first K-event survivor.

    With threads > 1 replicas run speculatively in waves, but the
    decision consults them in replica order, so the result and sims_used
    are identical at any thread count.
    """
    config = search.engine_config(lam, gamma)

    def one(replica: int):
        return run(config, rng=stream(search.master_seed, *block_key, replica))

    events = 0
    if search.threads <= 1:
        for r in range(search.S):
            result = one(r)
            events += result.events_executed
            if result.survived:
                return TrialBlockResult(True, r + 1, events)
        return TrialBlockResult(False, search.S, events)

    with ThreadPoolExecutor(max_workers=search.threads) as pool:
        done = 0
        while done < search.S:
            wave = list(range(done, min(done + search.threads, search.S)))
            results = list(pool.map(one, wave))
            for offset, result in enumerate(results):
                events += result.events_executed
                if result.survived:
                    return TrialBlockResult(True, wave[offset] + 1, events)
            done = wave[-1] + 1
    return TrialBlockResult(False, search.S, events)


@dataclass(frozen=True)
class LambdaSearchResult:
    lambda_c_hat: Optional[float]  # None: no survival down to lambda_step
    trace: list[tuple[float, bool, int]]  # (lam, survived, sims_used)
    events_total: int

    @property
    def resolved(self) -> bool:
        return self.lambda_c_hat is not None

    def trace_csv(self) -> str:
        lines = ["lambda,survived,sims_used"]
        for lam, survived, sims in self.trace:
            lines.append(f"{lam!r},{str(survived).lower()},{sims}")
        return "\n".join(lines) + "\n"


def estimate_lambda_c_inf(search: SearchConfig) -> LambdaSearchResult:
    """Walk lam downward (gamma = inf) to the first surviving value."""
    if search.lambda_init <= search.lambda_step:
        raise ValueError("lambda_init must exceed lambda_step")
    trace: list[tuple[float, bool, int]] = []
    events = 0
    step_idx = 0
    lam = search.lambda_init
    while lam > search.lambda_step / 2.0:
        block = survival_trial_block(
            lam, math.inf, search, block_key=(_TAG_LAMBDA_SEARCH, step_idx)
        )
        events += block.events_total
        trace.append((lam, block.survived, block.sims_used))
        if block.survived:
            return LambdaSearchResult(lam, trace, events)
        step_idx += 1
        lam = search.lambda_init - step_idx * search.lambda_step
    return LambdaSearchResult(None, trace, events)


@dataclass(frozen=True)
class GammaPoint:
    lam: float
    gamma_c_hat: Optional[float]
    resolved: bool
    degenerate: bool  # survived already at gamma_init (lam below lambda_c_inf)
    trials_used: int


@dataclass(frozen=True)
class PhaseBoundaryEstimate:
    lambda_c_inf_hat: Optional[float]
    points: list[GammaPoint]
    search: SearchConfig
    events_total: int

    def boundary_csv(self) -> str:
        lines = ["lambda,gamma_c_hat,resolved,trials_used"]
        for pt in self.points:
            g = "" if pt.gamma_c_hat is None else repr(pt.gamma_c_hat)
            lines.append(f"{pt.lam!r},{g},{str(pt.resolved).lower()},{pt.trials_used}")
        return "\n".join(lines) + "\n"


def estimate_gamma_c(
    lambda_grid: list[float],
    search: SearchConfig,
    lambda_c_inf_hat: Optional[float] = None,
) -> PhaseBoundaryEstimate:
    """Downward geometric gamma sweep per recovery rate in the grid."""
    points: list[GammaPoint] = []
    events = 0
    for i, lam in enumerate(lambda_grid):
        gamma = search.gamma_init
        step_idx = 0
        sims = 0
        point: Optional[GammaPoint] = None
        while gamma >= search.gamma_floor:
            block = survival_trial_block(
                lam, gamma, search, block_key=(_TAG_GAMMA_SEARCH, i, step_idx)
            )
            events += block.events_total
            sims += block.sims_used
            if block.survived:
                point = GammaPoint(
                    lam=lam,
                    gamma_c_hat=gamma,
                    resolved=True,
                    degenerate=step_idx == 0,
                    trials_used=sims,
                )
                break
            step_idx += 1
            gamma = search.gamma_init * search.gamma_factor**step_idx
        if point is None:
            point = GammaPoint(lam, None, False, False, sims)
        points.append(point)
    return PhaseBoundaryEstimate(
        lambda_c_inf_hat=lambda_c_inf_hat,
        points=points,
        search=search,
        events_total=events,
    )
