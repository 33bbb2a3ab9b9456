"""Test helpers: forcing arbitrary engine states for semantics tests."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from contagion.engine import EngineConfig, World


def make_world(
    config: EngineConfig,
    homes: Sequence[int],
    positions: Optional[Sequence[int]] = None,
    infected: Iterable[int] = (),
    contaminated: Iterable[int] = (),
    rng_seed: int = 0,
) -> World:
    """Build a World and overwrite its state with an explicit configuration.

    homes/positions are flat site indices; infected lists particle ids,
    contaminated lists site indices. All bookkeeping structures are
    rebuilt consistently.
    """
    world = World(config)
    n_sites = config.lattice.total_sites
    n_p = len(homes)
    world.home = np.asarray(homes, dtype=np.int64)
    world.pos = (
        np.asarray(positions, dtype=np.int64) if positions is not None else world.home.copy()
    )
    world.initial_particles = n_p
    world.infected = np.zeros(n_p, dtype=np.uint8)
    world.contaminated = np.zeros(n_sites, dtype=np.uint8)
    world.inf_list = np.zeros(max(n_p, 1), dtype=np.int64)
    world.inf_slot = np.full(max(n_p, 1), -1, dtype=np.int64)
    world.cont_list = np.zeros(n_sites, dtype=np.int64)
    world.cont_slot = np.full(n_sites, -1, dtype=np.int64)
    world.inf_occ = np.zeros(n_sites, dtype=np.int64)
    world.counts = np.zeros(5, dtype=np.int64)
    world.tstate = np.array([0.0, -1.0])
    world.occ_head = np.full(n_sites, -1, dtype=np.int64)
    world.occ_next = np.full(max(n_p, 1), -1, dtype=np.int64)
    world.occ_prev = np.full(max(n_p, 1), -1, dtype=np.int64)
    for p in range(n_p):
        s = world.pos[p]
        head = world.occ_head[s]
        world.occ_next[p] = head
        if head != -1:
            world.occ_prev[head] = p
        world.occ_head[s] = p
        world.occ_prev[p] = -1
    for p in infected:
        world.infected[p] = 1
        world.inf_list[world.counts[0]] = p
        world.inf_slot[p] = world.counts[0]
        world.counts[0] += 1
        world.inf_occ[world.pos[p]] += 1
    for s in contaminated:
        world.contaminated[s] = 1
        world.cont_list[world.counts[1]] = s
        world.cont_slot[s] = world.counts[1]
        world.counts[1] += 1
    world.counts[3] = world.counts[0]
    world.rng = np.random.default_rng(rng_seed)
    return world


def infected_set(world: World) -> set[int]:
    return set(np.nonzero(world.infected)[0].tolist())


def contaminated_set(world: World) -> set[int]:
    return set(np.nonzero(world.contaminated)[0].tolist())
