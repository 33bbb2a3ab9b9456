import json
import math

import numpy as np
import pytest
import scipy.stats

from contagion.engine import (
    EngineConfig,
    EngineError,
    EventCategory,
    InitialLoadDistribution,
    World,
    run,
)
from contagion.lattice import TorusLattice

from helpers import contaminated_set, infected_set, make_world


def small_config(**kw) -> EngineConfig:
    base = dict(
        lattice=TorusLattice(1, 6),
        lam=1.0,
        gamma=1.0,
        k=1,
        max_events=1000,
        seed=0,
    )
    base.update(kw)
    return EngineConfig(**base)


def seek_event(build_world, category, max_tries=500, condition=None):
    """Re-run the same one-event experiment until the wanted event occurs."""
    for trial in range(max_tries):
        world = build_world(trial)
        record = world.step()
        if record.category is category and (condition is None or condition(record)):
            return world, record
    raise AssertionError(f"no {category} event found in {max_tries} trials")


class TestDistribution:
    def test_point_mass(self):
        d = InitialLoadDistribution.point_mass(3)
        assert d.m_bar == 3 and d.p_ge_1 == 1.0

    def test_invalid_sum(self):
        with pytest.raises(ValueError):
            InitialLoadDistribution((0, 1), (0.5, 0.6))

    def test_negative_support(self):
        with pytest.raises(ValueError):
            InitialLoadDistribution((-1,), (1.0,))


class TestInit:
    def test_one_particle_per_site(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 5), lam=1.0, gamma=1.0, max_events=10, seed=1
        )
        w = World(cfg)
        assert len(w.pos) == 25
        assert np.array_equal(w.pos, w.home)

    def test_origin_infected_and_contaminated(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 5), lam=1.0, gamma=1.0, max_events=10, seed=1
        )
        w = World(cfg)
        assert w.infected_particles == 1
        assert w.contaminated_sites == 1

    def test_gamma_inf_never_contaminates(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 5), lam=1.0, gamma=math.inf, max_events=500, seed=1
        )
        w = World(cfg)
        assert w.contaminated_sites == 0
        while not w.extinct and w.event_count < 500:
            w.advance(50)
            assert w.contaminated_sites == 0

    def test_region_too_large_rejected(self):
        with pytest.raises(Exception):
            EngineConfig(lattice=TorusLattice(2, 5), lam=1.0, gamma=1.0, k=2, max_events=1)


class TestRates:
    def test_direct_products(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 5), lam=2.0, gamma=3.0, max_events=10, seed=1
        )
        w = World(cfg)
        assert w.total_rates() == (25.0, 2.0, 3.0)

    def test_zero_infection(self):
        cfg = small_config(gamma=math.inf)
        w = make_world(cfg, homes=[0, 1, 2])
        assert w.total_rates() == (3.0, 0.0, 0.0)

    def test_gamma_inf_clearance_zero(self):
        cfg = small_config(gamma=math.inf)
        w = World(cfg)
        assert w.total_rates()[2] == 0.0


class TestJumpSemantics:
    def test_infected_arrival_infects_all(self):
        # one infected particle beside a site holding two healthy particles
        cfg = small_config()

        def build(trial):
            return make_world(
                cfg, homes=[0, 1, 1], positions=[0, 1, 1], infected=[0], rng_seed=trial
            )

        w, rec = seek_event(
            build, EventCategory.JUMP, condition=lambda r: r.actor == 0 and r.dest == 1
        )
        assert infected_set(w) == {0, 1, 2}
        assert 1 in contaminated_set(w)

    def test_healthy_jump_onto_contaminated_site(self):
        cfg = small_config()

        def build(trial):
            return make_world(
                cfg, homes=[0], positions=[0], contaminated=[1], rng_seed=trial
            )

        w, rec = seek_event(
            build, EventCategory.JUMP, condition=lambda r: r.dest == 1
        )
        assert infected_set(w) == {0}
        assert contaminated_set(w) == {1}  # site stays contaminated

    def test_healthy_jump_onto_infected_particles(self):
        cfg = small_config(gamma=math.inf)

        def build(trial):
            return make_world(
                cfg, homes=[0, 1], positions=[0, 1], infected=[1], rng_seed=trial
            )

        w, rec = seek_event(
            build, EventCategory.JUMP, condition=lambda r: r.actor == 0 and r.dest == 1
        )
        assert infected_set(w) == {0, 1}

    def test_site_only_mode_spares_residents(self):
        cfg = small_config(mode="site_only")

        def build(trial):
            return make_world(
                cfg, homes=[0, 1], positions=[0, 1], infected=[0], rng_seed=trial
            )

        w, rec = seek_event(
            build, EventCategory.JUMP, condition=lambda r: r.actor == 0 and r.dest == 1
        )
        assert infected_set(w) == {0}
        assert contaminated_set(w) == {1}

    def test_site_only_healthy_infected_by_site(self):
        cfg = small_config(mode="site_only")

        def build(trial):
            return make_world(
                cfg, homes=[0], positions=[0], contaminated=[1], rng_seed=trial
            )

        w, rec = seek_event(build, EventCategory.JUMP, condition=lambda r: r.dest == 1)
        assert infected_set(w) == {0}


class TestRecoveryClearance:
    def test_recovery_no_instant_reinfection(self):
        # recovering particle shares a contaminated site with an infected one
        cfg = small_config()

        def build(trial):
            return make_world(
                cfg,
                homes=[0, 0],
                positions=[0, 0],
                infected=[0, 1],
                contaminated=[0],
                rng_seed=trial,
            )

        w, rec = seek_event(build, EventCategory.RECOVERY)
        assert len(infected_set(w)) == 1

    def test_clearance_no_instant_recontamination(self):
        cfg = small_config()

        def build(trial):
            return make_world(
                cfg, homes=[0], positions=[0], infected=[0], contaminated=[0], rng_seed=trial
            )

        w, rec = seek_event(build, EventCategory.CLEARANCE)
        assert contaminated_set(w) == set()
        assert infected_set(w) == {0}


class TestRun:
    def test_single_event_survival_depends_on_category(self):
        # one particle, one event: survival iff the event was not its recovery
        cfg = small_config(gamma=math.inf, max_events=1, lam=3.0)
        outcomes = set()
        for trial in range(200):
            w = make_world(cfg, homes=[0], positions=[0], infected=[0], rng_seed=trial)
            rec = w.step()
            survived = w.infected_particles > 0
            assert survived == (rec.category is not EventCategory.RECOVERY)
            outcomes.add(survived)
        assert outcomes == {True, False}

    def test_site_only_gamma_inf_dies(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 6),
            lam=0.2,
            gamma=math.inf,
            mode="site_only",
            max_events=100_000,
            seed=3,
        )
        result = run(cfg)
        assert not result.survived
        assert result.extinction_time is not None

    def test_site_only_infected_count_non_increasing(self):
        cfg = small_config(gamma=math.inf, mode="site_only", lam=0.5)
        w = World(cfg)
        prev = w.infected_particles
        while not w.extinct and w.event_count < 500:
            w.step()
            assert w.infected_particles <= prev
            prev = w.infected_particles

    def test_determinism(self):
        cfg = EngineConfig(
            lattice=TorusLattice(2, 8),
            lam=0.7,
            gamma=2.0,
            max_events=20_000,
            seed=11,
            record_trajectory=True,
        )
        assert run(cfg) == run(cfg)

    def test_empty_world_guard(self):
        cfg = small_config(m_dist=InitialLoadDistribution.point_mass(0))
        w = World(cfg)
        with pytest.raises(EngineError):
            w.advance(1)


class TestSerialization:
    def test_json_field_names(self):
        cfg = small_config(record_trajectory=True, max_events=100)
        result = run(cfg)
        payload = json.loads(result.to_json())
        assert list(payload) == [
            "survived",
            "events_executed",
            "final_time",
            "extinction_time",
            "peak_infected_particles",
            "trajectory",
        ]

    def test_trajectory_csv_header(self):
        cfg = small_config(record_trajectory=True, max_events=100)
        text = run(cfg).trajectory_csv()
        assert text.splitlines()[0] == "t,infected_particles,contaminated_sites"

    def test_trajectory_requires_flag(self):
        with pytest.raises(ValueError):
            run(small_config()).trajectory_csv()


class TestInterEventTimes:
    def test_exponential_increments(self):
        # frozen-state harness: same state re-sampled, one event each time
        cfg = small_config(lam=2.0)
        total_rate = 3 + 2.0 * 2 + 1.0 * 1  # 3 jump + 2 infected + 1 site
        samples = []
        for trial in range(10_000):
            w = make_world(
                cfg,
                homes=[0, 2, 4],
                positions=[0, 2, 4],
                infected=[0, 1],
                contaminated=[0],
                rng_seed=trial,
            )
            w.step()
            samples.append(w.time)
        stat = scipy.stats.kstest(samples, "expon", args=(0, 1.0 / total_rate))
        assert stat.pvalue > 0.01
