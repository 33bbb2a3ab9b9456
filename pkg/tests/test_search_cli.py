import json
import os
import subprocess
import sys

import pytest

from contagion.cli import main
from contagion.search import (
    SearchConfig,
    estimate_gamma_c,
    estimate_lambda_c_inf,
    survival_trial_block,
)


FAST = dict(L=8, K=400, S=6, master_seed=7)


def test_trial_block_early_stop():
    sc = SearchConfig(**FAST)
    # very supercritical point: the first sim should survive and stop the block
    res = survival_trial_block(0.05, float("inf"), sc, block_key=(0,))
    assert res.survived and res.sims_used == 1
    # very subcritical point: uses the full budget and fails
    res = survival_trial_block(50.0, 50.0, sc, block_key=(1,))
    assert not res.survived and res.sims_used == sc.S


def test_trial_block_thread_invariant():
    for lam in (0.3, 0.9, 2.0):
        results = []
        for threads in (1, 2, 4):
            sc = SearchConfig(**FAST, threads=threads)
            results.append(survival_trial_block(lam, 1.0, sc, block_key=(5,)))
        assert results[0] == results[1] == results[2]


def test_lambda_search_walks_down():
    sc = SearchConfig(L=8, K=400, S=4, lambda_init=1.2, lambda_step=0.1, master_seed=3)
    res = estimate_lambda_c_inf(sc)
    assert res.resolved
    assert 0.0 < res.lambda_c_hat <= sc.lambda_init
    lams = [row[0] for row in res.trace]
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert res.trace[-1][1] == 1  # terminates on first survival
    assert all(row[1] == 0 for row in res.trace[:-1])
    csv = res.trace_csv()
    assert csv.splitlines()[0] == "lambda,survived,sims_used"


def test_gamma_c_degenerate_and_resolution():
    sc = SearchConfig(L=8, K=400, S=4, gamma_init=8.0, gamma_factor=0.5, gamma_floor=1e-3, master_seed=11)
    est = estimate_gamma_c([0.2, 6.0], sc)
    # lam=0.2 is deep in the supercritical phase even at gamma_init
    p_low = next(p for p in est.points if p.lam == 0.2)
    assert p_low.degenerate and p_low.resolved
    assert p_low.gamma_c_hat == sc.gamma_init
    csv = est.boundary_csv()
    assert csv.splitlines()[0] == "lambda,gamma_c_hat,resolved,trials_used"
    assert len(csv.splitlines()) == 3


# -- CLI --------------------------------------------------------------------


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "contagion.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def read_tree(root, skip=("manifest.json",)):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            if f in skip:
                continue
            p = os.path.join(dirpath, f)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_simulate_outputs_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["simulate", "--d", "2", "--L", "8", "--lam", "1.0", "--gamma", "1.0",
            "--K", "2000", "--seed", "42", "--record-trajectory"]
    assert main(args + ["--out-dir", str(a)]) == 0
    assert main(args + ["--out-dir", str(b)]) == 0
    ta, tb = read_tree(a), read_tree(b)
    assert set(ta) == {"result.json", "trajectory.csv"}
    assert ta == tb
    result = json.loads(ta["result.json"])
    assert list(result) == [
        "survived",
        "events_executed",
        "final_time",
        "extinction_time",
        "peak_infected_particles",
        "trajectory",
    ]
    assert ta["trajectory.csv"].decode().splitlines()[0] == "t,infected_particles,contaminated_sites"
    manifest = json.loads((a / "manifest.json").read_text())
    for key in ("artifact_version", "command", "argv", "config", "master_seed",
                "seed_scheme", "wall_time_s", "events_total", "outputs"):
        assert key in manifest
    assert manifest["command"] == "simulate"
    assert manifest["master_seed"] == 42


def test_sweep_thread_count_invariance(tmp_path):
    trees = []
    for threads in ("1", "3"):
        out = tmp_path / f"t{threads}"
        code = main(["sweep", "--L", "8", "--K", "400", "--S", "4", "--gamma", "inf",
                     "--lam-grid", "0.5,1.0,2.0", "--seed", "5",
                     "--threads", threads, "--out-dir", str(out)])
        assert code == 0
        trees.append(read_tree(out))
    assert trees[0] == trees[1]
    assert "lambda_search.csv" in trees[0]


def test_config_file_and_cli_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nL = 8\nK = 400\nS = 4\ngamma = inf\nlam-grid = 1.0\nseed = 5\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--config", str(cfg), "--out-dir", str(a)]) == 0
    # CLI beats file: same file, overridden grid
    assert main(["sweep", "--config", str(cfg), "--lam-grid", "2.0", "--out-dir", str(b)]) == 0
    rows_a = read_tree(a)["lambda_search.csv"].decode().splitlines()
    rows_b = read_tree(b)["lambda_search.csv"].decode().splitlines()
    assert rows_a[1].startswith("1.0,")
    assert rows_b[1].startswith("2.0,")


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("L = 8\nwibble = 3\n")
    assert main(["sweep", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2


def test_env_seed_fallback(tmp_path):
    out = tmp_path / "o"
    proc = run_cli(
        ["simulate", "--d", "1", "--L", "6", "--lam", "1.0", "--gamma", "1.0",
         "--K", "200", "--out-dir", str(out)],
        env_extra={"CONTAGION_SEED": "99"},
    )
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 99


def test_bad_parameter_exit_code(tmp_path):
    # L too small for the movement radius
    assert main(["simulate", "--d", "2", "--L", "3", "--k", "2", "--lam", "1.0",
                 "--gamma", "1.0", "--out-dir", str(tmp_path / "o")]) == 2


def test_phase_unresolved_exit_code(tmp_path):
    # lambda_init below any achievable threshold with a tiny budget and a
    # single huge step: the walk exhausts without a survival
    code = main(["phase", "--L", "8", "--K", "200", "--S", "2",
                 "--lambda-init", "80.0", "--lambda-step", "79.0",
                 "--gamma-init", "0.01", "--gamma-factor", "0.5",
                 "--gamma-floor", "0.005", "--lambda-grid", "80.0",
                 "--seed", "1", "--out-dir", str(tmp_path / "o")])
    assert code == 3


def test_couple_command(tmp_path):
    out = tmp_path / "o"
    code = main(["couple", "--kind", "gamma_pair", "--d", "2", "--L", "8",
                 "--lam0", "1.0", "--lam1", "1.0", "--gamma0", "0.5",
                 "--gamma1", "2.0", "--K", "2000", "--seed", "8",
                 "--out-dir", str(out)])
    assert code == 0
    rep = json.loads(read_tree(out)["domination_report.json"])
    assert rep["domination_held"] is True


def test_bounds_command(tmp_path):
    out = tmp_path / "o"
    code = main(["bounds", "--d", "1", "--k", "1", "--m-bar", "1",
                 "--lam", "9.0", "--gamma", "6.0",
                 "--lam-grid", "6.0,9.0,12.0", "--out-dir", str(out)])
    assert code == 0
    tree = read_tree(out)
    payload = json.loads(tree["bounds.json"])
    assert payload["offspring_bound"] == pytest.approx(7.0)
    header = tree["bounds_sweep.csv"].decode().splitlines()[0]
    assert header == "lambda,gamma,v_k,p_part_star,p_site_star,offspring_bound,subcritical"


def test_perc_command_determinism(tmp_path):
    trees = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main(["perc", "--k", "1", "--lam", "1.0", "--p-m-ge-1", "1.0",
                     "--trials", "150", "--gamma-grid", "0.5,2.0",
                     "--n", "16", "--realizations", "50",
                     "--p-grid", "0.4,0.6", "--seed", "13", "--out-dir", str(out)])
        assert code == 0
        trees.append(read_tree(out))
    assert trees[0] == trees[1]
    tree = trees[0]
    assert tree["openness_sweep.csv"].decode().splitlines()[0] == \
        "lambda,gamma,k,trials,p_tilde,ci,p_open"
    assert tree["perc_sweep.csv"].decode().splitlines()[0] == \
        "n,adjacency,p,spanning_fraction"


def test_rerun_from_manifest(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["sweep", "--L", "8", "--K", "400", "--S", "4", "--gamma", "2.0",
            "--lam-grid", "1.0,2.0", "--seed", "21"]
    assert main(args + ["--out-dir", str(a)]) == 0
    manifest = json.loads((a / "manifest.json").read_text())
    argv = [x for x in manifest["argv"]]
    argv[argv.index(str(a))] = str(b)
    assert main(argv) == 0
    assert read_tree(a) == read_tree(b)
