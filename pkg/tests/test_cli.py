import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from affectsim import analysis, engine, rng as rngs
from affectsim.cli import main
from affectsim.config import load_config, load_preset, preset_path

SMALL = """
name = "tiny"
m = 32
d = 0.67
sigma = 15.7079
vartheta = 0.05
gamma_forget = 0.2
num_all = 80
seed = 3
fragments = [ { etv = 12, duration = 8 }, { etv = 20, duration = 7 } ]

[graph]
kind = "ws"
k = 4
"""


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(SMALL)
    return path


def tree(root: Path) -> dict:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            data = p.read_bytes()
            if p.name == "manifest.json":
                manifest = json.loads(data)
                manifest.pop("output_dir")
                data = json.dumps(manifest, sort_keys=True).encode()
            out[str(p.relative_to(root))] = data
    return out


def test_simulate_outputs_and_determinism(small_cfg, tmp_path):
    assert main(["simulate", str(small_cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", str(small_cfg), "--out", str(tmp_path / "b")]) == 0
    a = tree(tmp_path / "a")
    assert a == tree(tmp_path / "b")
    assert {"trace.csv", "trace.json", "bands.csv", "beta.csv", "final_etvs.csv", "graph.edgelist",
            "graph_final.dot", "graph_final.graphml", "manifest.json"} <= set(a)
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seeds"] == [3] and manifest["config_name"] == "tiny"
    assert manifest["config_hash"] == load_config(small_cfg).config_hash()


def test_simulate_seed_flag_changes_output(small_cfg, tmp_path):
    main(["simulate", str(small_cfg), "--out", str(tmp_path / "a")])
    main(["simulate", str(small_cfg), "--seed", "4", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a/trace.csv").read_bytes() != (tmp_path / "b/trace.csv").read_bytes()


def test_seed_env_override(small_cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("AFFECTSIM_SEED", "4")
    main(["simulate", str(small_cfg), "--out", str(tmp_path / "env")])
    monkeypatch.delenv("AFFECTSIM_SEED")
    main(["simulate", str(small_cfg), "--seed", "4", "--out", str(tmp_path / "flag")])
    assert (tmp_path / "env/trace.csv").read_bytes() == (tmp_path / "flag/trace.csv").read_bytes()


def test_missing_field_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(SMALL.replace("gamma_forget = 0.2\n", ""))
    assert main(["simulate", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "gamma_forget" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_file_and_bad_args(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.toml")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_preset_by_name():
    assert load_preset("table1").total_rounds == 180
    assert preset_path("election").exists()


def test_config_hash_ignores_key_order(tmp_path):
    lines = SMALL.strip().splitlines()
    head = [l for l in lines[:9] if l]
    shuffled = "\n".join(reversed(head)) + "\n" + "\n".join(lines[9:]) + "\n"
    p = tmp_path / "shuffled.toml"
    p.write_text(shuffled)
    q = tmp_path / "plain.toml"
    q.write_text(SMALL)
    assert load_config(p).config_hash() == load_config(q).config_hash()


def read_mf(path):
    with open(path) as fh:
        return [(float(r["t"]), float(r["s"]), float(r["i"])) for r in csv.DictReader(fh)]


def test_meanfield_constant_beta(small_cfg, tmp_path):
    assert main(["meanfield", str(small_cfg), "--beta", "0.4", "--gamma", "0.2", "--horizon", "180",
                 "--out", str(tmp_path)]) == 0
    rows = read_mf(tmp_path / "meanfield.csv")
    assert len(rows) == 18001
    assert abs(rows[-1][2] - 0.5) < 1e-4
    assert all(abs(s + i - 1) < 1e-9 for _, s, i in rows)


def test_meanfield_zero_beta_decays(small_cfg, tmp_path):
    main(["meanfield", str(small_cfg), "--beta", "0.0", "--gamma", "0.2", "--out", str(tmp_path)])
    i = [r[2] for r in read_mf(tmp_path / "meanfield.csv")]
    assert all(b < a for a, b in zip(i, i[1:]))


def test_meanfield_from_trace(small_cfg, tmp_path):
    main(["simulate", str(small_cfg), "--out", str(tmp_path / "sim")])
    assert main(["meanfield", str(small_cfg), "--beta", "from-trace", str(tmp_path / "sim" / "trace.csv"),
                 "--out", str(tmp_path / "mf")]) == 0
    rows = read_mf(tmp_path / "mf" / "meanfield.csv")
    assert len(rows) == round(15 / 0.01) + 1


def test_meanfield_bad_beta(small_cfg, tmp_path):
    assert main(["meanfield", str(small_cfg), "--beta", "abc", "--out", str(tmp_path)]) == 2
    assert main(["meanfield", str(small_cfg), "--beta", "from-trace", str(tmp_path / "x.csv"),
                 "--out", str(tmp_path)]) == 2


def write_etvs(path, etvs):
    analysis.write_csv(path, ["node", "etv"], enumerate(etvs))
    return str(path)


@pytest.mark.parametrize("etv, p, expected", [
    (32, 0.015, (100, 0, 0)),
    (0, 0.015, (0, 100, 0)),
    (16, 1.0, (0, 0, 100)),
    (16, 0.0, (100, 0, 0)),
])
def test_vote_examples(tmp_path, capsys, etv, p, expected):
    path = write_etvs(tmp_path / "e.csv", [etv] * 100)
    assert main(["vote", path, "--p-abstain", str(p)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert (res["votes_a"][0], res["votes_b"][0], res["abstained"][0]) == expected


def test_vote_repeats_and_errors(tmp_path, capsys):
    path = write_etvs(tmp_path / "e.csv", [15, 16] * 50)
    main(["vote", path, "--p-abstain", "0.5", "--repeats", "5", "--seed", "2"])
    res = json.loads(capsys.readouterr().out)
    assert len(res["abstained"]) == 5
    assert all(a + b + c == 100 for a, b, c in zip(res["votes_a"], res["votes_b"], res["abstained"]))
    assert main(["vote", str(tmp_path / "none.csv")]) == 2
    assert main(["vote", path, "--p-abstain", "2"]) == 2


def test_sweep_single_seed_matches_simulate(small_cfg, tmp_path):
    assert main(["sweep", str(small_cfg), "--seeds", "1", "--out", str(tmp_path / "sw")]) == 0
    cfg = load_config(small_cfg).with_seed(rngs.derive_seed(3, 0))
    expected = analysis.write_timeseries(engine.run(cfg), tmp_path / "ref.csv").read_bytes()
    assert (tmp_path / "sw/runs/run_0000.csv").read_bytes() == expected


def test_sweep_jobs_invariant(small_cfg, tmp_path):
    main(["sweep", str(small_cfg), "--seeds", "4", "--jobs", "1", "--out", str(tmp_path / "j1")])
    main(["sweep", str(small_cfg), "--seeds", "4", "--jobs", "4", "--out", str(tmp_path / "j4")])
    assert tree(tmp_path / "j1") == tree(tmp_path / "j4")


@pytest.mark.slow
def test_sweep_single_info_mean_drifts_down(tmp_path):
    main(["sweep", "single_info", "--seeds", "10", "--jobs", "4", "--out", str(tmp_path)])
    with open(tmp_path / "sweep_phi.csv") as fh:
        phi = [float(r["phi_mean"]) for r in csv.DictReader(fh)]
    assert phi[-1] < phi[0]


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "affectsim.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("affectsim")


def test_weights_modes(tmp_path):
    p = tmp_path / "lit.toml"
    p.write_text(SMALL + '\n[weights]\nmode = "literal"\n')
    assert load_config(p).weights.w_neighbor == 32.0
    p.write_text(SMALL + '\n[weights]\nmode = "literal"\ngamma = 1.0\n')
    assert main(["simulate", str(p), "--out", str(tmp_path / "o")]) == 2
    p.write_text(SMALL + '\n[weights]\nmode = "raw"\n')
    assert main(["simulate", str(p), "--out", str(tmp_path / "o")]) == 2
