import csv
import json

import numpy as np
import pandas as pd
import pytest

from autotsp.cli import main
from autotsp.traininglog import load_ledger, load_run


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--out-dir", str(d), "--seed", "1"]) == 0
    return d


def _analyze(args, tmp_path):
    out = tmp_path / "report.json"
    code = main(["analyze", *map(str, args), "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_simulate_writes_files(sim_dir, tmp_path):
    names = sorted(p.name for p in sim_dir.iterdir())
    assert names == ["epochs.csv", "ledger.csv", "trace.csv", "truth.json"]
    again = tmp_path / "again"
    assert main(["simulate", "--out-dir", str(again), "--seed", "1"]) == 0
    for n in names:
        assert (again / n).read_bytes() == (sim_dir / n).read_bytes()
    truth = json.loads((sim_dir / "truth.json").read_text())
    assert truth["seed"] == 1 and truth["config"]["D"] == 1000
    assert {"e_mem_sim", "e_sm_sim", "mota_sim"} <= truth.keys()


def test_simulate_invalid_config(tmp_path, capsys):
    code = main(["simulate", "--out-dir", str(tmp_path / "x"), "--clean-onset", "120,5"])
    assert code == 1
    assert "clean onset" in capsys.readouterr().err


def test_simulate_batch(tmp_path):
    out = tmp_path / "batch"
    assert main(["simulate", "--out-dir", str(out), "--batch", "100", "--D", "20", "--E", "25",
                 "--clean-onset", "5,2", "--noisy-onset", "15,3"]) == 0
    dirs = sorted(p for p in out.iterdir() if p.is_dir())
    assert len(dirs) == 100
    assert all(len(list(d.iterdir())) == 4 for d in dirs)
    seeds = {json.loads((d / "truth.json").read_text())["seed"] for d in dirs}
    assert seeds == set(range(1, 101))


def test_analyze_full(sim_dir, tmp_path):
    code, rep, _ = _analyze([sim_dir / "epochs.csv", "--ledger", sim_dir / "ledger.csv",
                             "--trace", sim_dir / "trace.csv", "--tau", "0.5"], tmp_path)
    a = rep["autotsp"]
    assert code == (2 if a["fallback"] else 0)
    assert rep["schema_version"] == 1
    assert a["region"]["lo"] <= a["e_tsp"] <= a["region"]["hi"]
    assert set(rep["baselines"]) == {"AUTOTSP", "MOTA", "NHA", "STANDARD"}
    assert "lp" in rep["baselines"]["MOTA"] and "lr" in rep["baselines"]["STANDARD"]
    assert rep["baselines"]["AUTOTSP"]["test_acc"] == load_run(sim_dir / "epochs.csv").test_acc[a["e_tsp"]]
    truth = json.loads((sim_dir / "truth.json").read_text())
    assert rep["memorization"]["e_mem"] == truth["e_mem_sim"]
    assert rep["memorization"]["e_sm"] == truth["e_sm_sim"]
    assert rep["baselines"]["MOTA"]["epoch"] == truth["mota_sim"]
    assert set(rep["inputs"]) == {"epochs", "ledger", "trace"}


def test_analyze_epochs_only(tmp_path):
    y = np.r_[np.linspace(5, 70, 40), 70 + np.cumsum(np.tile([0.9, -0.3, 0.2, -0.1], 15))]
    p = tmp_path / "e.csv"
    pd.DataFrame({"epoch": range(len(y)), "train_acc": y}).to_csv(p, index=False)
    code, rep, _ = _analyze([p], tmp_path)
    assert code in (0, 2)
    assert "memorization" not in rep
    assert set(rep["baselines"]) == {"AUTOTSP", "STANDARD"}
    assert "lp" not in rep["baselines"]["AUTOTSP"]
    code, rep, _ = _analyze([p, "--tau", "0.4"], tmp_path)
    nha = rep["baselines"]["NHA"]
    assert nha["found"] and nha["epoch"] == int(np.argmax(y >= 60))


def test_report_deterministic_and_sorted(sim_dir, tmp_path):
    texts = []
    for sub in ("a", "b"):
        (tmp_path / sub).mkdir()
        _, _, out = _analyze([sim_dir / "epochs.csv"], tmp_path / sub)
        texts.append(out.read_text())
    assert texts[0] == texts[1]
    doc = json.loads(texts[0])
    assert list(doc) == sorted(doc)


def test_digest_detects_drift(sim_dir, tmp_path):
    src = (sim_dir / "epochs.csv").read_text().splitlines()
    src[5] = src[5].rsplit(",", 2)[0] + ",0.5,0.5"
    p = tmp_path / "drift.csv"
    p.write_text("\n".join(src) + "\n")
    (tmp_path / "x").mkdir()
    (tmp_path / "y").mkdir()
    _, r1, _ = _analyze([sim_dir / "epochs.csv"], tmp_path / "x")
    _, r2, _ = _analyze([p], tmp_path / "y")
    assert r1["inputs"]["epochs"] != r2["inputs"]["epochs"]


def test_flags_reach_hyperparams(sim_dir, tmp_path):
    _, rep, _ = _analyze([sim_dir / "epochs.csv", "--beta", "3,4,5", "--theta1", "0.2",
                          "--theta2", "0", "--stop-rule", "last-nonzero", "--init-mode", "overwrite",
                          "--interval-mode", "dense"], tmp_path)
    hp = rep["autotsp"]["hyperparams"]
    assert hp == {"beta_set": [3, 4, 5], "theta1": 0.2, "theta2": 0.0, "stop_rule": "last_nonzero",
                  "init_mode": "overwrite", "interval_mode": "dense"}
    assert rep["autotsp"]["alternative_init_mode"]["init_mode"] == "accumulate"
    assert rep["region"]["interval_mode"] == "dense"


def test_plot_csvs(sim_dir, tmp_path):
    plots = tmp_path / "plots"
    main(["analyze", str(sim_dir / "epochs.csv"), "--ledger", str(sim_dir / "ledger.csv"),
          "--trace", str(sim_dir / "trace.csv"), "--out", str(tmp_path / "r.json"),
          "--plot-dir", str(plots)])
    names = {p.name for p in plots.iterdir()}
    assert {f"intervals_{s}_beta{b}.csv" for s in ("PROCE", "NROCE") for b in (5, 6, 7)} <= names
    with open(plots / "memorization.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["epoch", "lr_clean", "lr_noisy", "ratio", "stage"]
    assert len(rows) == 201 and {r[4] for r in rows[1:]} <= {"PM", "MM", "SM"}
    with open(plots / "intervals_PROCE_beta5.csv") as fh:
        assert next(csv.reader(fh)) == ["representative_epoch", "interval_sum", "z_score"]


def test_fallback_exit_code(tmp_path):
    p = tmp_path / "flat.csv"
    pd.DataFrame({"epoch": range(30), "train_acc": np.linspace(10, 60, 30)}).to_csv(p, index=False)
    code, rep, _ = _analyze([p], tmp_path)
    assert code == 2 and rep["autotsp"]["fallback"]


def test_error_exit_codes(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "missing.csv")]) == 1
    short = tmp_path / "short.csv"
    short.write_text("epoch,train_acc\n0,1\n1,2\n2,3\n")
    assert main(["analyze", str(short)]) == 1
    assert "at least 11" in capsys.readouterr().err


def test_analyze_json_input(tmp_path):
    y = np.linspace(5, 90, 50) + np.sin(np.arange(50))
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"records": [{"epoch": i + 1, "train_acc": float(v)} for i, v in enumerate(y)]}))
    code, rep, _ = _analyze([p, "--format", "json"], tmp_path)
    assert code in (0, 2) and rep["run"]["epoch_base"] == 1


def _ledger_csv(path, labels):
    pd.DataFrame({"sample_id": [f"s{i}" for i in range(len(labels))],
                  "observed_label": labels}).to_csv(path, index=False)


def test_corrupt_symmetric(tmp_path):
    src = tmp_path / "clean.csv"
    _ledger_csv(src, np.random.default_rng(0).integers(0, 10, 10_000))
    out = tmp_path / "noisy.csv"
    assert main(["corrupt", str(src), str(out), "--tau", "0.2", "--classes", "10", "--seed", "3"]) == 0
    led = load_ledger(out, 10)
    flipped = np.mean(led.observed != led.true)
    assert abs(flipped - 0.2) <= 0.012


def test_corrupt_tau_zero(tmp_path):
    src = tmp_path / "clean.csv"
    labels = np.random.default_rng(1).integers(0, 5, 300)
    _ledger_csv(src, labels)
    out = tmp_path / "o.csv"
    assert main(["corrupt", str(src), str(out), "--tau", "0"]) == 0
    led = load_ledger(out)
    np.testing.assert_array_equal(led.observed, labels)
    np.testing.assert_array_equal(led.true, labels)


def test_corrupt_asymmetric_binary(tmp_path):
    src = tmp_path / "clean.csv"
    labels = np.random.default_rng(2).integers(0, 2, 2000)
    _ledger_csv(src, labels)
    out = tmp_path / "o.csv"
    assert main(["corrupt", str(src), str(out), "--tau", "0.4", "--kind", "asymmetric",
                 "--classes", "2"]) == 0
    led = load_ledger(out, 2)
    flipped = led.observed != led.true
    assert flipped.any()
    np.testing.assert_array_equal(led.observed[flipped], 1 - led.true[flipped])
