import csv
import io
import json
import os

import numpy as np
import pytest

from chaosnet.classifier import fit_mean_vectors, load_model
from chaosnet.cli import main
from chaosnet.datakit import load_iris, save_csv
from chaosnet.ttss import Hyperparams, extract_features


@pytest.fixture(scope="module")
def iris_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "iris.csv"
    save_csv(load_iris(), str(path))
    return path


def write_config(tmp_path, text, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def iris_config(tmp_path, iris_csv, extra=""):
    return write_config(tmp_path, f"dataset: {iris_csv}\nlabel_column: species\npreset: iris\nk: 7\nseed: 3\n{extra}")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_table(path):
    lines = open(path).read().splitlines()
    echo = [ln for ln in lines if ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(ln for ln in lines if not ln.startswith("#")))))
    return echo, rows


# -- train / predict / eval ---------------------------------------------------


def test_train_iris(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv)
    out = tmp_path / "model.json"
    code, stdout, _ = run(capsys, "train", "--config", cfg, "--out", str(out))
    assert code == 0
    summary = json.loads(stdout)
    assert summary["classes"] == 3 and summary["n_features"] == 4
    assert summary["samples_per_class"] == {"setosa": 7, "versicolor": 7, "virginica": 7}
    model = load_model(str(out))
    assert model.mean_vectors.shape == (3, 4)
    assert model.params.b == 0.9867556


def test_train_worked_example(tmp_path, capsys):
    data = tmp_path / "toy.csv"
    # class "2" pins the global extrema to 0 and 1 so the class "1" rows are left as given
    data.write_text("x1,x2,x3,x4,label\n0.2,0.5,0.1,0.9,1\n0.23,0.49,0.15,0.8,1\n0,1,0.5,0.5,2\n")
    cfg = write_config(tmp_path, f"dataset: {data}\nq: 0.23\nb: 0.56\nmap: skew_tent\nepsilon: 0.01\n")
    out = tmp_path / "toy_model.json"
    assert run(capsys, "train", "--config", cfg, "--out", str(out))[0] == 0
    rows = np.array([[0.2, 0.5, 0.1, 0.9], [0.23, 0.49, 0.15, 0.8]])
    feats = extract_features(rows, Hyperparams(0.23, 0.56, "skew_tent", 0.01))
    expected = fit_mean_vectors([feats], ["1"])[0]
    assert load_model(str(out)).mean_vectors[0].tolist() == expected.tolist()


def test_predict_and_eval(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv)
    model = tmp_path / "model.json"
    assert run(capsys, "train", "--config", cfg, "--out", str(model))[0] == 0

    preds = tmp_path / "preds.csv"
    code, stdout, _ = run(capsys, "predict", "--config", cfg, "--model", str(model), "--out", str(preds))
    assert code == 0
    echo, rows = read_table(preds)
    assert echo[0] == "# chaosnet predict"
    assert "# preset: iris" in echo
    assert len(rows) == 150
    assert set(rows[0]) == {"row", "label", "similarity_setosa", "similarity_versicolor", "similarity_virginica"}

    conf = tmp_path / "confusion.csv"
    code, stdout, _ = run(capsys, "eval", "--config", cfg, "--model", str(model), "--out", str(conf))
    assert code == 0
    result = json.loads(stdout)
    assert result["rows"] == 129
    assert 0.0 <= result["accuracy"] <= 1.0
    assert sum(map(sum, result["confusion"])) == 129
    _, rows = read_table(conf)
    assert len(rows) == 9


def test_missing_dataset_leaves_no_output(tmp_path, capsys):
    cfg = write_config(tmp_path, "dataset: nowhere.csv\npreset: iris\n")
    out = tmp_path / "model.json"
    code, stdout, err = run(capsys, "train", "--config", cfg, "--out", str(out))
    assert code != 0
    assert "not found" in err
    assert not out.exists()
    assert [p for p in os.listdir(tmp_path) if p.startswith(".chaosnet-")] == []


def test_unknown_config_key(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "epsilom: 0.02\n")
    code, _, err = run(capsys, "train", "--config", cfg, "--out", str(tmp_path / "m.json"))
    assert code == 1
    assert "epsilom" in err


def test_bad_hyperparameter(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "b: 1.5\n")
    code, _, err = run(capsys, "train", "--config", cfg, "--out", str(tmp_path / "m.json"))
    assert code == 1 and "b" in err


def test_missing_model_file(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv)
    code, _, err = run(capsys, "eval", "--config", cfg, "--model", str(tmp_path / "none.json"))
    assert code == 1 and "model file not found" in err


# -- sweep / noise ------------------------------------------------------------


def test_sweep_shape_and_reproducibility(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "k_range: [1, 7]\ntrials: 10\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--config", cfg, "--out", str(a))[0] == 0
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text()
    _, rows = read_table(a)
    assert len(rows) == 70
    assert all(0.0 <= float(r["accuracy"]) <= 1.0 for r in rows)
    assert sorted({int(r["k"]) for r in rows}) == list(range(1, 8))
    k7 = [float(r["accuracy"]) for r in rows if r["k"] == "7"]
    assert 0.90 <= np.mean(k7) <= 0.98


def test_seed_flag_overrides_config(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "k_range: [2, 2]\ntrials: 3\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--config", cfg, "--out", str(a))
    run(capsys, "sweep", "--config", cfg, "--seed", "99", "--out", str(b))
    assert read_table(a)[1] != read_table(b)[1]
    assert read_table(b)[0][0] == "# chaosnet sweep --seed 99"


def test_sweep_k_too_large(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "k_range: [1, 50]\n")
    assert run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path / "s.csv"))[0] == 1


def test_noise_zero_sigma_reports_clean_accuracy(tmp_path, iris_csv, capsys):
    cfg = iris_config(tmp_path, iris_csv, "sigmas: [0]\ntrials_per_sigma: 4\n")
    out = tmp_path / "noise.csv"
    code, stdout, _ = run(capsys, "noise", "--config", cfg, "--out", str(out))
    assert code == 0
    clean = json.loads(stdout)["clean_accuracy"]
    echo, rows = read_table(out)
    assert f"# clean_accuracy: {clean!r}" in echo
    assert len(rows) == 4
    assert all(float(r["accuracy"]) == clean and r["snr_db"] == "inf" for r in rows)


def test_noise_grid(tmp_path, iris_csv, capsys):
    grid = "sigmas: {start: 0.0001, stop: 0.0456, num: 5, spacing: log}\ntrials_per_sigma: 3\n"
    cfg = iris_config(tmp_path, iris_csv, grid)
    out = tmp_path / "noise.csv"
    assert run(capsys, "noise", "--config", cfg, "--out", str(out))[0] == 0
    _, rows = read_table(out)
    sigmas = [float(r["sigma"]) for r in rows]
    assert len(rows) == 15 and sigmas == sorted(sigmas)
    assert sigmas[0] == pytest.approx(0.0001) and sigmas[-1] == pytest.approx(0.0456)


# -- codec / uat --------------------------------------------------------------


def test_codec_round_trip(tmp_path, capsys):
    src = tmp_path / "blob.bin"
    src.write_bytes(np.random.default_rng(0).bytes(300))
    enc, dec = tmp_path / "blob.gls.json", tmp_path / "blob.out"
    assert run(capsys, "codec-encode", str(src), "--out", str(enc))[0] == 0
    assert json.loads(enc.read_text())["format"] == "chaosnet-gls-code"
    assert run(capsys, "codec-decode", str(enc), "--out", str(dec))[0] == 0
    assert dec.read_bytes() == src.read_bytes()


def test_codec_explicit_p(tmp_path, capsys):
    src = tmp_path / "text.txt"
    src.write_bytes(b"chaos")
    enc, dec = tmp_path / "t.json", tmp_path / "t.out"
    assert run(capsys, "codec-encode", str(src), "--p", "3/4", "--out", str(enc))[0] == 0
    assert json.loads(enc.read_text())["p"] == "3/4"
    assert run(capsys, "codec-decode", str(enc), "--out", str(dec))[0] == 0
    assert dec.read_bytes() == b"chaos"


def test_codec_bad_document(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"format\": \"chaosnet-gls-code\", ")
    out = tmp_path / "out.bin"
    code, _, err = run(capsys, "codec-decode", str(bad), "--out", str(out))
    assert code == 1 and "line" in err and not out.exists()


def test_uat_sine(tmp_path, capsys):
    samples = tmp_path / "sine.csv"
    samples.write_text("\n".join(repr(v) for v in np.sin(np.linspace(0, 2 * np.pi, 200)).tolist()) + "\n")
    out = tmp_path / "sine.uat.json"
    code, stdout, _ = run(capsys, "uat", str(samples), "--epsilon", "0.01", "--out", str(out))
    assert code == 0
    report = json.loads(stdout)
    assert report["max_error"] <= 0.01 and report["within_bound"]
    assert report["length"] == 200
    assert json.loads(out.read_text())["format"] == "chaosnet-uat-code"


def test_uat_requires_epsilon(tmp_path, capsys):
    samples = tmp_path / "s.csv"
    samples.write_text("0.1\n0.2\n")
    code, _, err = run(capsys, "uat", str(samples), "--out", str(tmp_path / "u.json"))
    assert code == 1 and "epsilon" in err
