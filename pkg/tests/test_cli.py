import io
import json

import numpy as np
import pytest

from askls.cli import (EXIT_CONFIG, EXIT_DATA, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, main,
                       read_config_file)
from askls.data import write_csv
from askls.kernels import PrecomputedMatrix, save_matrix_csv
from askls.synthetic import blobs, direction_graph


def run(*argv):
    buf = io.StringIO()
    code = main(list(map(str, argv)), out=buf)
    return code, buf.getvalue()


@pytest.fixture
def separable(tmp_path):
    p = tmp_path / "sep.csv"
    write_csv(p, blobs(15, centers=((0, 0), (6, 0)), scale=0.4, seed=0))
    return p


@pytest.fixture
def three_class(tmp_path):
    p = tmp_path / "three.csv"
    write_csv(p, blobs(12, centers=((0, 0), (4, 0), (0, 4)), scale=1.0, seed=1))
    return p


def write_graph(tmp_path, graph, labels, name="g"):
    edges = tmp_path / f"{name}.txt"
    edges.write_text(f"#nodes {graph.node_count}\n"
                     + "".join(f"{s} {d}\n" for s, d in graph.edges))
    lab = tmp_path / f"{name}_labels.csv"
    lab.write_text("id,label\n" + "".join(f"{i},{v}\n" for i, v in enumerate(labels)))
    return edges, lab


def test_train_then_predict(tmp_path, three_class, capsys):
    model = tmp_path / "m.json"
    code, text = run("train", "--data", three_class, "--kernel", "sne", "--sigma", "1.0",
                     "--gamma", "5", "--out", model)
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["gamma"] == 5.0 and report["residual"] <= 1e-10
    assert report["kernel"]["family"] == "sne" and report["config"]["seed"] == 0
    pred_path = tmp_path / "pred.csv"
    code, _ = run("predict", "--model-file", model, "--data", three_class, "--out", pred_path)
    assert code == EXIT_OK
    lines = pred_path.read_text().splitlines()
    assert lines[0] == "id,prediction" and len(lines) == 37
    assert "accuracy" in capsys.readouterr().err


def test_same_config_gives_identical_model_file(tmp_path, separable):
    # the embedded config records the output path, so write the same path twice
    path, contents = tmp_path / "m.json", []
    for _ in range(2):
        assert run("train", "--data", separable, "--kernel", "t", "--out", path)[0] == EXIT_OK
        contents.append(path.read_bytes())
    assert contents[0] == contents[1]


def test_train_with_cv_grid(tmp_path, separable):
    code, text = run("train", "--data", separable, "--gamma", "0.1,1", "--sigma", "0.5,2",
                     "--folds", "3", "--out", tmp_path / "m.json")
    assert code == EXIT_OK
    assert json.loads(text)["cv_score"] == 1.0


def test_grid_without_folds_is_config_error(separable, capsys):
    code, _ = run("train", "--data", separable, "--gamma", "0.1,1")
    assert code == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("askls: error[config]: ")


def test_missing_file_is_io_error(tmp_path, capsys):
    code, _ = run("train", "--data", tmp_path / "nope.csv")
    assert code == EXIT_IO
    err = capsys.readouterr().err
    assert err.startswith("askls: error[io]: ") and err.count("\n") == 1


def test_bad_data_is_data_error(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("x,label\n1,0\noops,1\n")
    assert run("train", "--data", p)[0] == EXIT_DATA
    assert ":3:" in capsys.readouterr().err


def test_singular_system_is_numerical_error(tmp_path, capsys):
    ids = ["a", "b"]
    save_matrix_csv(tmp_path / "k.csv", PrecomputedMatrix(ids, np.eye(2)))
    (tmp_path / "l.csv").write_text("id,label\na,1\nb,-1\n")
    code, _ = run("train", "--kernel", "precomputed", "--data", tmp_path / "k.csv",
                  "--labels", tmp_path / "l.csv", "--gamma", "1", "--out", tmp_path / "m.json")
    assert code == EXIT_NUMERICAL
    assert capsys.readouterr().err.startswith("askls: error[numerical]: ")


def test_invalid_choice_and_trials(separable):
    assert run("eval", "--data", separable, "--kernel", "poly")[0] == EXIT_CONFIG
    assert run("eval", "--data", separable, "--trials", "0")[0] == EXIT_CONFIG
    assert run("eval", "--data", separable, "--gamma", "-1")[0] == EXIT_CONFIG


def test_config_file_precedence(tmp_path, separable):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# settings\ndata = {separable}\nkernel = sne\ngamma = 3\nseed = 4\n")
    code, text = run("train", "--config", cfg, "--gamma", "7", "--out", tmp_path / "m.json")
    assert code == EXIT_OK
    conf = json.loads(text)["config"]
    assert conf["kernel"] == "sne" and conf["gamma"] == [7.0] and conf["seed"] == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run("train", "--config", bad, "--data", separable)[0] == EXIT_CONFIG
    assert read_config_file(cfg)["gamma"] == "3"


def test_eval_separable_is_perfect(tmp_path, separable):
    out = tmp_path / "rep"
    code, text = run("eval", "--data", separable, "--kernel", "sne", "--trials", 3, "--out", out)
    assert code == EXIT_OK
    assert "1.000±0.000" in text
    assert (out / "report.csv").exists() and (out / "config.json").exists()
    assert json.loads((out / "config.json").read_text())["trials"] == 3
    assert (out / "report.txt").read_text().startswith("# config ")


def test_eval_single_trial_has_zero_std(three_class, tmp_path):
    code, text = run("eval", "--data", three_class, "--kernel", "t", "--trials", 1,
                     "--out", tmp_path / "o")
    assert code == EXIT_OK
    rows = (tmp_path / "o" / "report.csv").read_text().splitlines()
    assert rows[-1].split(",")[2:] == ["0.0", "0.0", "0.0"]


def test_eval_askls_equals_lssvm_for_rbf(three_class, tmp_path):
    outs = []
    for model in ("askls", "lssvm"):
        d = tmp_path / model
        assert run("eval", "--data", three_class, "--model", model, "--trials", 3,
                   "--gamma", "2", "--out", d)[0] == EXIT_OK
        rows = (d / "report.csv").read_text().splitlines()[1:]
        outs.append([r.split(",", 1)[1] for r in rows])
    assert outs[0] == outs[1]


def test_eval_with_cv_writes_fold_tables(separable, tmp_path):
    out = tmp_path / "o"
    assert run("eval", "--data", separable, "--gamma", "0.5,5", "--folds", 3, "--trials", 2,
               "--out", out)[0] == EXIT_OK
    assert (out / "cv_trial0.csv").exists() and (out / "cv_trial1.csv").exists()


def test_cv_command(separable, tmp_path):
    code, text = run("cv", "--data", separable, "--gamma", "0.1,1", "--sigma", "1",
                     "--folds", 3, "--out", tmp_path / "cv.csv")
    assert code == EXIT_OK
    assert "best gamma=0.1 param=1 score=1.000000" in text
    assert len((tmp_path / "cv.csv").read_text().splitlines()) == 1 + 2 * 3


def test_graph_eval_direction_graph(tmp_path):
    graph, labels, _ = direction_graph(50, 4, 2, seed=0)
    edges, lab = write_graph(tmp_path, graph, labels)
    code, text = run("graph-eval", "--data", edges, "--labels", lab, "--preprocess", "none",
                     "--gamma", "0.1,1,10", "--folds", 5, "--trials", 3, "--out", tmp_path / "o")
    assert code == EXIT_OK
    rows = [r.split(",") for r in (tmp_path / "o" / "report.csv").read_text().splitlines()]
    mean = {r[0]: float(r[4]) for r in rows if r[1] == "mean"}
    assert mean["AsK-LS A"] > mean["LS-SVM (A+A^T)/2"]


def test_graph_eval_undirected_columns_equal(tmp_path):
    rng = np.random.default_rng(5)
    n = 30
    labels = np.where(np.arange(n) < 15, 1, -1)
    edges = set()
    for i in range(n):
        for j in rng.choice(n, 3, replace=False):
            if i != j and (labels[i] == labels[j] or rng.uniform() < 0.2):
                edges |= {(i, int(j)), (int(j), i)}
    from askls.kernels import DirectedGraph
    e, lab = write_graph(tmp_path, DirectedGraph(n, tuple(sorted(edges))), labels)
    out = tmp_path / "o"
    assert run("graph-eval", "--data", e, "--labels", lab, "--preprocess", "none",
               "--gamma", "0.3", "--trials", 4, "--out", out)[0] == EXIT_OK
    rows = [r.split(",") for r in (out / "report.csv").read_text().splitlines()[1:]]
    by = {}
    for r in rows:
        by.setdefault(r[0], []).append([float(v) for v in r[2:]])
    a, b = np.array(by["LS-SVM (A+A^T)/2"]), np.array(by["AsK-LS A"])
    assert np.max(np.abs(a - b)) <= 1e-8


def test_graph_eval_deterministic(tmp_path):
    graph, labels, _ = direction_graph(20, seed=2)
    edges, lab = write_graph(tmp_path, graph, labels)
    texts = [run("graph-eval", "--data", edges, "--labels", lab, "--trials", 2,
                 "--seed", 9, "--gamma", "2.5")[1] for _ in range(2)]
    assert texts[0] == texts[1]


def test_predict_transductive_graph(tmp_path):
    graph, labels, _ = direction_graph(20, seed=4)
    edges, lab = write_graph(tmp_path, graph, labels)
    model = tmp_path / "m.json"
    assert run("train", "--kernel", "adjacency", "--data", edges, "--labels", lab,
               "--preprocess", "none", "--gamma", "2.5", "--out", model)[0] == EXIT_OK
    code, text = run("predict", "--model-file", model, "--labels", lab)
    assert code == EXIT_OK
    assert text.splitlines()[1].startswith("0,")
