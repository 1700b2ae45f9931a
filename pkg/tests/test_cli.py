import numpy as np
import pytest

from tstrees.cli import main
from tstrees.core import Instance, LearnerConfig, TemporalDataset
from tstrees.dataio import serialize_semicolon_table
from tstrees.induction import classify, grow_tree
from tstrees.model import ModelBundle, load_model, model_from_text, model_to_text, save_model
from tstrees.core import DataFormatError

from conftest import random_dataset

import fixture_tree


def write_dataset(tmp_path, ds, name="data.csv"):
    path = tmp_path / name
    path.write_text(serialize_semicolon_table(ds), encoding="utf-8")
    return path


def separable_dataset(m=8, length=4):
    instances = []
    for i in range(m):
        cls = i % 2
        base = 0.0 if cls == 0 else 9.0
        values = base + np.linspace(0, 1, length) + 0.01 * i
        instances.append(Instance(values.reshape(1, length), cls))
    return TemporalDataset(instances, ["var0"], ["Lo", "Hi"], length)


def test_model_round_trip_is_byte_identical(tmp_path):
    tree = fixture_tree.golden_tree()
    bundle = ModelBundle(
        tree=tree,
        attribute_names=fixture_tree.ATTRS,
        class_names=fixture_tree.CLASSES,
        series_length=30,
        config=LearnerConfig(alpha_grid=(0.6,)),
    )
    path = tmp_path / "model.json"
    save_model(path, bundle)
    first = path.read_bytes()
    save_model(path, load_model(path))
    assert path.read_bytes() == first


def test_model_version_mismatch_refused():
    bundle = ModelBundle(
        tree=fixture_tree.golden_tree(),
        attribute_names=fixture_tree.ATTRS,
        class_names=fixture_tree.CLASSES,
        series_length=30,
        config=LearnerConfig(),
    )
    text = model_to_text(bundle).replace('"version": 1', '"version": 99')
    with pytest.raises(DataFormatError, match="version"):
        model_from_text(text)
    with pytest.raises(DataFormatError):
        model_from_text("{}")
    with pytest.raises(DataFormatError):
        model_from_text("not json")


def test_model_preserves_classification(tmp_path, rng):
    ds = random_dataset(rng, m=10, n=2, length=5, q=2)
    held_out = random_dataset(rng, m=6, n=2, length=5, q=2)
    config = LearnerConfig(min_leaf_size=1)
    tree = grow_tree(ds, config)
    bundle = ModelBundle(tree, ds.attribute_names, ds.class_names, 5, config)
    path = tmp_path / "m.json"
    save_model(path, bundle)
    loaded = load_model(path)
    assert loaded.tree == tree
    for inst in held_out.instances:
        assert classify(loaded.tree, inst) == classify(tree, inst)


def test_train_prints_tree_and_saves_model(tmp_path, capsys):
    ds = separable_dataset()
    data = write_dataset(tmp_path, ds)
    model_path = tmp_path / "model.json"
    code = main(
        [
            "train",
            "--data", str(data),
            "--min-leaf", "1",
            "--out", str(model_path),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "var0" in out
    assert model_path.exists()


def test_train_pure_class_file_prints_single_leaf(tmp_path, capsys):
    instances = [Instance(np.ones((1, 3)) * i, 0) for i in range(4)]
    ds = TemporalDataset(instances, ["var0"], ["Only"], 3)
    data = write_dataset(tmp_path, ds)
    code = main(["train", "--data", str(data)])
    out = capsys.readouterr().out
    assert code == 0
    assert out == ": Only (4.0)\n"


def test_predict_reproduces_training_labels(tmp_path, capsys):
    ds = separable_dataset()
    data = write_dataset(tmp_path, ds)
    model_path = tmp_path / "model.json"
    assert main(
        ["train", "--data", str(data), "--min-leaf", "1", "--purity", "0.0",
         "--out", str(model_path)]
    ) == 0
    capsys.readouterr()
    code = main(["predict", "--model", str(model_path), "--data", str(data)])
    out = capsys.readouterr().out
    assert code == 0
    names = [ds.class_names[i.class_index] for i in ds.instances]
    assert out.splitlines() == names


def test_predict_dimension_mismatch_exits_2(tmp_path, capsys):
    ds = separable_dataset()
    data = write_dataset(tmp_path, ds)
    model_path = tmp_path / "model.json"
    assert main(["train", "--data", str(data), "--min-leaf", "1", "--out", str(model_path)]) == 0
    wide = TemporalDataset(
        [Instance(np.zeros((2, 4)), 0)], ["var0", "var1"], ["Lo"], 4
    )
    bad = write_dataset(tmp_path, wide, "wide.csv")
    capsys.readouterr()
    code = main(["predict", "--model", str(model_path), "--data", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "channels" in err


def test_evaluate_reports_accuracy(tmp_path, capsys):
    ds = separable_dataset()
    data = write_dataset(tmp_path, ds)
    model_path = tmp_path / "model.json"
    report_path = tmp_path / "report.tsv"
    assert main(["train", "--data", str(data), "--min-leaf", "1", "--out", str(model_path)]) == 0
    capsys.readouterr()
    code = main(
        ["evaluate", "--model", str(model_path), "--data", str(data),
         "--report", str(report_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("accuracy: 100.00")
    assert "confusion matrix" in out
    assert "tp_rate" in out
    lines = report_path.read_text().splitlines()
    assert any("\taccuracy\t" in line for line in lines)


def test_usage_error_exits_1(capsys):
    assert main(["train"]) == 1  # --data missing
    assert main(["no-such-command"]) == 1
    capsys.readouterr()


def test_missing_file_exits_2(capsys):
    code = main(["train", "--data", "/nonexistent/file.csv"])
    assert code == 2
    capsys.readouterr()


def test_compare_rows_mirror_method_ladder(tmp_path, capsys):
    ds = separable_dataset(m=14, length=5)
    data = write_dataset(tmp_path, ds)
    methods = "tj48:0.5,tj48:0.6,tj48:0.7,tj48:0.8,tj48:0.9,ed-i,dtw-i,dtw-d"
    code = main(
        ["compare", "--data", str(data), "--train-fraction", "0.8",
         "--seed", "7", "--methods", methods]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln and not set(ln) <= {"-"}]
    labels = [ln.split()[0] for ln in lines[1:]]
    assert labels == methods.split(",")


def test_compare_deterministic(tmp_path, capsys):
    ds = separable_dataset(m=12, length=5)
    data = write_dataset(tmp_path, ds)
    args = ["compare", "--data", str(data), "--seed", "3",
            "--methods", "tj48:0.5,ed-i,j48:1100"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second


def test_bench_grid(tmp_path, capsys):
    for name in ("alpha.csv", "beta.csv"):
        ds = separable_dataset(m=10, length=4)
        write_dataset(tmp_path, ds, name)
    report = tmp_path / "grid.tsv"
    code = main(
        ["bench", "--data-dir", str(tmp_path), "--seed", "1",
         "--methods", "ed-i,tj48:0.5", "--report", str(report)]
    )
    out = capsys.readouterr().out
    assert code == 0
    head = out.splitlines()[0]
    assert "alpha" in head and "beta" in head
    lines = report.read_text().splitlines()
    assert len(lines) == 4  # 2 datasets x 2 methods
