import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gzslkit import ExperimentConfig, SplitConfig, SyntheticConfig, TradeoffPoint, generate, io, make_validation_folds, run_gzsl_evaluation
from gzslkit.exceptions import BadMagic, FormatError, LabelOutOfRange, MissingFile, NonNumericCell, TruncatedPayload


def test_one_by_one(tmp_path):
    p = tmp_path / "m.bin"
    p.write_bytes(b"GZSLMAT1" + struct.pack("<II", 1, 1) + struct.pack("<d", 0.0))
    assert io.load_matrix(p).tolist() == [[0.0]]


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=st.floats(allow_nan=False, allow_infinity=False)), st.sampled_from([".bin", ".csv"]))
def test_matrix_round_trip(tmp_path_factory, a, suffix):
    p = tmp_path_factory.mktemp("m") / f"a{suffix}"
    io.write_matrix(a, p)
    b = io.load_matrix(p)
    assert b.shape == a.shape and np.array_equal(b.view(np.uint64), a.view(np.uint64))


def test_truncated_payload(tmp_path):
    p = tmp_path / "m.bin"
    p.write_bytes(b"GZSLMAT1" + struct.pack("<II", 1, 1) + b"\0" * 7)
    with pytest.raises(TruncatedPayload):
        io.load_matrix(p)


def test_bad_magic_and_trailing(tmp_path):
    p = tmp_path / "m.bin"
    p.write_bytes(b"NOTAMAT1" + struct.pack("<II", 1, 1) + b"\0" * 8)
    with pytest.raises(BadMagic):
        io.load_matrix(p)
    p.write_bytes(b"GZSLMAT1" + struct.pack("<II", 1, 1) + b"\0" * 9)
    with pytest.raises(FormatError):
        io.load_matrix(p)


def test_csv_errors(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("1,2\n3,x\n")
    with pytest.raises(NonNumericCell) as err:
        io.load_matrix(p)
    assert (err.value.line, err.value.col) == (2, 2)
    p.write_text("1,2\n3\n")
    with pytest.raises(FormatError):
        io.load_matrix(p)


def test_dataset_directory(tmp_path):
    d = generate(SyntheticConfig(n_classes=4, samples_per_class=3, feature_dim=5, attribute_dim=2))
    io.write_dataset(d, tmp_path)
    back = io.load_dataset(tmp_path)
    assert back.features.shape == (12, 5) and back.prototypes.shape == (4, 2)
    assert np.array_equal(back.features, d.features) and np.array_equal(back.labels, d.labels)


def test_dataset_csv_fallback(tmp_path):
    io.write_matrix(np.eye(2), tmp_path / "features.csv")
    io.write_matrix([[3.0, 4.0], [1.0, 0.0]], tmp_path / "prototypes.csv")
    (tmp_path / "labels.txt").write_text("0\n1\n")
    d = io.load_dataset(tmp_path)
    np.testing.assert_allclose(d.prototypes[0], [0.6, 0.8])
    assert io.load_dataset(tmp_path, normalize=False).prototypes[0, 0] == 3.0


def test_dataset_errors(tmp_path):
    io.write_matrix(np.eye(2), tmp_path / "features.bin")
    (tmp_path / "labels.txt").write_text("0\n1\n")
    with pytest.raises(MissingFile):
        io.load_dataset(tmp_path)
    io.write_matrix(np.eye(2), tmp_path / "prototypes.bin")
    (tmp_path / "labels.txt").write_text("0\n1\n1\n")
    with pytest.raises(LabelOutOfRange):
        io.load_dataset(tmp_path)
    with pytest.raises(MissingFile):
        io.load_dataset(tmp_path / "nope")


def test_split_round_trip(tmp_path):
    d = generate(SyntheticConfig(n_classes=12, samples_per_class=6))
    folds = make_validation_folds(d, SplitConfig(3, 3, n_val_folds=3, seed=1))
    io.write_splits(folds, tmp_path / "s.txt")
    assert io.load_splits(tmp_path / "s.txt") == folds
    (tmp_path / "bad.txt").write_text("fold 0\ntrain_idx 1 2\n")
    with pytest.raises(FormatError):
        io.load_splits(tmp_path / "bad.txt")


def test_report_round_trip(tmp_path):
    d = generate(SyntheticConfig(n_classes=12, samples_per_class=10))
    folds = make_validation_folds(d, SplitConfig(3, 3, n_val_folds=2))
    rep = run_gzsl_evaluation(d, folds[0], ExperimentConfig(lambda_grid=(0.01, 1.0)), folds)
    io.write_report(rep, tmp_path / "r.json", inputs={"data": "x"})
    assert io.load_report(tmp_path / "r.json") == rep
    text = (tmp_path / "r.json").read_text()
    for key in ('"seed"', '"grid"', '"config"', '"inputs"'):
        assert key in text


def test_curve_file(tmp_path):
    one = [TradeoffPoint(0.5, 10.0, 20.0)]
    io.write_curve(one, tmp_path / "c.csv")
    assert len((tmp_path / "c.csv").read_text().splitlines()) == 2
    rng = np.random.default_rng(0)
    pts = [TradeoffPoint(*rng.standard_normal(3)) for _ in range(20)]
    io.write_curve(pts[::-1], tmp_path / "c.csv")
    back = io.load_curve(tmp_path / "c.csv")
    assert back == sorted(pts, key=lambda p: p.gamma)
