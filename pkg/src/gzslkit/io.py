"""File formats: binary/CSV matrices, dataset directories, split files, reports and curves.

Binary matrices start with the 8 ASCII bytes ``GZSLMAT1``, then the row and
column counts as little-endian uint32, then ``rows * cols`` little-endian
float64 values in row-major order. Nothing may follow the payload.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import TradeoffPoint
from .data import POOLS, ClassPartition, Dataset, GzslReport, GzslSplit, RunResult, ZslReport, normalize_prototypes
from .exceptions import BadMagic, FormatError, MissingFile, NonNumericCell, TruncatedPayload

MAGIC = b"GZSLMAT1"
_HEADER = struct.Struct("<8sII")


def write_matrix(matrix, path) -> None:
    """Write a 2-d array; ``.csv`` paths get CSV text, anything else the binary format."""
    a = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            for row in a:
                writer.writerow([repr(float(v)) for v in row])
        return
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, a.shape[0], a.shape[1]))
        fh.write(a.astype("<f8").tobytes(order="C"))


def _load_csv(path):
    rows = []
    with path.open(newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            values = []
            for col, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise NonNumericCell(line_no, col, cell) from None
            if rows and len(values) != len(rows[0]):
                raise FormatError(f"{path}: line {line_no} has {len(values)} cells, expected {len(rows[0])}")
            rows.append(values)
    return np.array(rows, dtype=np.float64).reshape(len(rows), -1)


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        if not MAGIC.startswith(raw[:8]):
            raise BadMagic(f"{path}: not a GZSLMAT1 file")
        raise TruncatedPayload(f"{path}: header is {len(raw)} bytes, expected {_HEADER.size}")
    magic, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}, expected {MAGIC!r}")
    expected = 8 * rows * cols
    payload = raw[_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedPayload(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    if len(payload) > expected:
        raise FormatError(f"{path}: {len(payload) - expected} trailing bytes after payload")
    return np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(rows, cols)


def _find(directory, stem):
    for suffix in (".bin", ".csv"):
        p = directory / f"{stem}{suffix}"
        if p.exists():
            return p
    raise MissingFile(directory / f"{stem}.bin")


def load_labels(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    labels = []
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise NonNumericCell(line_no, 1, line) from None
    return np.array(labels, dtype=np.int64)


def load_dataset(directory, normalize=True) -> Dataset:
    """Read ``features``, ``labels.txt`` and ``prototypes`` from a directory.

    Matrices may be ``.bin`` or ``.csv``. Prototype rows are scaled to unit
    norm unless ``normalize`` is false.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(directory)
    features = load_matrix(_find(directory, "features"))
    prototypes = load_matrix(_find(directory, "prototypes"))
    labels = load_labels(directory / "labels.txt")
    if normalize:
        prototypes = normalize_prototypes(prototypes)
    return Dataset(features, labels, prototypes)


def write_dataset(d: Dataset, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(d.features, directory / "features.bin")
    write_matrix(d.prototypes, directory / "prototypes.bin")
    (directory / "labels.txt").write_text("".join(f"{int(v)}\n" for v in d.labels))


_CLASS_FIELDS = ("train_classes", "val_classes", "test_classes")
SPLIT_HEADER = "# gzsl split file v1"


def write_splits(splits, path) -> None:
    """Write folds as text: a ``fold <i>`` line, then one ``<name> <ids...>`` line per set."""
    lines = [SPLIT_HEADER]
    for i, s in enumerate(splits):
        lines.append(f"fold {i}")
        for name in _CLASS_FIELDS:
            lines.append(" ".join([name, *map(str, getattr(s.partition, name).tolist())]))
        for name in POOLS:
            lines.append(" ".join([name, *map(str, getattr(s, name).tolist())]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_splits(path) -> list[GzslSplit]:
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    folds, current = [], None
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, *values = line.split()
        if key == "fold":
            current = {}
            folds.append(current)
            continue
        if current is None or key not in _CLASS_FIELDS + POOLS:
            raise FormatError(f"{path}:{line_no}: unexpected line {line!r}")
        try:
            current[key] = np.array([int(v) for v in values], dtype=np.int64)
        except ValueError:
            raise FormatError(f"{path}:{line_no}: non-integer entry") from None
    out = []
    for i, f in enumerate(folds):
        missing = [k for k in _CLASS_FIELDS + POOLS if k not in f]
        if missing:
            raise FormatError(f"{path}: fold {i} lacks {', '.join(missing)}")
        partition = ClassPartition(*(f[k] for k in _CLASS_FIELDS))
        out.append(GzslSplit(partition, *(f[k] for k in POOLS)))
    if not out:
        raise FormatError(f"{path}: no folds")
    return out


def _run_dict(r: RunResult):
    return {k: getattr(r, k) for k in RunResult.__dataclass_fields__}


def report_to_dict(report, inputs=None) -> dict:
    """JSON-ready dict; ``inputs`` records where the data and split came from."""
    if isinstance(report, GzslReport):
        summary = {
            "acc_unseen_in_all": report.acc_unseen_in_all,
            "acc_seen_in_all": report.acc_seen_in_all,
            "harmonic_mean": report.harmonic_mean,
            "harmonic_mean_std": report.harmonic_mean_std,
            "ausuc": report.ausuc,
            "ausuc_std": report.ausuc_std,
            "gamma_star": report.gamma_star,
            "lambda_star": report.lambda_star,
        }
        body = {"kind": "gzsl", "runs": [_run_dict(r) for r in report.runs], "summary": summary}
    else:
        body = {
            "kind": "zsl",
            "accuracies": list(report.accuracies),
            "lambda_stars": list(report.lambda_stars),
            "summary": {"accuracy": report.accuracy, "accuracy_std": report.accuracy_std},
        }
    body.update(
        tool="gzslkit", version=__version__, seed=report.seed,
        grid=list(report.grid), config=report.config,
    )
    if inputs:
        body["inputs"] = dict(inputs)
    return body


def report_from_dict(data: dict):
    common = dict(seed=data["seed"], grid=tuple(data["grid"]), config=data["config"])
    if data["kind"] == "gzsl":
        return GzslReport(runs=tuple(RunResult(**r) for r in data["runs"]), **common)
    if data["kind"] == "zsl":
        return ZslReport(accuracies=tuple(data["accuracies"]), lambda_stars=tuple(data["lambda_stars"]), **common)
    raise FormatError(f"unknown report kind {data['kind']!r}")


def dumps_report(report, inputs=None) -> str:
    return json.dumps(report_to_dict(report, inputs), indent=2, sort_keys=True) + "\n"


def write_report(report, path, inputs=None) -> None:
    Path(path).write_text(dumps_report(report, inputs))


def load_report(path):
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    return report_from_dict(json.loads(path.read_text()))


CURVE_HEADER = ("gamma", "acc_unseen", "acc_seen")


def write_curve(points, path) -> None:
    """CSV of trade-off points sorted by gamma, values written with ``repr`` precision."""
    points = sorted(points, key=lambda p: p.gamma)
    if not points:
        raise FormatError("cannot write an empty curve")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_HEADER)
        for p in points:
            writer.writerow([repr(float(p.gamma)), repr(float(p.acc_unseen_in_all)), repr(float(p.acc_seen_in_all))])


def load_curve(path) -> list[TradeoffPoint]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CURVE_HEADER:
            raise FormatError(f"{path}: bad curve header {header!r}")
        return [TradeoffPoint(float(g), float(u), float(s)) for g, u, s in reader]
