"""Plain-text file formats: datasets (CSV), models (v1), traces and reports.

All writers go through :func:`atomic_write` (temp file + rename).  Data,
model and trace files format floats with 17 significant digits; reports use
the shortest repr.  Both round-trip exactly.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from ..classify import PrunedModel
from ..core import Dataset, FitResult, Projection, validate

MODEL_MAGIC = "ALPR-MODEL"
MODEL_VERSION = "v1"


class FormatError(ValueError):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- datasets ---------------------------------------------------------------

def load_csv(path, class_count: int | None = None, check: bool = True) -> Dataset:
    """Read ``label,f1,...,fm`` rows (no header) into an m x n Dataset.

    Labels must be positive integers.  Without ``class_count`` the labels
    must cover 1..C exactly; with it, they only need to lie in 1..class_count
    (useful for test files missing a class).  ``check`` runs :func:`validate`.
    """
    labels, rows = [], []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if width is None:
                width = len(fields)
                if width < 2:
                    raise FormatError(f"line {lineno}: need a label and at least one feature")
            elif len(fields) != width:
                raise FormatError(f"line {lineno}: ragged row ({len(fields)} fields, expected {width})")
            try:
                label = int(fields[0])
            except ValueError:
                raise FormatError(f"line {lineno}: non-numeric field in label {fields[0]!r}") from None
            if label < 1:
                raise FormatError(f"line {lineno}: label must be a positive integer, got {label}")
            try:
                values = [float(f) for f in fields[1:]]
            except ValueError:
                bad = next(f for f in fields[1:] if not _is_float(f))
                raise FormatError(f"line {lineno}: non-numeric field {bad!r}") from None
            labels.append(label)
            rows.append(values)
    if not rows:
        raise FormatError(f"{path}: empty dataset file")
    labels = np.array(labels, dtype=np.int64)
    if class_count is None:
        class_count = int(labels.max())
        missing = sorted(set(range(1, class_count + 1)) - set(labels.tolist()))
        if missing:
            raise FormatError(f"labels not contiguous from 1: class {missing[0]} never appears "
                              f"(max label {class_count})")
    else:
        bad = np.flatnonzero(labels > class_count)
        if bad.size:
            raise FormatError(f"line {bad[0] + 1}: label {labels[bad[0]]} exceeds class count {class_count}")
    ds = Dataset(np.array(rows).T, labels, class_count)
    if check:
        validate(ds)
    return ds


def _is_float(s) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def save_csv(dataset: Dataset, path) -> None:
    lines = []
    for label, col in zip(dataset.labels, dataset.features.T):
        lines.append(",".join([str(int(label))] + [fmt(v) for v in col]))
    atomic_write(path, "\n".join(lines) + "\n")


# -- models -----------------------------------------------------------------

def _row(values) -> str:
    return " ".join(fmt(v) for v in values)


def save_model(model: PrunedModel, path) -> None:
    """Write a pruned classifier in the v1 text format.

    Layout: header line, m lines of W, one 0/1 mask line, C lines of the
    C x n training embedding, one line of training labels.
    """
    W = model.projection.matrix
    m, C = W.shape
    n = model.train_embedding.shape[1]
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION} m={m} C={C} n={n} rho={fmt(model.rho)}"]
    lines += [_row(r) for r in W]
    lines.append(" ".join("1" if b else "0" for b in model.selected_mask))
    lines += [_row(r) for r in model.train_embedding]
    lines.append(" ".join(str(int(v)) for v in model.train_labels))
    atomic_write(path, "\n".join(lines) + "\n")


def _parse_header(line: str):
    parts = line.split()
    if len(parts) != 6 or parts[0] != MODEL_MAGIC or parts[1] != MODEL_VERSION:
        raise FormatError(f"version mismatch: expected '{MODEL_MAGIC} {MODEL_VERSION}' header, got {line[:40]!r}")
    try:
        kv = dict(p.split("=", 1) for p in parts[2:])
        return int(kv["m"]), int(kv["C"]), int(kv["n"]), float(kv["rho"])
    except (KeyError, ValueError):
        raise FormatError(f"version mismatch: malformed header {line!r}") from None


def load_model(path) -> PrunedModel:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("truncated file: empty model file")
    m, C, n, rho = _parse_header(lines[0])
    expected = 1 + m + 1 + C + 1
    if len(lines) < expected:
        raise FormatError(f"truncated file: {len(lines)} lines, expected {expected}")

    def numbers(i, count, cast=float):
        toks = lines[i].split()
        if len(toks) != count:
            raise FormatError(f"shape mismatch on line {i + 1}: {len(toks)} values, expected {count}")
        try:
            return [cast(t) for t in toks]
        except ValueError:
            raise FormatError(f"line {i + 1}: non-numeric value") from None

    W = np.array([numbers(1 + i, C) for i in range(m)]).reshape(m, C)
    mask = np.array(numbers(1 + m, m, int), dtype=bool)
    emb = np.array([numbers(2 + m + i, n) for i in range(C)]).reshape(C, n)
    labels = np.array(numbers(2 + m + C, n, int), dtype=np.int64)
    return PrunedModel(Projection(W), mask, emb, labels, rho)


# -- traces and reports -------------------------------------------------------

def export_trace(fit: FitResult | tuple, path) -> None:
    """CSV with header ``iter,objective`` and one row per sweep."""
    trace = fit.objective_trace if isinstance(fit, FitResult) else tuple(fit)
    lines = ["iter,objective"] + [f"{i},{fmt(v)}" for i, v in enumerate(trace, start=1)]
    atomic_write(path, "\n".join(lines) + "\n")


def load_trace(path) -> list[float]:
    with open(path) as fh:
        rows = fh.read().splitlines()
    if not rows or rows[0] != "iter,objective":
        raise FormatError("not a trace file")
    return [float(r.split(",")[1]) for r in rows[1:] if r]


def write_report(report, path) -> None:
    """Per-run accuracies followed by a blank line and a per-method summary.

    Wall-clock timings are left out so the file is reproducible.
    """
    lines = ["method,run,accuracy"]
    for method, accs in report.accuracies.items():
        lines += [f"{method},{i},{float(a)!r}" for i, a in enumerate(accs, start=1)]
    lines += ["", "method,mean_accuracy,params"]
    for method in report.accuracies:
        params = ";".join(f"{k}={float(v)!r}" for k, v in sorted(report.params.get(method, {}).items()))
        lines.append(f"{method},{report.mean(method)!r},{params}")
    atomic_write(path, "\n".join(lines) + "\n")
