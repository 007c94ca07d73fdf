"""Trace serialization: CSV (primary), JSON, metadata sidecar and grid debug dumps."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .engine import TRACE_COLUMNS, SweepTrace
from .errors import TraceIOError
from .field import FieldGrid

__all__ = [
    "write_trace_csv",
    "read_trace_csv",
    "write_trace_json",
    "read_trace_json",
    "trace_to_dict",
    "write_metadata",
    "ion_trace_path",
    "metadata_path",
    "GridDumpWriter",
]

FLOAT_FORMAT = ".17g"  # 17 significant digits round-trip every finite double


def _fmt(x) -> str:
    return format(float(x), FLOAT_FORMAT)


def ion_trace_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_ions.csv")


def metadata_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def _open_for_write(path: Path):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise TraceIOError(f"cannot write {path}: {exc.strerror or exc}", path=str(path)) from exc


def _open_for_read(path: Path):
    try:
        return open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise TraceIOError(f"cannot read {path}: {exc.strerror or exc}", path=str(path)) from exc


def write_trace_csv(trace: SweepTrace, path, ion_trace: bool = False) -> list[Path]:
    """Write the trace as CSV and return the paths written.

    The header is ``t,V_device,I,V_SC,V_SE,V_TB,q,d_bar``. With ``ion_trace`` a
    second file ``<stem>_ions.csv`` holds ``t,x_0,...,x_{N-1},d_bar,q`` (metres).
    """
    path = Path(path)
    table = trace.table()
    written = [path]
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in table:
            w.writerow([_fmt(x) for x in row])
    if ion_trace:
        if trace.ions is None:
            raise ValueError("trace carries no ion positions (run with keep_ions=True)")
        ipath = ion_trace_path(path)
        n = trace.ions.shape[1]
        with _open_for_write(ipath) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"x_{k}" for k in range(n)] + ["d_bar", "q"])
            for t, xs, d_bar, q in zip(trace.t, trace.ions, trace["d_bar"], trace["q"]):
                w.writerow([_fmt(t)] + [_fmt(x) for x in xs] + [_fmt(d_bar), _fmt(q)])
        written.append(ipath)
    return written


def _read_table(path: Path, expected: tuple[str, ...] | None = None):
    with _open_for_read(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceIOError(f"{path} is empty", path=str(path)) from None
        if expected is not None and tuple(header) != expected:
            raise TraceIOError(f"{path}: unexpected header {','.join(header)!r}", path=str(path))
        try:
            rows = [[float(x) for x in row] for row in reader if row]
        except ValueError as exc:
            raise TraceIOError(f"{path}: {exc}", path=str(path)) from exc
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def read_trace_csv(path, ions: bool | None = None) -> SweepTrace:
    """Read a trace written by :func:`write_trace_csv`.

    ``ions=None`` loads the ``_ions.csv`` companion when it exists. The metadata
    sidecar is loaded when present.
    """
    path = Path(path)
    _, data = _read_table(path, TRACE_COLUMNS)
    columns = {name: data[:, k].copy() for k, name in enumerate(TRACE_COLUMNS)}
    positions = None
    ipath = ion_trace_path(path)
    if ions or (ions is None and ipath.exists()):
        header, idata = _read_table(ipath)
        cols = [k for k, name in enumerate(header) if name.startswith("x_")]
        if header[:1] != ["t"] or not cols or idata.shape[0] != data.shape[0]:
            raise TraceIOError(f"{ipath} does not match {path}", path=str(ipath))
        positions = idata[:, cols].copy()
    meta = {}
    mpath = metadata_path(path)
    if mpath.exists():
        with _open_for_read(mpath) as fh:
            meta = json.load(fh)
    return SweepTrace(columns, positions, meta)


def trace_to_dict(trace: SweepTrace) -> dict:
    doc = {
        "columns": list(TRACE_COLUMNS),
        "data": {name: trace[name].tolist() for name in TRACE_COLUMNS},
        "metadata": trace.metadata,
    }
    if trace.ions is not None:
        doc["ions"] = trace.ions.tolist()
    return doc


def write_trace_json(trace: SweepTrace, path) -> Path:
    """Same content as the CSV in one JSON document (floats via ``repr``, so exact)."""
    path = Path(path)
    with _open_for_write(path) as fh:
        json.dump(trace_to_dict(trace), fh)
        fh.write("\n")
    return path


def read_trace_json(path) -> SweepTrace:
    path = Path(path)
    with _open_for_read(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TraceIOError(f"{path}: {exc.msg}", path=str(path)) from exc
    columns = {name: np.asarray(doc["data"][name], dtype=float) for name in TRACE_COLUMNS}
    ions = np.asarray(doc["ions"], dtype=float) if "ions" in doc else None
    return SweepTrace(columns, ions, doc.get("metadata", {}))


def write_metadata(trace: SweepTrace, path, extra: dict | None = None) -> Path:
    """Write ``<stem>.meta.json`` next to ``path`` (seed, delta, params hash, backend...)."""
    mpath = metadata_path(path)
    meta = dict(trace.metadata)
    if extra:
        meta.update(extra)
    with _open_for_write(mpath) as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return mpath


class GridDumpWriter:
    """Callback for :func:`engine.run` that streams the solved grid to CSV.

    One row per node and step: ``step,t,x,rho,phi,E``. ``every`` thins the output.
    """

    header = ("step", "t", "x", "rho", "phi", "E")

    def __init__(self, path, every: int = 1):
        if every < 1:
            raise ValueError("every must be >= 1")
        self.path = Path(path)
        self.every = int(every)
        self._fh = None
        self._writer = None

    def __enter__(self) -> "GridDumpWriter":
        self._fh = _open_for_write(self.path)
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(self.header)
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __call__(self, k: int, t: float, grid: FieldGrid) -> None:
        if self._writer is None:
            raise RuntimeError("GridDumpWriter used outside its context")
        if k % self.every:
            return
        step, time = str(k), _fmt(t)
        for x, rho, phi, e in zip(grid.x, grid.rho, grid.phi, grid.E_node):
            self._writer.writerow([step, time, _fmt(x), _fmt(rho), _fmt(phi), _fmt(e)])

