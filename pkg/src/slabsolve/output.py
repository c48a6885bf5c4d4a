"""
Result files: one JSON document per run plus plain-text plot data.

Output is byte-stable for a given config: keys are sorted, floats are
written with ``repr`` precision and timings go to the log, never to files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import SlabSolveError

__all__ = ["record_json", "emit"]


def record_json(record) -> str:
    return json.dumps(record.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _series_filename(experiment, name):
    return f"{experiment}.{name}.dat"


def emit(record, out_dir, fmt: str = "json") -> list[str]:
    """Write ``<experiment>.json`` and one ``.dat`` file per series.

    ``.dat`` files are whitespace-separated columns with a commented header
    carrying the column names and the config hash.

    Raises
    ------
    SlabSolveError
        If the directory or a file cannot be written.
    """
    if fmt != "json":
        raise ValueError(f"unsupported format {fmt!r}")
    paths = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{record.experiment}.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(record_json(record))
        paths.append(path)
        for name in sorted(record.series):
            s = record.series[name]
            path = os.path.join(out_dir, _series_filename(record.experiment, name))
            header = "\n".join([
                f"slabsolve {record.experiment} {name}",
                f"config-hash {record.config_hash}",
                " ".join(s["columns"]),
            ])
            np.savetxt(path, np.atleast_2d(s["rows"]), fmt="%.17g", header=header, comments="# ")
            paths.append(path)
    except OSError as exc:
        raise SlabSolveError(f"cannot write results to {out_dir}: {exc.strerror}") from None
    return paths
