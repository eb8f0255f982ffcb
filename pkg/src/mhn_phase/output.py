"""CSV and config writers shared by the command-line tools."""

import csv
import json
import math
from pathlib import Path

import numpy as np

KL_HEADER = ("beta", "beta_eff", "beta_over_beta_c", "kl_normalized", "converged")
MINIMA_HEADER = ("beta", "minima_count", "excluded_trials")
CRITICAL_HEADER = ("N", "p_c", "beta_c")
APPENDIX_HEADER = ("p", "f_of_p", "energy")


def fmt(x) -> str:
    """Shortest round-trip decimal form (at most 17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_critical_csv(path, points):
    return write_rows(path, CRITICAL_HEADER, ((c.N, c.p_c, c.beta_c) for c in points))


def write_kl_csv(path, result):
    return write_rows(
        path,
        KL_HEADER,
        ((r.beta, r.beta_eff, r.beta_over_beta_c, r.value, r.converged) for r in result.records),
    )


def write_minima_csv(path, result):
    return write_rows(path, MINIMA_HEADER, ((r.beta, int(r.value), r.excluded) for r in result.records))


def write_appendix_csv(path, blocks):
    path = Path(path)
    with path.open("w", newline="") as fh:
        for block in blocks:
            fh.write(f"# beta={fmt(block.beta)}\n")
            fh.write(",".join(APPENDIX_HEADER) + "\n")
            for p, f, e in zip(block.p, block.f_of_p, block.energy):
                fh.write(f"{fmt(p)},{fmt(f)},{fmt(e)}\n")
    return path


def write_orbit_csv(path, blocks):
    path = Path(path)
    with path.open("w", newline="") as fh:
        for block in blocks:
            fh.write(f"# beta={fmt(block.beta)}\n")
            fh.write("step,p\n")
            for k, p in enumerate(block.orbit):
                fh.write(f"{k},{fmt(p)}\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return None if not math.isfinite(obj) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_config(path, config: dict):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(config), indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path):
    """Parse a CSV written here back to ``(header, rows)``; ``#`` lines are skipped."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]
