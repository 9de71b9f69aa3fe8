"""Readers for exported run directories (manifest.json, summary.json, CSVs)."""
import csv
import json
from pathlib import Path


class PlotError(Exception):
    """Bad or incomplete input. The message starts with the offending file."""


def _read_json(path):
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise PlotError(f"{path}: file not found") from None
    except json.JSONDecodeError as e:
        raise PlotError(f"{path}: not valid JSON ({e})") from None


def is_run_dir(path):
    return (Path(path) / "manifest.json").is_file()


def load_manifest(run_dir):
    path = Path(run_dir) / "manifest.json"
    if not path.is_file():
        raise PlotError(f"{path}: missing run manifest")
    m = _read_json(path)
    if m.get("format") != "mmhop-run/1":
        raise PlotError(f"{path}: unknown format {m.get('format')!r}")
    return m


def load_summaries(run_dir):
    """summary.json rows keyed by policy, exactly as written."""
    load_manifest(run_dir)
    path = Path(run_dir) / "summary.json"
    rows = _read_json(path)
    if not isinstance(rows, list) or not rows:
        raise PlotError(f"{path}: no summary rows")
    return path, {r["policy"]: r for r in rows}


def sweep_dirs(in_dir):
    """A run directory, or the lambda_* run directories of a sweep."""
    in_dir = Path(in_dir)
    if is_run_dir(in_dir):
        return [in_dir]
    if not in_dir.is_dir():
        raise PlotError(f"{in_dir}: no such directory")
    dirs = sorted(d for d in in_dir.glob("lambda_*") if is_run_dir(d))
    if not dirs:
        raise PlotError(f"{in_dir / 'manifest.json'}: missing run manifest (and no lambda_* runs)")
    return dirs


def load_strategies(run_dir):
    """strategies.csv rows: (slot, seed, policy, flow, path, probability)."""
    load_manifest(run_dir)
    path = Path(run_dir) / "strategies.csv"
    if not path.is_file():
        raise PlotError(f"{path}: file not found")
    with path.open(newline="") as f:
        reader = csv.DictReader(f)
        want = ["slot", "seed", "policy", "flow", "path", "probability"]
        if reader.fieldnames != want:
            raise PlotError(f"{path}: expected header {','.join(want)}")
        rows = []
        for r in reader:
            rows.append(
                (int(r["slot"]), int(r["seed"]), r["policy"], int(r["flow"]), int(r["path"]),
                 float(r["probability"]))
            )
    return path, rows
