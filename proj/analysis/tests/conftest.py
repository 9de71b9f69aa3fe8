import json
from pathlib import Path

import pytest


def write_run(root, summaries, strategies=None, arrival=4.5):
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": "mmhop-run/1",
        "config": {},
        "runs": [{"policy": s["policy"], "arrival_gbps": arrival, "slot_seconds": 1e-4,
                  "subflows_per_flow": 2, "totals": [], "hop_of": []} for s in summaries],
    }
    (root / "manifest.json").write_text(json.dumps(manifest))
    (root / "summary.json").write_text(json.dumps(summaries))
    lines = ["slot,seed,policy,flow,path,probability"]
    for r in strategies or []:
        lines.append(",".join(str(v) for v in r))
    (root / "strategies.csv").write_text("\n".join(lines) + "\n")
    return root


def summary(policy, delay, thresholds=(1.0,), ccdf=(0.0,), arrival=4.5):
    return {
        "policy": policy, "arrival_gbps": arrival, "seeds": [1], "slots": 10, "samples": 40,
        "mean_one_hop_delay_ms": delay, "end_to_end_delay_ms": [3 * delay],
        "throughput_gbps_per_subflow": arrival / 2, "beta_ms": 10.0, "violation_frequency": 0.0,
        "ccdf_thresholds_ms": list(thresholds), "ccdf": list(ccdf),
        "fallback_events": 0, "cap_events": 0,
    }


@pytest.fixture
def make_run(tmp_path):
    def make(name, summaries, strategies=None, arrival=4.5):
        return write_run(tmp_path / name, summaries, strategies, arrival)
    return make
