"""Write the analytic decay curves of the worked examples as CSV files.

Usage: python3 scripts/reproduce_curves.py [--out-dir results]
"""

import argparse
from pathlib import Path

from qdephasing.cli import main

# (file stem, CLI arguments)
RUNS = [
    ("bell_local", ["--channel", "AB", "--gamma-a", "1", "--gamma-b", "1", "--state", "bell-phi-plus"]),
    ("bell_collective", ["--channel", "D", "--gamma", "1", "--state", "bell-phi-plus"]),
    ("robust23_collective", ["--channel", "D", "--gamma", "1", "--state", "robust-23"]),
    ("robust23_local", ["--channel", "AB", "--gamma-a", "1", "--gamma-b", "1", "--state", "robust-23"]),
    ("phi1_full", ["--channel", "full", "--gamma", "0.5", "--gamma-a", "1", "--gamma-b", "2", "--state", "phi1"]),
    ("one_qubit_134", ["--channel", "A", "--gamma-a", "1", "--state", "one-qubit-134"]),
    ("fidelity_floor", ["--channel", "A", "--gamma-a", "1", "--state", "fidelity-floor"]),
]


def run(out_dir: Path, t_max: float, points: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for stem, args in RUNS:
        code = main([
            "evolve", *args, "--t-max", str(t_max), "--points", str(points),
            "--out", str(out_dir / f"{stem}.csv"), "--summary", str(out_dir / f"{stem}.json"),
        ])
        if code:
            raise SystemExit(code)
        print(f"wrote {out_dir / stem}.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=201)
    a = ap.parse_args()
    run(a.out_dir, a.t_max, a.points)
