"""Monte Carlo check of the closed-form channel on a few states and rate sets.

Prints one line per (state, rates) pair with the largest element z-score.
Usage: python3 scripts/oracle_check.py [--n 100000] [--seed 2003] [--workers 4]
"""

import argparse
import time

import numpy as np

from qdephasing import NoiseRates, oracle_report
from qdephasing.config import parse_state

CASES = [
    ("phi1", NoiseRates(0.5, 1.0, 2.0)),
    ("bell-phi-plus", NoiseRates(1.0, 0.0, 0.0)),
    ("robust-23", NoiseRates(2.0, 0.3, 0.3)),
    ("fidelity-floor", NoiseRates(0.2, 1.5, 0.7)),
]


def main() -> int:
    ap = argparse.ArgumentParser(description="oracle sweep")
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2003)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    times = np.array([0.0, 0.2, 1.0, 3.0])
    failed = 0
    for name, rates in CASES:
        start = time.perf_counter()
        rep = oracle_report(parse_state(name), rates, times, a.n, a.seed, workers=a.workers)
        w = rep.worst()
        failed += not rep.passed
        print(
            f"{name:15s} Gamma={rates.Gamma:g} Gamma_A={rates.Gamma_A:g} Gamma_B={rates.Gamma_B:g} "
            f"max_z={rep.max_z:.2f} worst=rho{w.worst_element[0]}{w.worst_element[1]}_{w.worst_element[2]}@t={w.t:g} "
            f"{'ok' if rep.passed else 'FAIL'} ({time.perf_counter() - start:.2f}s)"
        )
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
