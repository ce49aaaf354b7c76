"""Measure how far a keyless quantum adversary lands from the message table.

Runs many sessions (seeds disjoint from the test suite), records the TVD of
Eve's computational-basis distribution, and bootstraps the median of a
100-trial batch.  The floor stored in ``concordia.protocol.cehlb`` is the 1st
percentile of that bootstrap, rounded down to two decimals.
"""
import argparse
import json
import math

import numpy as np

from concordia.mcsim import tvd
from concordia.protocol.cehlb import Message, computational_distribution, demo_table, eve_quantum_attack, session

SEED_OFFSET = 1_000_000


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--qubits", type=int, default=3)
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--out", default="scripts/results/eve_baseline.json")
    args = ap.parse_args()

    dims = (2,) * args.qubits
    msg = Message(demo_table(args.qubits), dims)
    vals = []
    for k in range(args.trials):
        _, rec = session(msg, args.steps, SEED_OFFSET + k)
        vals.append(tvd(computational_distribution(eve_quantum_attack(rec.rho_t, rec.transcript)), msg.table))
    vals = np.array(vals)
    rng = np.random.default_rng(SEED_OFFSET)
    medians = np.median(rng.choice(vals, size=(5000, 100)), axis=1)
    q01 = float(np.quantile(medians, 0.01))
    out = {
        "trials": args.trials, "qubits": args.qubits, "steps": args.steps, "seed_offset": SEED_OFFSET,
        "median": float(np.median(vals)), "min": float(vals.min()), "max": float(vals.max()),
        "batch100_median_q01": q01, "floor": math.floor(q01 * 100) / 100,
    }
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
