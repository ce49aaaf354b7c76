"""Wall time of exact concordance verification on degenerate inputs.

Illustrative only: the verifier is polynomial in the Hilbert-space dimension
2^n, so growth in n is exponential, but nothing here bears on worst-case
complexity.
"""
import argparse
import json
import time

import numpy as np

from concordia.correlations import verify_concordant
from concordia.states import ConcordantState, to_density


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-qubits", type=int, default=8)
    ap.add_argument("--rounds", type=int, default=20)
    ap.add_argument("--out", default="scripts/results/hardness_scaling.json")
    args = ap.parse_args()

    ns = list(range(2, args.max_qubits + 1))
    rhos = [to_density(ConcordantState.random((2,) * n, n, degenerate=True)) for n in ns]
    best = [np.inf] * len(ns)
    for _ in range(args.rounds):
        for i, r in enumerate(rhos):
            start = time.perf_counter()
            assert verify_concordant(r) is not None
            best[i] = min(best[i], time.perf_counter() - start)
    k = [float(np.log(best[i + 1] / best[i]) / np.log(ns[i + 1] / ns[i])) for i in range(len(ns) - 1)]
    out = {"n": ns, "seconds": best, "local_exponents": k}
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    for n, s in zip(ns, best):
        print(f"n={n}  {s:.3e} s")
    print("local exponents:", " ".join(f"{x:.2f}" for x in k))


if __name__ == "__main__":
    main()
