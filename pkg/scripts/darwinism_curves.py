"""Mutual information versus fragment fraction for a broadcast state and a
random pure global state, written as CSV next to each other."""
import argparse

from concordia.darwinism import mutual_info_curve, plateau_metrics, random_pure_global
from concordia.states import SbsSpec, build_sbs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fragments", type=int, default=6)
    ap.add_argument("--random-qubits", type=int, default=10)
    ap.add_argument("--pointer-probs", default="0.5,0.5")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="scripts/results/darwinism_curves.csv")
    args = ap.parse_args()

    probs = [float(x) for x in args.pointer_probs.split(",")]
    curves = {
        "sbs": mutual_info_curve(build_sbs(SbsSpec.orthogonal_records(probs, args.fragments)), [0]),
        "random": mutual_info_curve(random_pure_global([2] * args.random_qubits, args.seed), [0], seed=args.seed),
    }
    with open(args.out, "w") as fh:
        fh.write("state,f,I,H_S\n")
        for name, c in curves.items():
            for f, i in c.points:
                fh.write(f"{name},{f!r},{i!r},{c.h_system!r}\n")
    for name, c in curves.items():
        width, red = plateau_metrics(c, 0.1 * c.h_system)
        print(f"{name}: H_S={c.h_system:.4f} plateau_width={width:.3f} redundancy={red}")


if __name__ == "__main__":
    main()
