"""``concordia`` command line.

Exit status 0 on success, 2 on domain errors (NotDiagonalInBasis,
TranscriptMismatch, TooLarge), 1 on malformed input.  Errors are written to
stderr as ``{"error": code, "message": text}``.
"""
from __future__ import annotations

import argparse
import json
import sys
from math import prod

import numpy as np

from . import io
from .correlations import OptimizerConfig, discord, verify_concordant
from .darwinism import MAX_SUBSYSTEMS, mutual_info_curve, plateau_metrics, random_pure_global
from .degeneracy import TAU_DEG, conditional_decomposition, frase
from .errors import ConcordiaError, MalformedInput, NotDiagonalInBasis, TooLarge, TranscriptMismatch
from .lbf import ProjectorFamily, run_lbf
from .linalg import require_unitary
from .mcsim import CircuitPlan, simulate, tvd
from .protocol.bb84 import eve_intercept_resend, random_round
from .protocol.cehlb import (Message, bob_decode_measure, computational_distribution, demo_table, eve_quantum_attack,
                             session)
from .states import DensityMatrix, LocalBasis, SbsSpec, build_sbs, from_density

DEFAULT_SEED = 20240601
DOMAIN_ERRORS = (NotDiagonalInBasis, TranscriptMismatch, TooLarge)


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else io.dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise MalformedInput(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise MalformedInput(f"expected comma-separated numbers, got {text!r}") from None


def cmd_discord(args):
    rho = io.density_from_json(io.load(args.state))
    opt = OptimizerConfig() if args.tol is None else OptimizerConfig(xatol=args.tol)
    _emit(args, discord(rho, args.measured, opt).as_dict())


def cmd_verify(args):
    rho = io.density_from_json(io.load(args.state))
    tol = 1e-8 if args.tol is None else args.tol
    if args.basis:
        basis = io.local_basis_from_json(io.load(args.basis))
        c = from_density(rho, basis, tol)
        _emit(args, {"concordant": True, "basis": io.local_basis_to_json(basis),
                     "probs": io.table_to_json(c.probs, c.dims)})
        return
    basis = verify_concordant(rho, diag_tol=tol)
    _emit(args, {"concordant": basis is not None,
                 "basis": None if basis is None else io.local_basis_to_json(basis)})


def cmd_frase(args):
    c = io.concordant_from_json(io.load(args.state))
    support = _int_list(args.support) if args.support else list(range(len(c.dims)))
    dec = conditional_decomposition(c, support)
    f = frase(dec, TAU_DEG if args.tol is None else args.tol)
    blocks = [{"members": [list(dec.terms[i].index) for i in b.members], "rank": b.rank,
               "weight": float(sum(dec.terms[i].weight for i in b.members))} for b in f.blocks]
    _emit(args, {"support": list(dec.support), "blocks": blocks})


def cmd_lbf(args):
    data = io.load(args.gate)
    g = io.matrix_from_json(data)
    require_unitary(g, what="gate")
    n = int(round(np.log2(g.shape[0])))
    dims = tuple(data.get("dims", [2] * n))
    if prod(dims) != g.shape[0]:
        raise MalformedInput("gate dims do not match its size")
    prev = io.local_basis_from_json(io.load(args.prev)) if args.prev else LocalBasis.identity(dims)
    family = ProjectorFamily.all_ranks(dims) if args.family == "all" else ProjectorFamily.rank1(dims)
    _emit(args, run_lbf(g, prev, family).as_dict())


def cmd_darwinism(args):
    if args.state:
        rho = io.density_from_json(io.load(args.state))
    elif args.random:
        if args.random > MAX_SUBSYSTEMS:
            raise TooLarge(f"dense curves limited to {MAX_SUBSYSTEMS} subsystems, got {args.random}")
        rho = random_pure_global([2] * args.random, args.seed)
    else:
        probs = _float_list(args.pointer_probs)
        rho = build_sbs(SbsSpec.orthogonal_records(probs, args.sbs))
    system = _int_list(args.system)
    env = _int_list(args.env) if args.env else None
    subsets = None if args.subsets == 0 else args.subsets
    curve = mutual_info_curve(rho, system, env, subsets=subsets, seed=args.seed)
    if args.format == "csv":
        _emit(args, curve.to_csv())
        return
    delta = args.delta if args.delta is not None else 0.1 * curve.h_system
    width, red = plateau_metrics(curve, delta)
    _emit(args, {"points": [list(p) for p in curve.points], "h_system": curve.h_system,
                 "delta": delta, "plateau_width": width, "redundancy": red})


def plan_from_json(d) -> CircuitPlan:
    try:
        dims = d["dims"]
        p0 = io.table_from_json(d["p0"], dims)
        perms = tuple(io.permutation_from_json(p) for p in d.get("perms", []))
        u = io.local_basis_from_json(d["u_final"]) if "u_final" in d else LocalBasis.identity(dims)
        return CircuitPlan(p0, perms, u)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad plan: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ConcordiaError):
            raise
        raise MalformedInput(f"bad plan: {exc}") from None


def cmd_mc(args):
    plan = plan_from_json(io.load(args.plan))
    rep = simulate(plan, args.shots, args.seed)
    counts = {io.index_to_key(k, plan.dims): c for k, c in rep.counts.items()}
    if args.format == "csv":
        lines = ["outcome,count"] + [f"{k},{v}" for k, v in sorted(counts.items())]
        _emit(args, "\n".join(lines) + "\n")
        return
    _emit(args, {"counts": counts, "shots": rep.shots, "seed": rep.seed})


def cmd_protocol(args):
    n = args.qubits
    dims = (2,) * n
    table = io.table_from_json(io.load(args.msg)["table"], dims) if args.msg else demo_table(n)
    msg = Message(table, dims)
    key, rec = session(msg, args.steps, args.seed, decoy_first=args.decoy_first, g1_form=args.g1_form)
    ss = np.random.SeedSequence([args.seed, 1]).spawn(3)
    report = {"transcript_digest": rec.transcript.digest(), "eve": args.eve, "eve_tvd": None,
              "error_rate": None, "shots": args.shots, "bob_detected": False}
    rho = rec.rho_t
    if args.eve == "quantum":
        report["eve_tvd"] = tvd(computational_distribution(eve_quantum_attack(rho, rec.transcript)), msg.table)
    elif args.eve == "measure":
        # Eve reads the state in the computational basis and resends the collapsed mixture
        p = computational_distribution(rho)
        report["eve_tvd"] = tvd(p, msg.table)
        rho = DensityMatrix(np.diag(p / p.sum()).astype(complex), dims)
    elif args.eve == "intercept":
        run = random_round(args.shots, args.p1, ss[0])
        _, report["error_rate"] = eve_intercept_resend(run, "random", ss[1])
    try:
        est = bob_decode_measure(rho, key, rec.transcript, args.shots, ss[2])
        report["bob_tvd"] = tvd(est, msg.table)
    except TranscriptMismatch:
        report["bob_detected"] = True
        report["bob_tvd"] = None
    if args.transcript_out:
        with open(args.transcript_out, "w") as fh:
            fh.write(io.dumps(rec.transcript.to_json()))
    if args.export_key:
        with open(args.export_key, "w") as fh:
            fh.write(io.dumps(key.to_json()))
    _emit(args, report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="concordia", description="Concordant-state toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("discord", parents=[common], help="discord of a two-qubit state")
    s.add_argument("--state", required=True)
    s.add_argument("--measured", type=int, default=0)
    s.set_defaults(func=cmd_discord)

    s = sub.add_parser("verify", parents=[common], help="search for (or check) a diagonalising local basis")
    s.add_argument("--state", required=True)
    s.add_argument("--basis", default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("frase", parents=[common], help="merge degenerate conditional blocks")
    s.add_argument("--state", required=True, help="concordant state JSON")
    s.add_argument("--support", default=None, help="comma-separated subsystems")
    s.set_defaults(func=cmd_frase)

    s = sub.add_parser("lbf", parents=[common], help="local basis finder on a gate")
    s.add_argument("--gate", required=True)
    s.add_argument("--basis", "--prev", dest="prev", default=None, help="incoming local basis (default identity)")
    s.add_argument("--family", choices=("rank1", "all"), default="rank1")
    s.set_defaults(func=cmd_lbf)

    s = sub.add_parser("darwinism", parents=[common], help="mutual information versus fragment size")
    src = s.add_mutually_exclusive_group()
    src.add_argument("--state", default=None)
    src.add_argument("--sbs", type=int, default=6, help="orthogonal-record fragments (default source)")
    src.add_argument("--random", type=int, default=None, help="qubits of a random pure global state")
    s.add_argument("--pointer-probs", default="0.5,0.5")
    s.add_argument("--system", default="0")
    s.add_argument("--env", default=None, help="comma-separated environment order")
    s.add_argument("--subsets", type=int, default=20, help="0 uses prefixes of the environment order")
    s.add_argument("--delta", type=float, default=None)
    s.set_defaults(func=cmd_darwinism, format="csv")

    s = sub.add_parser("mc", parents=[common], help="Monte-Carlo sampling of a circuit plan")
    s.add_argument("--plan", required=True)
    s.add_argument("--shots", type=int, default=100_000)
    s.set_defaults(func=cmd_mc)

    proto = sub.add_parser("protocol", help="hidden-basis encryption sessions")
    psub = proto.add_subparsers(dest="action", required=True)
    s = psub.add_parser("run", parents=[common], help="encode, optionally attack, decode")
    s.add_argument("--msg", default=None, help='JSON {"table": ...}; default is a demo table')
    s.add_argument("--qubits", type=int, default=3)
    s.add_argument("--steps", type=int, default=6)
    s.add_argument("--shots", type=int, default=100_000)
    s.add_argument("--eve", choices=("none", "measure", "quantum", "intercept"), default="none")
    s.add_argument("--p1", type=float, default=0.9, help="signal purity for the intercept channel")
    s.add_argument("--g1-form", choices=("full", "bare"), default="full")
    s.add_argument("--decoy-first", action="store_true")
    s.add_argument("--transcript-out", default=None)
    s.add_argument("--export-key", default=None, help="write the secret key here (off by default)")
    s.set_defaults(func=cmd_protocol)
    return p


def _fail(exc: Exception, status: int) -> int:
    code = getattr(exc, "code", type(exc).__name__)
    sys.stderr.write(json.dumps({"error": code, "message": str(exc)}, sort_keys=True) + "\n")
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except DOMAIN_ERRORS as exc:
        return _fail(exc, 2)
    except ConcordiaError as exc:
        return _fail(exc, 1)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        return _fail(MalformedInput(f"{type(exc).__name__}: {exc}"), 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
