"""Command line entry point: gen, varimax, dist, witness, sweep, check-theory.

Exit status: 0 success, 1 runtime or numerical error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .adversarial import build_witness, witness_beats_truth
from .datagen import Instance, KurtosisLaw, make_instance
from .errors import ParameterError, VarimaxPhaseError
from .harness import load_config, run_sweep, write_outputs
from .linalg import Rotation, format_matrix, read_matrix, write_matrix
from .metrics import rotation_distance
from .theory import check_theory
from .varimax import optimize

INSTANCE_FILES = ("z.mat", "r_star.mat", "z_hat.mat")


def _law(text):
    try:
        return KurtosisLaw.parse(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _num(x):
    return f"{x:.17g}"


def cmd_gen(args):
    inst = make_instance(args.n, args.k, args.law, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, m in zip(INSTANCE_FILES, (inst.z, inst.r_star.mat, inst.z_hat)):
        write_matrix(out / name, m)
    return 0


def cmd_varimax(args):
    z_hat = read_matrix(args.matrix)
    sol = optimize(z_hat, restarts=args.restarts, max_iter=args.max_iter, rel_tol=args.tol,
                   seed=args.seed)
    sys.stdout.write(format_matrix(sol.r_hat.mat))
    print(f"objective={_num(sol.objective)} iters={sol.best_iterations} restarts={sol.restarts_used}")
    return 0


def cmd_dist(args):
    res = rotation_distance(Rotation(read_matrix(args.a)), Rotation(read_matrix(args.b)))
    d = round(res.dist, 12)
    print(f"dist={d:.12g}")
    print(f"perm={' '.join(map(str, res.best_p.perm))} "
          f"signs={' '.join('+1' if s > 0 else '-1' for s in res.best_p.signs)}")
    return 0


def load_instance(directory) -> Instance:
    d = Path(directory)
    z, r_star, z_hat = (read_matrix(d / name) for name in INSTANCE_FILES)
    r_star = Rotation(r_star)
    if z.shape != z_hat.shape or np.max(np.abs(z @ r_star.mat - z_hat)) > 1e-10 * max(1.0, np.abs(z).max()):
        raise ParameterError(f"{d}: z_hat is not z @ r_star")
    n, k = z.shape
    return Instance(n=n, k=k, law=None, seed=0, z=z, r_star=r_star, z_hat=z_hat)


def cmd_witness(args):
    inst = load_instance(args.instance)
    w = build_witness(inst)
    v_adv, v_true, beats = witness_beats_truth(inst, w)
    a = ";".join(",".join(_num(x) for x in row) for row in w.a.mat)
    print(f"a={a} d1={_num(w.d1)} d2={_num(w.d2)} v_adv={_num(v_adv)} v_true={_num(v_true)} "
          f"beats={'true' if beats else 'false'}")
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config, base_seed=args.seed)
    records = run_sweep(cfg, workers=args.workers)
    write_outputs(args.out, records, include_timing=args.timing)
    return 0


def cmd_check_theory(args):
    results = check_theory(args.samples, args.k_max, args.seed)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="varimax-phase", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log one line per sweep cell")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample an instance and write z, r_star, z_hat")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--law", type=_law, required=True, help="three_point:A | sparse_gaussian:P | gaussian")
    g.add_argument("--seed", type=_seed, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("varimax", help="fit centered Varimax to a matrix file")
    v.add_argument("matrix")
    v.add_argument("--restarts", type=int, default=10)
    v.add_argument("--max-iter", type=int, default=1000)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--seed", type=_seed, required=True)
    v.set_defaults(func=cmd_varimax)

    d = sub.add_parser("dist", help="distance between two rotations modulo signed permutations")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_dist)

    w = sub.add_parser("witness", help="adversarial witness diagnostics for an instance directory")
    w.add_argument("instance")
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("sweep", help="Monte Carlo sweep from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=_seed, required=True, help="base seed (overrides the config)")
    s.add_argument("--timing", action="store_true", help="keep wall_time_ms in records.csv")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check-theory", help="run the inequality and expectation checks")
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--k-max", type=int, default=8)
    c.add_argument("--seed", type=_seed, required=True)
    c.set_defaults(func=cmd_check_theory)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (VarimaxPhaseError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
