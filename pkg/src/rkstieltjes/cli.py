"""Command-line front end.

Subcommands: ``funv`` (approximate f(A)v with a chosen pole strategy),
``kronfun`` (low-rank evaluation on a Kronecker-sum argument), ``poles``
(generate pole files), ``experiment`` (bundled convergence studies), and
``accept`` (the acceptance suite).  All tabular output is CSV.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .acceptance import run_acceptance
from .bounds import kron_cauchy_bound, kron_laplace_bound
from .experiments import (
    EXPERIMENT_IDS,
    ExperimentConfig,
    diffusion_operator,
    run_experiment,
)
from .functions import parse_function_spec
from .kronfun import KroneckerProblem, dense_kron_solution, kron_fun
from .operators import (
    DiagonalOperator,
    HermitianOperator,
    SpectralInterval,
    load_matrix,
    oracle_funv,
    spectral_interval,
    toeplitz_tridiagonal,
)
from .poles import (
    cauchy_kron_poles,
    cauchy_poles,
    eds_poles,
    extended_poles,
    laplace_kron_poles,
    polynomial_poles,
    read_pole_file,
    write_pole_file,
    zolotarev_poles,
)
from .rk import funv_driver

FUNV_STRATEGIES = ("zolotarev", "cauchy", "eds-laplace", "eds-cauchy",
                   "extended", "polynomial")
KRON_FAMILIES = ("laplace-kron", "cauchy-kron", "eds-laplace", "eds-cauchy",
                 "extended", "polynomial")


# ---------------------------------------------------------------------------
# argument helpers


def _parse_matrix(spec: str) -> HermitianOperator:
    """tridiag:n[:scale] | diffusion:n[:eps[:dt]] | diag:path | a matrix file."""
    if spec.startswith("tridiag:"):
        parts = spec.split(":")[1:]
        n = int(parts[0])
        scale = float(parts[1]) if len(parts) > 1 else 1.0
        return toeplitz_tridiagonal(n, scale)
    if spec.startswith("diffusion:"):
        parts = spec.split(":")[1:]
        n = int(parts[0])
        eps = float(parts[1]) if len(parts) > 1 else 1e-2
        dt = float(parts[2]) if len(parts) > 2 else 0.1
        return diffusion_operator(n, eps, dt)
    if spec.startswith("diag:"):
        return DiagonalOperator(np.loadtxt(spec[5:], dtype=float, ndmin=1))
    return load_matrix(spec)


def _parse_interval(spec: str, op: HermitianOperator,
                    dense_limit: int) -> SpectralInterval:
    if spec == "auto":
        return spectral_interval(op, mode="exact-small",
                                 dense_limit=dense_limit)
    if spec.startswith("gershgorin"):
        floor = None
        if ":" in spec:
            floor = float(spec.split(":", 1)[1])
        return spectral_interval(op, mode="gershgorin", floor=floor)
    try:
        lo, hi = (float(t) for t in spec.split(","))
    except ValueError:
        raise SystemExit(
            f"--interval: expected 'a,b', 'auto' or 'gershgorin[:floor]', "
            f"got {spec!r}")
    return spectral_interval(op, mode="user", bounds=(lo, hi))


def _load_factor(path: str) -> np.ndarray:
    m = np.load(path) if path.endswith(".npy") else np.loadtxt(path, ndmin=2)
    m = np.asarray(m, dtype=float)
    return m[:, None] if m.ndim == 1 else m


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_rows(path: str, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# subcommand: funv


def _cmd_funv(args) -> int:
    op = _parse_matrix(args.matrix)
    f = parse_function_spec(args.function)
    iv = _parse_interval(args.interval, op, args.dense_limit)

    if args.shift:
        eta = float(args.shift)
        f = f.with_shift(eta)
        op = op.diag_shifted(-eta)
        iv = iv.shifted(-eta).require_positive()

    if args.vector is not None:
        v = np.loadtxt(args.vector, dtype=float, ndmin=1)
        if v.size != op.n:
            raise SystemExit(
                f"--vector: length {v.size} does not match order {op.n}")
    else:
        rng = np.random.default_rng(args.seed)
        v = rng.standard_normal(op.n)
        v /= np.linalg.norm(v)

    strategy, custom = args.poles, None
    if strategy.startswith("custom:"):
        custom = list(read_pole_file(strategy[7:]).poles)
        strategy = "custom"
    elif strategy not in FUNV_STRATEGIES:
        raise SystemExit(
            f"--poles: unknown strategy {strategy!r}; expected one of "
            f"{', '.join(FUNV_STRATEGIES)} or custom:FILE")

    oracle = None
    if args.oracle == "on":
        oracle = oracle_funv(op, f, v, dense_limit=args.dense_limit)

    result = funv_driver(
        op, f, v, iv, strategy=strategy,
        tol=args.tol, ell=args.ell, max_ell=args.max_ell,
        oracle=oracle, custom_poles=custom,
        conjectured_gamma=args.gamma_one)

    if args.out:
        _write_rows(args.out, ["ell", "est_error", "true_error", "bound"],
                    [(r.ell, r.est_error, r.true_error, r.bound)
                     for r in result.trace])
    last = result.trace[-1]
    status = "converged" if result.converged else "stopped"
    print(f"{status} at ell={last.ell} ({result.strategy}); "
          f"est_error={last.est_error:.3e} true_error={last.true_error:.3e} "
          f"bound={last.bound:.3e}")
    if args.out:
        print(f"trace written to {args.out}")
    return 0 if result.converged or args.tol is None else 1


# ---------------------------------------------------------------------------
# subcommand: kronfun


def _kron_pole_lists(family: str, iv: SpectralInterval, ell: int):
    if family == "laplace-kron":
        psi, xi = laplace_kron_poles(iv, ell)
        return list(psi.poles), list(xi.poles)
    if family == "cauchy-kron":
        psi, xi = cauchy_kron_poles(iv, ell)
        return list(psi.poles), list(xi.poles)
    if family in ("eds-laplace", "eds-cauchy"):
        from .experiments import _eds_kron_cauchy_pair

        if family == "eds-laplace":
            psi = list(eds_poles(iv, ell, "laplace").poles)
            return psi, list(psi)
        return _eds_kron_cauchy_pair(iv, ell)
    if family == "extended":
        seq = [math.inf if j % 2 == 0 else 0.0 for j in range(ell)]
        return seq, list(seq)
    if family == "polynomial":
        return [math.inf] * ell, [math.inf] * ell
    raise SystemExit(
        f"--poles: unknown family {family!r}; expected one of "
        f"{', '.join(KRON_FAMILIES)} or custom:PSI_FILE,XI_FILE")


def _cmd_kronfun(args) -> int:
    a_op = _parse_matrix(args.a)
    bneg_op = _parse_matrix(args.bneg)
    f = parse_function_spec(args.function)

    if args.ufile or args.vfile:
        if not (args.ufile and args.vfile):
            raise SystemExit("--ufile and --vfile must be given together")
        u, w = _load_factor(args.ufile), _load_factor(args.vfile)
    else:
        rng = np.random.default_rng(args.seed)
        u = rng.standard_normal((a_op.n, args.rank))
        w = rng.standard_normal((bneg_op.n, args.rank))
        u /= np.linalg.norm(u, axis=0)
        w /= np.linalg.norm(w, axis=0)

    if args.interval == "auto":
        iv = spectral_interval(a_op, mode="exact-small",
                               dense_limit=args.dense_limit)
        iv2 = spectral_interval(bneg_op, mode="exact-small",
                                dense_limit=args.dense_limit)
        iv = SpectralInterval(min(iv.lower, iv2.lower),
                              max(iv.upper, iv2.upper))
    else:
        iv = _parse_interval(args.interval, a_op, args.dense_limit)
    iv.require_positive()

    prob = KroneckerProblem(a_op, bneg_op, u, w, f, iv)

    family = args.poles
    if family.startswith("custom:"):
        spec = family[7:]
        if "," not in spec:
            raise SystemExit("--poles custom: expected custom:PSI_FILE,XI_FILE")
        psi_path, xi_path = spec.split(",", 1)
        psi = list(read_pole_file(psi_path).poles)
        xi = list(read_pole_file(xi_path).poles)
    else:
        psi, xi = _kron_pole_lists(family, iv, args.ell)

    res = kron_fun(prob, psi, xi, ell=args.ell)

    fnorm = prob.rhs_norm2()
    if family == "laplace-kron":
        bound = kron_laplace_bound(f, iv, args.ell, fnorm,
                                   conjectured_gamma=args.gamma_one)
    elif family == "cauchy-kron":
        bound = kron_cauchy_bound(f, iv, args.ell, fnorm)
    else:
        bound = math.nan

    true_error = math.nan
    if args.oracle == "on":
        x_ref = dense_kron_solution(prob, dense_limit=args.dense_limit)
        true_error = float(np.linalg.norm(res.materialize() - x_ref, ord=2))

    if args.out:
        _write_rows(args.out,
                    ["ell", "storage_rank", "norm2", "bound", "true_error"],
                    [(args.ell, res.storage_rank, res.norm2(), bound,
                      true_error)])
    if args.svd_report:
        svals = np.linalg.svd(res.core, compute_uv=False)
        _write_rows(args.svd_report, ["index", "sigma"],
                    [(j + 1, float(s)) for j, s in enumerate(svals)])

    print(f"ell={args.ell} family={family} storage_rank={res.storage_rank} "
          f"norm2={res.norm2():.6e} bound={bound:.3e} "
          f"true_error={true_error:.3e}")
    return 0


# ---------------------------------------------------------------------------
# subcommand: poles


def _cmd_poles(args) -> int:
    needs_interval = args.strategy not in ("extended", "polynomial")
    if needs_interval and args.interval is None:
        raise SystemExit(f"--interval a,b is required for {args.strategy}")
    iv = None
    if args.interval is not None:
        lo, hi = (float(t) for t in args.interval.split(","))
        iv = SpectralInterval(lo, hi).require_positive()

    xi = None
    if args.strategy == "zolotarev":
        seq = zolotarev_poles(iv, args.ell)
    elif args.strategy == "cauchy":
        seq = cauchy_poles(iv, args.ell)
    elif args.strategy in ("eds-laplace", "eds-cauchy"):
        seq = eds_poles(iv, args.ell, args.strategy.split("-")[1])
    elif args.strategy == "extended":
        seq = extended_poles(args.ell)
    elif args.strategy == "polynomial":
        seq = polynomial_poles(args.ell)
    elif args.strategy == "laplace-kron":
        seq, xi = laplace_kron_poles(iv, args.ell)
    elif args.strategy == "cauchy-kron":
        seq, xi = cauchy_kron_poles(iv, args.ell)
    else:  # pragma: no cover - argparse choices guard this
        raise SystemExit(f"unknown strategy {args.strategy!r}")

    write_pole_file(args.out, seq)
    print(f"{args.ell} poles ({args.strategy}) -> {args.out}")
    if xi is not None:
        if not args.out_xi:
            raise SystemExit(
                f"{args.strategy} produces a pole pair; --out-xi FILE is "
                "required for the second factor")
        write_pole_file(args.out_xi, xi)
        print(f"second-factor poles -> {args.out_xi}")
    return 0


# ---------------------------------------------------------------------------
# subcommand: experiment / accept


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        experiment=args.id, n=args.n, ell_max=args.ell_max, seed=args.seed,
        outdir=args.outdir, gnuplot=args.gnuplot, threads=args.threads,
        dense_limit=args.dense_limit, conjectured_gamma=args.gamma_one)
    for path in run_experiment(cfg):
        print(path)
    return 0


def _cmd_accept(args) -> int:
    numbers = None
    if args.only:
        numbers = [int(t) for t in args.only.split(",")]
    ok = run_acceptance(numbers)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for generated vectors/factors")
    common.add_argument("--threads", type=int, default=1,
                        help="parallel strategies in experiments")
    common.add_argument("--dense-limit", type=int, default=4000,
                        help="largest order for dense references/oracles")

    p = argparse.ArgumentParser(
        prog="rkstieltjes",
        description="Rational Krylov evaluation of Stieltjes matrix "
                    "functions with certified pole choices.")
    sub = p.add_subparsers(dest="command", required=True)

    pf = sub.add_parser("funv", parents=[common],
                        help="approximate f(A)v")
    pf.add_argument("--matrix", required=True,
                    help="tridiag:n[:scale] | diffusion:n[:eps[:dt]] | "
                         "diag:path | matrix file")
    pf.add_argument("--function", required=True,
                    help="e.g. phi:1, power:-0.5, inverse, log1p, sqrt-exp, "
                         "lambertw, rational:w,p;w,p")
    pf.add_argument("--poles", default="zolotarev",
                    help=f"{'|'.join(FUNV_STRATEGIES)}|custom:FILE")
    pf.add_argument("--interval", default="auto",
                    help="a,b | auto | gershgorin[:floor]")
    pf.add_argument("--shift", type=float, default=0.0,
                    help="evaluate f(.+eta) on the shifted operator")
    group = pf.add_mutually_exclusive_group(required=True)
    group.add_argument("--tol", type=float, help="stop at this error estimate")
    group.add_argument("--ell", type=int, help="use exactly this many poles")
    pf.add_argument("--max-ell", type=int, default=80)
    pf.add_argument("--vector", help="text file with the seed vector")
    pf.add_argument("--oracle", choices=("on", "off"), default="off",
                    help="compute true errors against a reference solution")
    pf.add_argument("--out", help="write the trace CSV here")
    pf.add_argument("--gamma-one", action="store_true",
                    help="use the conjectured gamma=1 constant in bounds")
    pf.set_defaults(fn=_cmd_funv)

    pk = sub.add_parser("kronfun", parents=[common],
                        help="low-rank f(Kronecker sum) evaluation")
    pk.add_argument("--a", required=True, help="matrix spec for A (SPD)")
    pk.add_argument("--bneg", required=True,
                    help="matrix spec for -B (SPD); the argument is "
                         "I x A - B^T x I")
    pk.add_argument("--function", required=True)
    pk.add_argument("--rank", type=int, default=1,
                    help="rank of the generated right-hand side")
    pk.add_argument("--ufile", help="left factor file (.npy or text)")
    pk.add_argument("--vfile", help="right factor file (.npy or text)")
    pk.add_argument("--poles", default="cauchy-kron",
                    help=f"{'|'.join(KRON_FAMILIES)}|custom:PSI,XI")
    pk.add_argument("--ell", type=int, required=True)
    pk.add_argument("--interval", default="auto", help="a,b | auto")
    pk.add_argument("--oracle", choices=("on", "off"), default="off")
    pk.add_argument("--out", help="write a one-row summary CSV here")
    pk.add_argument("--svd-report",
                    help="write singular values of the compressed core here")
    pk.add_argument("--gamma-one", action="store_true")
    pk.set_defaults(fn=_cmd_kronfun)

    pp = sub.add_parser("poles", parents=[common],
                        help="generate pole files")
    pp.add_argument("--strategy", required=True,
                    choices=("zolotarev", "cauchy", "eds-laplace",
                             "eds-cauchy", "extended", "polynomial",
                             "laplace-kron", "cauchy-kron"))
    pp.add_argument("--interval", help="a,b (spectral enclosure)")
    pp.add_argument("--ell", type=int, required=True)
    pp.add_argument("--out", required=True)
    pp.add_argument("--out-xi",
                    help="second file for the B^T-side poles of kron pairs")
    pp.set_defaults(fn=_cmd_poles)

    pe = sub.add_parser("experiment", parents=[common],
                        help="run a bundled convergence study")
    pe.add_argument("id", choices=EXPERIMENT_IDS)
    pe.add_argument("--n", type=int, help="matrix order (desk-scale default)")
    pe.add_argument("--ell-max", type=int)
    pe.add_argument("--outdir", default=".")
    pe.add_argument("--gnuplot", action="store_true",
                    help="also write a companion gnuplot script")
    pe.add_argument("--gamma-one", action="store_true")
    pe.set_defaults(fn=_cmd_experiment)

    pa = sub.add_parser("accept", parents=[common],
                        help="run the acceptance suite")
    pa.add_argument("--only", help="comma-separated criterion numbers")
    pa.set_defaults(fn=_cmd_accept)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
