"""End-to-end acceptance suite.

Eleven independent criteria exercise the full stack at stated tolerances
and runtime budgets: Galerkin exactness, the extremal rational ratio, the
four a-priori convergence bounds (1-D and Kronecker, both function
classes), the iteration-count study on a 100k matrix, the compressed
two-sided solver against brute force, the Sylvester residual bound,
singular-value decay, and the equidistributed pole sequence.  Each
criterion returns (passed, detail) and never weakens its tolerance; the
runner prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence, TextIO

import numpy as np

from .bounds import (
    cauchy_bound,
    kron_cauchy_bound,
    kron_laplace_bound,
    laplace_bound,
    sylvester_residual_bound,
)
from .functions import catalog_function
from .kronfun import (
    KroneckerProblem,
    dense_kron_solution,
    funm_diag,
    kron_fun,
    singular_decay_report,
    sylvester_residual,
)
from .operators import (
    DiagonalOperator,
    TridiagonalOperator,
    oracle_funv,
    toeplitz_tridiagonal,
)
from .poles import (
    EdsState,
    _eds_g,
    as_rational,
    cauchy_kron_poles,
    eds_next,
    eds_start,
    rate_rho,
    zolotarev_poles,
    zolotarev_ratio,
)
from .rk import RKDecomposition, error_sweep, exactness_check, rk_funv
from .experiments import diffusion_operator

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_acceptance"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    @property
    def in_budget(self) -> bool:
        return self.seconds < self.budget

    def line(self) -> str:
        tag = "PASS" if self.passed and self.in_budget else "FAIL"
        note = self.detail
        if not self.in_budget:
            note += f"; OVER BUDGET {self.seconds:.1f}s >= {self.budget:g}s"
        return (f"[{tag}] criterion {self.number:2d} {self.name}: "
                f"{note} [{self.seconds:.1f}s]")


def _fit_slope(ells: Sequence[int], errs: Sequence[float],
               floor: float) -> float:
    """Least-squares slope of log(err) vs ell over rows above the
    round-off floor (saturated tail rows would flatten the fit)."""
    xs = [float(l) for l, e in zip(ells, errs) if e > floor]
    ys = [math.log(e) for e in errs if e > floor]
    if len(xs) < 3:
        raise ValueError("too few rows above the round-off floor for a slope")
    return float(np.polyfit(xs, ys, 1)[0])


def _rand_spd_tridiagonal(rng: np.random.Generator, n: int) -> TridiagonalOperator:
    e = rng.uniform(-1.0, 1.0, n - 1)
    # Strict diagonal dominance with a positive margin keeps it SPD.
    d = np.abs(np.concatenate([[0.0], e])) + np.abs(np.concatenate([e, [0.0]]))
    d = d + rng.uniform(0.1, 2.0, n)
    return TridiagonalOperator(d, e)


# --------------------------------------------------------------------------
# 1. exactness of the Galerkin extraction


def _crit_exactness() -> tuple[bool, str]:
    rng = np.random.default_rng(20240811)
    worst, worst_label = 0.0, ""
    for trial in range(25):
        n = int(rng.integers(20, 201))
        if trial % 2 == 0:
            op = DiagonalOperator(rng.uniform(0.05, 10.0, n))
        else:
            op = _rand_spd_tridiagonal(rng, n)
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        iv = op.gershgorin()
        if iv.lower <= 0:
            iv = op.exact_interval()
        finite = list(zolotarev_poles(iv, int(rng.integers(2, 6))).poles)
        poles = finite + [math.inf] * int(rng.integers(1, 4))
        rep = exactness_check(op, v, poles, max_pairs=10)
        if rep.max_rel_err > worst:
            worst, worst_label = rep.max_rel_err, rep.worst()
    ok = worst <= 1e-9
    return ok, f"max residual {worst:.2e} (worst member {worst_label}) <= 1e-9"


# --------------------------------------------------------------------------
# 2. extremal rational ratio and the ell=1 pole


def _crit_zolotarev() -> tuple[bool, str]:
    worst = 0.0
    for (a, b) in ((1.0, 10.0), (1.0, 1000.0), (1e-3, 4.0)):
        rho = rate_rho(a, b)
        for ell in range(1, 11):
            seq = zolotarev_poles((a, b), ell)
            ratio = zolotarev_ratio(as_rational(seq), (a, b), (-b, -a))
            rel = ratio / (4.0 * rho ** ell)
            worst = max(worst, rel)
            if rel > 1.0:
                return False, (f"ratio {ratio:.3e} exceeds 4*rho^ell on "
                               f"[{a:g},{b:g}] at ell={ell}")
    p1 = float(zolotarev_poles((1.0, 10.0), 1).poles[0])
    dev = abs(p1 + math.sqrt(10.0))
    if dev > 1e-10:
        return False, f"ell=1 pole {p1} differs from -sqrt(ab) by {dev:.2e}"
    return True, f"ratio/(4 rho^ell) <= {worst:.3f} on 3 intervals; ell=1 pole ok"


# --------------------------------------------------------------------------
# 3/4. one-dimensional convergence corollaries


def _sweep_fixture(op, f, strategy: str, ells, seed: int = 7):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.n)
    v /= np.linalg.norm(v)
    iv = op.exact_interval()
    oracle = oracle_funv(op, f, v)
    rows = error_sweep(op, f, v, iv, strategy, ells, oracle)
    return iv, oracle, rows


def _crit_cauchy_1d() -> tuple[bool, str]:
    op = toeplitz_tridiagonal(2000, 1.0)
    f = catalog_function("power", -0.5)
    iv, oracle, rows = _sweep_fixture(op, f, "cauchy", range(1, 31))
    for r in rows:
        if not r.true_error <= r.bound:
            return False, f"error {r.true_error:.3e} > bound {r.bound:.3e} at ell={r.ell}"
    # One-sided Galerkin over-delivers (the per-ell optimal sets realize
    # roughly the squared rate), so the slope check guards against
    # under-delivery only: observed decay must reach the predicted rate up
    # to 25% slack.  Faster than predicted is success, not failure.
    target = math.log(rate_rho(iv.lower, 4.0 * iv.upper))
    slope = _fit_slope([r.ell for r in rows], [r.true_error for r in rows],
                       floor=1e-12 * float(np.linalg.norm(oracle)))
    ok = slope <= 0.75 * target
    return ok, (f"error <= bound for ell=1..30; slope {slope:.4f} reaches "
                f"predicted log rho {target:.4f} within 25% slack")


def _crit_laplace_1d() -> tuple[bool, str]:
    op = diffusion_operator(2000)
    f = catalog_function("phi", 1)
    _, _, rows = _sweep_fixture(op, f, "zolotarev", range(1, 31))
    worst = max(r.true_error / r.bound for r in rows)
    ok = all(r.true_error <= r.bound for r in rows)
    return ok, f"error <= bound for ell=1..30 (max error/bound {worst:.2e})"


# --------------------------------------------------------------------------
# 5. iteration counts on the 100k fixture


def _first_below(op, f, v, iv, strategy: str, cap: int, oracle, tol: float):
    from .rk import _pole_stream

    xnorm = float(np.linalg.norm(oracle))
    stream = _pole_stream(strategy, iv, None)
    dec = RKDecomposition(op, v)
    for step in range(1, cap + 1):
        dec.extend([next(stream)])
        err = float(np.linalg.norm(rk_funv(dec, f) - oracle)) / xnorm
        if err <= tol:
            return step, err
        if dec.breakdown:
            break
    return None, err


def _crit_table_times() -> tuple[bool, str]:
    n = 100_000
    op = toeplitz_tridiagonal(n, 1.0)
    f = catalog_function("power", -0.5)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    iv = op.exact_interval()
    oracle = oracle_funv(op, f, v)
    eds_it, eds_err = _first_below(op, f, v, iv, "eds-cauchy", 60, oracle, 1e-6)
    ek_it, ek_err = _first_below(op, f, v, iv, "extended", 220, oracle, 1e-6)
    if eds_it is None or eds_it > 35:
        return False, f"EDS needed {eds_it or '>60'} iterations (want <= 35)"
    if ek_it is not None and ek_it < 150:
        return False, f"extended reached 1e-6 in {ek_it} iterations (want >= 150)"
    ek_txt = f"{ek_it}" if ek_it is not None else ">220"
    return True, (f"n=1e5: EDS {eds_it} iters (err {eds_err:.1e}) <= 35; "
                  f"extended {ek_txt} iters >= 150")


# --------------------------------------------------------------------------
# 6. compressed evaluation against brute-force Kronecker sums


def _brute_force_kron(f, a: np.ndarray, b: np.ndarray,
                      fmat: np.ndarray) -> np.ndarray:
    na, nb = a.shape[0], b.shape[0]
    big = np.kron(np.eye(nb), a) - np.kron(b.T, np.eye(na))
    w, q = np.linalg.eigh(big)
    x = q @ (f(w) * (q.conj().T @ fmat.flatten(order="F")))
    return x.reshape((na, nb), order="F")


def _rand_hermitian(rng: np.random.Generator, m: int, lo: float, hi: float,
                    complex_: bool) -> np.ndarray:
    if complex_:
        g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    else:
        g = rng.standard_normal((m, m))
    q = np.linalg.qr(g)[0]
    w = rng.uniform(lo, hi, m)
    return q @ np.diag(w) @ q.conj().T


def _crit_funm_diag() -> tuple[bool, str]:
    rng = np.random.default_rng(99)
    fs = [catalog_function("inverse"), catalog_function("power", -0.5),
          catalog_function("phi", 1)]
    worst = 0.0
    for trial in range(20):
        ma, mb = int(rng.integers(3, 7)), int(rng.integers(3, 7))
        cplx = bool(trial % 3 == 2)
        a = _rand_hermitian(rng, ma, 1.0, 3.0, cplx)
        b = _rand_hermitian(rng, mb, -3.0, -1.0, cplx)
        fmat = rng.standard_normal((ma, mb))
        f = fs[trial % 3]
        got = funm_diag(f, a, b, fmat)
        want = _brute_force_kron(f, a, b, fmat)
        rel = np.linalg.norm(got - want) / np.linalg.norm(want)
        worst = max(worst, float(rel))
    ok = worst <= 1e-10
    return ok, f"20 random pairs, max relative error {worst:.2e} <= 1e-10"


# --------------------------------------------------------------------------
# 7/8. Kronecker convergence corollaries


def _kron_fixture(f, n: int = 300, seed: int = 11) -> tuple:
    op = toeplitz_tridiagonal(n, 1.0)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n, 1))
    u /= np.linalg.norm(u)
    w = rng.standard_normal((n, 1))
    w /= np.linalg.norm(w)
    prob = KroneckerProblem(op, op, u, w, f, op.exact_interval())
    return prob, dense_kron_solution(prob)


def _crit_kron_cauchy() -> tuple[bool, str]:
    f = catalog_function("power", -0.5)
    prob, x_ref = _kron_fixture(f)
    iv = prob.interval
    fnorm = prob.rhs_norm2()
    errs = []
    for ell in range(1, 21):
        psi, xi = cauchy_kron_poles(iv, ell)
        res = kron_fun(prob, psi, xi)
        err = float(np.linalg.norm(res.materialize() - x_ref, ord=2))
        bnd = kron_cauchy_bound(f, iv, ell, fnorm)
        if not err <= bnd:
            return False, f"error {err:.3e} > bound {bnd:.3e} at ell={ell}"
        errs.append(err)
    # Two-sided projection realizes the predicted rate itself (no Galerkin
    # doubling: each factor contributes its denominator once), so the
    # measured slope must match log rho within 25% in both directions.
    target = math.log(rate_rho(iv.lower, 2.0 * iv.upper))
    slope = _fit_slope(range(1, 21), errs,
                       floor=1e-12 * float(np.linalg.norm(x_ref, ord=2)))
    dev = abs(slope - target) / abs(target)
    ok = dev <= 0.25
    return ok, (f"error <= bound for ell=1..20; slope {slope:.4f} vs "
                f"log rho {target:.4f} (dev {dev:.1%} <= 25%)")


def _crit_kron_laplace() -> tuple[bool, str]:
    from .poles import laplace_kron_poles

    f = catalog_function("phi", 1)
    prob, x_ref = _kron_fixture(f)
    iv = prob.interval
    fnorm = prob.rhs_norm2()
    worst = 0.0
    for ell in range(1, 21):
        psi, xi = laplace_kron_poles(iv, ell)
        res = kron_fun(prob, psi, xi)
        err = float(np.linalg.norm(res.materialize() - x_ref, ord=2))
        bnd = kron_laplace_bound(f, iv, ell, fnorm)
        if not err <= bnd:
            return False, f"error {err:.3e} > bound {bnd:.3e} at ell={ell}"
        worst = max(worst, err / bnd)
    return True, f"error <= bound for ell=1..20 (max error/bound {worst:.2e})"


# --------------------------------------------------------------------------
# 9. Sylvester residual bound


def _crit_sylvester() -> tuple[bool, str]:
    f = catalog_function("inverse")
    prob, _ = _kron_fixture(f, n=200, seed=3)
    iv = prob.interval
    fnorm = prob.rhs_norm2()
    worst = 0.0
    for ell in range(1, 16):
        psi = zolotarev_poles(iv, ell)
        xi = [-p for p in psi.poles]
        res = kron_fun(prob, list(psi.poles), xi)
        resid = sylvester_residual(prob, res)
        bnd = sylvester_residual_bound(iv, ell, fnorm)
        if not resid <= bnd:
            return False, f"residual {resid:.3e} > bound {bnd:.3e} at ell={ell}"
        worst = max(worst, resid / bnd)
    return True, f"residual <= (1+kappa) 4 rho^ell ||F|| for ell=1..15 (max ratio {worst:.2e})"


# --------------------------------------------------------------------------
# 10. singular-value decay of the exact solution


def _crit_singular_decay() -> tuple[bool, str]:
    worst = 0.0
    for f, variant in ((catalog_function("power", -0.5), "cauchy"),
                       (catalog_function("phi", 1), "laplace")):
        prob, _ = _kron_fixture(f)
        rows = singular_decay_report(prob, range(1, 26), variant)
        for ell, sigma, bnd in rows:
            if not sigma <= bnd:
                return False, (f"{variant}: sigma_(1+{ell}k) = {sigma:.3e} > "
                               f"bound {bnd:.3e}")
            if bnd > 0:
                worst = max(worst, sigma / bnd)
    return True, f"both function classes dominated at all indices (max ratio {worst:.2e})"


# --------------------------------------------------------------------------
# 11. equidistributed sequence validity and rate parity


def _crit_eds() -> tuple[bool, str]:
    worst = 0.0
    for ap in (1e-2, 1e-4):
        state = eds_start(ap)
        for j in range(1, 31):
            sig, state = eds_next(state)
            s = math.modf(j * EdsState.ZETA)[0]
            gap = abs(_eds_g(sig * sig, ap, state.norm_const) - s)
            worst = max(worst, gap)
    if worst > 1e-10:
        return False, f"|g(t_j) - s_j| = {worst:.2e} > 1e-10"
    # "Same asymptotic rate": the nested sequence must realize the rate the
    # per-ell optimal pole sets guarantee, log rho_[a,4b], two-sided.  (The
    # rebuilt optimal sets themselves over-deliver via Galerkin doubling,
    # so the guaranteed rate -- not their measured slope -- is the anchor.)
    op = toeplitz_tridiagonal(2000, 1.0)
    f = catalog_function("power", -0.5)
    iv, oracle, rows_e = _sweep_fixture(op, f, "eds-cauchy", range(1, 31))
    target = math.log(rate_rho(iv.lower, 4.0 * iv.upper))
    slope_e = _fit_slope([r.ell for r in rows_e],
                         [r.true_error for r in rows_e],
                         floor=1e-12 * float(np.linalg.norm(oracle)))
    dev = abs(slope_e - target) / abs(target)
    ok = dev <= 0.30
    return ok, (f"inversion gap {worst:.1e} <= 1e-10; EDS slope {slope_e:.4f} "
                f"vs guaranteed rate {target:.4f} (dev {dev:.1%} <= 30%)")


# --------------------------------------------------------------------------
# runner

CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]], float]] = [
    (1, "Galerkin exactness", _crit_exactness, 10.0),
    (2, "extremal rational ratio", _crit_zolotarev, 5.0),
    (3, "inverse-sqrt 1D bound + rate", _crit_cauchy_1d, 60.0),
    (4, "phi1 diffusion 1D bound", _crit_laplace_1d, 60.0),
    (5, "100k iteration counts", _crit_table_times, 600.0),
    (6, "compressed core vs brute force", _crit_funm_diag, 5.0),
    (7, "Kronecker inverse-sqrt bound + rate", _crit_kron_cauchy, 120.0),
    (8, "Kronecker phi1 bound", _crit_kron_laplace, 120.0),
    (9, "Sylvester residual bound", _crit_sylvester, 30.0),
    (10, "singular-value decay", _crit_singular_decay, 60.0),
    (11, "equidistributed sequence", _crit_eds, 30.0),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn, budget in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # honest red: report, never mask
                passed = False
                detail = f"raised {type(exc).__name__}: {exc}"
            return CriterionResult(num, name, passed, detail,
                                   time.perf_counter() - t0, budget)
    raise ValueError(f"no criterion numbered {number}")


def run_acceptance(numbers: Sequence[int] | None = None,
                   stream: TextIO | None = None) -> bool:
    if stream is None:  # resolved per call so redirection works
        stream = sys.stdout
    known = {num for num, *_ in CRITERIA}
    wanted = set(numbers) if numbers else known
    if not wanted <= known:
        raise ValueError(
            f"unknown criterion number(s): {sorted(wanted - known)}")
    ok = True
    for num, *_ in CRITERIA:
        if num not in wanted:
            continue
        result = run_criterion(num)
        print(result.line(), file=stream, flush=True)
        ok = ok and result.passed and result.in_budget
    return ok
