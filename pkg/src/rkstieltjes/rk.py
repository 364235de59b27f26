"""Block rational Arnoldi bases and the matrix-function driver.

The decomposition object owns the orthonormal basis U of
span{ q(A)^-1 [v, Av, ..., A^(l-1) v] } together with the projected
quantities U*AU and U*v, grown one pole at a time.  Infinite poles
contribute a multiplication step, finite poles a shifted solve, so the
classical polynomial and extended spaces are the special cases with all
poles at infinity resp. alternating infinity / zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .bounds import strategy_bound
from .functions import StieltjesFunction
from .operators import HermitianOperator, SpectralInterval
from .poles import (
    PoleSequence,
    cauchy_poles,
    eds_pole_iter,
    extended_poles,
    polynomial_poles,
    zolotarev_poles,
)

__all__ = [
    "DEFLATION_TOL",
    "RKDecomposition",
    "rk_build",
    "rk_funv",
    "ExactnessReport",
    "exactness_check",
    "FunvTraceRow",
    "FunvResult",
    "funv_driver",
    "NESTED_STRATEGIES",
    "FIXED_STRATEGIES",
]

DEFLATION_TOL = 1e-12

# Strategies whose pole streams are nested (extend step by step) versus
# those whose optimal pole set depends on the target count (regenerate at
# checkpoints when running adaptively).
NESTED_STRATEGIES = ("eds-laplace", "eds-cauchy", "extended", "polynomial", "custom")
FIXED_STRATEGIES = ("zolotarev", "cauchy")


def _as_block(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim == 1:
        return v[:, None]
    if v.ndim == 2:
        return v
    raise ValueError("seed must be a vector or an (n, k) block")


class RKDecomposition:
    """Growing orthonormal basis of a rational Krylov space.

    Attributes of interest: ``basis`` (n x m, orthonormal columns),
    ``poles_used`` (one entry per consumed pole), ``breakdown`` (the last
    candidate block deflated away completely, i.e. the space became
    A-invariant and every further iterate is exact).
    """

    def __init__(self, op: HermitianOperator, v: np.ndarray,
                 deflation_tol: float = DEFLATION_TOL):
        block = _as_block(v)
        if block.shape[0] != op.n:
            raise ValueError(
                f"seed has {block.shape[0]} rows, operator order is {op.n}")
        self.op = op
        self.seed_ndim = np.asarray(v).ndim
        self.block_width = block.shape[1]
        self.deflation_tol = float(deflation_tol)
        self.seed_norm = float(np.linalg.norm(block))
        if self.seed_norm == 0.0:
            raise ValueError("seed block is zero")

        n = op.n
        dtype = np.complex128 if np.iscomplexobj(block) else np.float64
        self._u = np.zeros((n, 0), dtype=dtype, order="F")
        self._h = np.zeros((0, 0), dtype=dtype)
        self._rhs = np.zeros((0, self.block_width), dtype=dtype)
        self._block_sizes: list[int] = []
        self.poles_used: list[complex] = []
        self.breakdown = False

        self._seed_cache = block.astype(dtype, copy=True)
        kept = self._append_block(self._seed_cache)
        if kept == 0:  # pragma: no cover - zero norm is caught above
            raise ValueError("seed block deflated away entirely")

    # -- geometry ---------------------------------------------------------

    @property
    def order(self) -> int:
        return self.op.n

    @property
    def dim(self) -> int:
        """Number of orthonormal basis vectors accumulated so far."""
        return self._u.shape[1]

    @property
    def basis(self) -> np.ndarray:
        return self._u

    @property
    def last_block(self) -> np.ndarray:
        w = self._block_sizes[-1]
        return self._u[:, self._u.shape[1] - w:]

    def reduced_matrix(self) -> np.ndarray:
        """Projection U*AU, symmetrized to kill roundoff skew."""
        h = self._h
        return 0.5 * (h + h.conj().T)

    def reduced_seed(self) -> np.ndarray:
        """Projection U*v of the seed block (m x k)."""
        return self._rhs

    # -- growth -----------------------------------------------------------

    def _promote_complex(self) -> None:
        if not np.iscomplexobj(self._u):
            self._u = self._u.astype(np.complex128)
            self._h = self._h.astype(np.complex128)
            self._rhs = self._rhs.astype(np.complex128)

    def _orthonormalize(self, cand: np.ndarray) -> np.ndarray:
        """Two-pass block Gram-Schmidt against the basis, then a
        column-by-column pass inside the block with rank-revealing
        deflation (drop when the surviving norm is below tol times the
        column's incoming norm)."""
        u = self._u
        pre = np.linalg.norm(cand, axis=0)
        for _ in range(2):
            if u.shape[1]:
                cand = cand - u @ (u.conj().T @ cand)
        kept: list[np.ndarray] = []
        for j in range(cand.shape[1]):
            w = cand[:, j]
            for _ in range(2):
                for q in kept:
                    w = w - q * (q.conj() @ w)
            nrm = np.linalg.norm(w)
            if nrm <= self.deflation_tol * max(pre[j], self.seed_norm * 1e-300):
                continue
            kept.append(w / nrm)
        if not kept:
            return np.zeros((cand.shape[0], 0), dtype=cand.dtype)
        return np.column_stack(kept)

    def _append_block(self, cand: np.ndarray) -> int:
        block = self._orthonormalize(cand)
        width = block.shape[1]
        if width == 0:
            return 0
        m = self._u.shape[1]
        aw = self.op.matvec(block)
        cross = self._u.conj().T @ aw if m else np.zeros((0, width), dtype=block.dtype)
        corner = block.conj().T @ aw

        h = np.zeros((m + width, m + width), dtype=np.result_type(self._h, block))
        h[:m, :m] = self._h
        h[:m, m:] = cross
        h[m:, :m] = cross.conj().T
        h[m:, m:] = corner
        self._h = h
        self._u = np.hstack([self._u, block])
        # Later blocks are orthogonal to the seed only up to roundoff;
        # project exactly rather than padding with zeros.
        self._rhs = self._u.conj().T @ self._seed_cache
        self._block_sizes.append(width)
        return width

    def extend(self, poles: Iterable[complex]) -> "RKDecomposition":
        """Consume poles (inf for a multiplication step) until the list is
        exhausted or the space becomes invariant.

        Refuses to grow a decomposition already flagged by total deflation;
        an empty pole list is a no-op either way.
        """
        if isinstance(poles, PoleSequence):
            poles = poles.poles
        poles = list(poles)
        if poles and self.breakdown:
            raise RuntimeError(
                "decomposition was closed by total deflation (invariant "
                "subspace reached); it cannot be extended")
        for sigma in poles:
            if self.breakdown:
                break
            sigma = complex(sigma)
            if sigma.imag == 0.0:
                sigma = sigma.real
            elif not np.iscomplexobj(self._u):
                self._promote_complex()
            prev = self.last_block
            if isinstance(sigma, float) and math.isinf(sigma):
                cand = self.op.matvec(prev)
            else:
                cand = self.op.shifted_solve(sigma, prev)
            kept = self._append_block(np.asarray(cand, dtype=self._u.dtype))
            self.poles_used.append(sigma)
            if kept == 0:
                self.breakdown = True
        return self


def rk_build(op: HermitianOperator, v: np.ndarray, poles,
             deflation_tol: float = DEFLATION_TOL) -> RKDecomposition:
    """Build the rational Krylov basis of (op, v) for the given poles."""
    dec = RKDecomposition(op, v, deflation_tol=deflation_tol)
    dec.extend(poles)
    return dec


def rk_extend(dec: RKDecomposition, more) -> RKDecomposition:
    """Continue the recurrence with more poles; equivalent (to rounding)
    to a fresh build with the concatenated pole list."""
    return dec.extend(more)


def rk_funv(dec: RKDecomposition, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Galerkin extraction x = U f(U*AU) U*v, matching the seed's shape."""
    h = dec.reduced_matrix()
    w, q = np.linalg.eigh(h)
    coeff = q.conj().T @ dec.reduced_seed()
    y = q @ (np.asarray(f(w))[:, None] * coeff)
    x = dec.basis @ y
    if dec.seed_ndim == 1:
        return x[:, 0]
    return x


# -- exactness ------------------------------------------------------------


@dataclass(frozen=True)
class ExactnessReport:
    """Relative errors of rational functions the space must reproduce
    exactly (up to roundoff)."""

    members: dict
    max_rel_err: float

    def worst(self) -> str:
        label = max(self.members, key=self.members.get)
        return f"{label}: {self.members[label]:.3e}"


def _rel_err(x: np.ndarray, ref: np.ndarray) -> float:
    denom = np.linalg.norm(ref)
    if denom == 0.0:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x - ref) / denom)


def _fmt_pole(sigma) -> str:
    if isinstance(sigma, complex):
        return f"{sigma.real:g}{sigma.imag:+g}j"
    return f"{sigma:g}"


def exactness_check(op: HermitianOperator, v: np.ndarray, poles,
                    max_pairs: int = 12) -> ExactnessReport:
    """Verify the Galerkin extraction reproduces resolvents at the chosen
    poles, products of two resolvent factors, and the monomials unlocked
    by infinite poles.

    Each member r is evaluated two ways: exactly via shifted solves /
    matvecs on the full operator, and through the reduced problem; the
    space built with those poles must make the two agree.
    """
    if isinstance(poles, PoleSequence):
        poles = list(poles.poles)
    else:
        poles = list(poles)
    dec = rk_build(op, v, poles)
    block = _as_block(np.asarray(v, dtype=dec.basis.dtype))

    h = dec.reduced_matrix()
    w, q = np.linalg.eigh(h)
    coeff = q.conj().T @ dec.reduced_seed()

    def reduced(fvals: np.ndarray) -> np.ndarray:
        return dec.basis @ (q @ (fvals[:, None] * coeff))

    members: dict = {}

    finite = [s for s in poles if not (isinstance(s, float) and math.isinf(s))]
    n_inf = len(poles) - len(finite)

    for sigma in dict.fromkeys(finite):  # distinct, order-preserving
        ref = op.shifted_solve(sigma, block)
        got = reduced(1.0 / (w - sigma))
        members[f"resolvent(sigma={_fmt_pole(sigma)})"] = _rel_err(got, ref)

    pair_count = 0
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if pair_count >= max_pairs:
                break
            si, sj = finite[i], finite[j]
            ref = op.shifted_solve(si, op.shifted_solve(sj, block))
            got = reduced(1.0 / ((w - si) * (w - sj)))
            members[f"product(sigma={_fmt_pole(si)},{_fmt_pole(sj)})"] = _rel_err(got, ref)
            pair_count += 1

    ref = block
    for p in range(n_inf + 1):
        got = reduced(w ** float(p))
        members[f"monomial(z^{p})"] = _rel_err(got, ref)
        if p < n_inf:
            ref = op.matvec(ref)

    worst = max(members.values()) if members else 0.0
    return ExactnessReport(members=members, max_rel_err=worst)


# -- driver ---------------------------------------------------------------


@dataclass(frozen=True)
class FunvTraceRow:
    """One convergence-trace entry: pole count, lag-2 estimate, true error
    against an oracle when available (nan otherwise), a-priori bound (nan
    when no certificate covers the strategy)."""

    ell: int
    est_error: float
    true_error: float
    bound: float


@dataclass(frozen=True)
class FunvResult:
    x: np.ndarray
    trace: tuple
    converged: bool
    strategy: str
    poles_used: tuple

    @property
    def ell(self) -> int:
        return self.trace[-1].ell if self.trace else 0


def _inf_stream() -> Iterator[float]:
    while True:
        yield math.inf


def _extended_stream() -> Iterator[float]:
    while True:
        yield math.inf
        yield 0.0


def _pole_stream(strategy: str, interval: SpectralInterval,
                 custom_poles: Sequence[complex] | None) -> Iterator[complex]:
    if strategy == "eds-laplace":
        return eds_pole_iter(interval, variant="laplace")
    if strategy == "eds-cauchy":
        return eds_pole_iter(interval, variant="cauchy")
    if strategy == "extended":
        return _extended_stream()
    if strategy == "polynomial":
        return _inf_stream()
    if strategy == "custom":
        if custom_poles is None:
            raise ValueError("strategy 'custom' needs custom_poles")
        return iter(list(custom_poles))
    raise ValueError(f"strategy {strategy!r} has no nested pole stream")


def _fixed_pole_set(strategy: str, interval: SpectralInterval, ell: int):
    if strategy == "zolotarev":
        return zolotarev_poles(interval, ell)
    if strategy == "cauchy":
        return cauchy_poles(interval, ell)
    raise ValueError(f"strategy {strategy!r} has no fixed pole set")


def _materialize_poles(strategy: str, interval: SpectralInterval, ell: int,
                       custom_poles: Sequence[complex] | None) -> list[complex]:
    if strategy in FIXED_STRATEGIES:
        return list(_fixed_pole_set(strategy, interval, ell).poles)
    stream = _pole_stream(strategy, interval, custom_poles)
    out = []
    for _ in range(ell):
        try:
            out.append(next(stream))
        except StopIteration:
            break
    return out


def funv_driver(op: HermitianOperator, f: StieltjesFunction, v: np.ndarray,
                interval, strategy: str = "zolotarev",
                tol: float | None = None, ell: int | None = None,
                max_ell: int = 80, oracle: np.ndarray | None = None,
                custom_poles: Sequence[complex] | None = None,
                checkpoint_stride: int = 4,
                conjectured_gamma: bool = False) -> FunvResult:
    """Approximate f(A)v to a relative tolerance or at a fixed pole count.

    Exactly one of ``tol`` / ``ell`` picks the mode.  In tolerance mode the
    error estimate is the relative distance between the current iterate and
    the one two trace entries back; nested strategies add one pole per
    entry, while the interval-optimal families (zolotarev/cauchy) are
    regenerated from scratch at pole counts ``checkpoint_stride, 2*...``.
    ``oracle`` (a reference solution) fills the true-error column.
    """
    if (tol is None) == (ell is None):
        raise ValueError("pass exactly one of tol= or ell=")
    if isinstance(interval, SpectralInterval):
        iv = interval.require_positive()
    else:
        iv = SpectralInterval(float(interval[0]), float(interval[1])).require_positive()

    known = FIXED_STRATEGIES + NESTED_STRATEGIES
    if strategy not in known:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {known}")

    block = _as_block(v)
    vnorm = float(np.linalg.norm(block))

    def true_err(x: np.ndarray) -> float:
        if oracle is None:
            return math.nan
        return _rel_err(_as_block(x), _as_block(np.asarray(oracle)))

    def bound_at(count: int) -> float:
        return strategy_bound(strategy, f, iv, count, vnorm,
                              conjectured_gamma=conjectured_gamma)

    trace: list[FunvTraceRow] = []

    if ell is not None:
        poles = _materialize_poles(strategy, iv, ell, custom_poles)
        dec = rk_build(op, v, poles)
        x = rk_funv(dec, f)
        trace.append(FunvTraceRow(len(dec.poles_used), math.nan, true_err(x),
                                  bound_at(len(dec.poles_used))))
        return FunvResult(x=x, trace=tuple(trace), converged=True,
                          strategy=strategy, poles_used=tuple(dec.poles_used))

    history: list[np.ndarray] = []

    def record(x: np.ndarray, count: int) -> float:
        if len(history) >= 2:
            ref = history[-2]
            num = float(np.linalg.norm(_as_block(x) - _as_block(ref)))
            den = float(np.linalg.norm(x))
            est = num / den if den > 0.0 else 0.0
        else:
            est = math.inf
        history.append(np.array(x, copy=True))
        trace.append(FunvTraceRow(count, est, true_err(x), bound_at(count)))
        return est

    if strategy in NESTED_STRATEGIES:
        stream = _pole_stream(strategy, iv, custom_poles)
        dec = RKDecomposition(op, v)
        converged = False
        while len(dec.poles_used) < max_ell:
            try:
                sigma = next(stream)
            except StopIteration:
                break
            dec.extend([sigma])
            x = rk_funv(dec, f)
            est = record(x, len(dec.poles_used))
            if dec.breakdown:
                converged = True
                break
            if est <= tol:
                converged = True
                break
        return FunvResult(x=history[-1], trace=tuple(trace), converged=converged,
                          strategy=strategy,
                          poles_used=tuple(dec.poles_used))

    # Interval-optimal families: rebuild at checkpoint counts.
    converged = False
    poles_used: tuple = ()
    count = 0
    while count < max_ell:
        count = min(count + checkpoint_stride, max_ell)
        poleset = _fixed_pole_set(strategy, iv, count)
        dec = rk_build(op, v, poleset)
        x = rk_funv(dec, f)
        est = record(x, len(dec.poles_used))
        poles_used = tuple(dec.poles_used)
        if dec.breakdown or est <= tol:
            converged = True
            break
    return FunvResult(x=history[-1], trace=tuple(trace), converged=converged,
                      strategy=strategy, poles_used=poles_used)


def error_sweep(op: HermitianOperator, f: StieltjesFunction, v: np.ndarray,
                interval, strategy: str, ells: Sequence[int],
                oracle: np.ndarray, custom_poles: Sequence[complex] | None = None,
                conjectured_gamma: bool = False,
                bound_shift: float = 0.0) -> list[FunvTraceRow]:
    """Absolute-error curve over the given pole counts, for experiment
    tables.  true_error is ||x_exact - x_ell||_2 (the bounds are absolute,
    so domination can be read off row by row).

    Nested strategies grow one decomposition incrementally; fixed families
    rebuild per count.  The oracle is required: this is the measurement
    harness, not the adaptive driver.  ``bound_shift`` > 0 evaluates the
    bound column for the right-shifted function on the left-shifted
    interval -- the finite-anchor workaround when f(0+) diverges.
    """
    if isinstance(interval, SpectralInterval):
        iv = interval.require_positive()
    else:
        iv = SpectralInterval(float(interval[0]), float(interval[1])).require_positive()
    ref = _as_block(np.asarray(oracle))
    vnorm = float(np.linalg.norm(_as_block(v)))

    f_b, iv_b = f, iv
    if bound_shift:
        f_b = f.with_shift(bound_shift)
        iv_b = iv.shifted(-bound_shift).require_positive()

    def bound_at(count: int) -> float:
        return strategy_bound(strategy, f_b, iv_b, count, vnorm,
                              conjectured_gamma=conjectured_gamma)

    rows: list[FunvTraceRow] = []
    ells = sorted(set(int(e) for e in ells))
    if strategy in NESTED_STRATEGIES:
        stream = _pole_stream(strategy, iv, custom_poles)
        dec = RKDecomposition(op, v)
        for target in ells:
            while len(dec.poles_used) < target and not dec.breakdown:
                dec.extend([next(stream)])
            x = rk_funv(dec, f)
            err = float(np.linalg.norm(_as_block(x) - ref))
            rows.append(FunvTraceRow(len(dec.poles_used), math.nan, err,
                                     bound_at(len(dec.poles_used))))
            if dec.breakdown:
                break
    else:
        for target in ells:
            dec = rk_build(op, v, _fixed_pole_set(strategy, iv, target))
            x = rk_funv(dec, f)
            err = float(np.linalg.norm(_as_block(x) - ref))
            rows.append(FunvTraceRow(len(dec.poles_used), math.nan, err,
                                     bound_at(len(dec.poles_used))))
    return rows
