"""Operator representations and the core numerical kernels.

Operators are immutable structural descriptions: dense complex blocks,
weighted shifts given by their ratio lists, direct sums, and unimodular
scalar rotations of an inner operator.  Vectors are plain 1-D numpy
arrays.  All kernels are pure functions of their inputs and safe to call
concurrently.

Matrix convention, used everywhere: entry (i, j) is the e_i coefficient
of op(e_j), i.e. columns hold images of basis vectors.  A forward shift
with ratios (r_1, .., r_{d-1}) maps e_j to r_j * e_{j+1} and e_d to 0,
so it materializes with the ratios on the subdiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConvergenceError, DimensionError, SingularError, SizeError, ValidationError

#: Deterministic seed for every iterative kernel.
SEED = 0x5EED

#: Largest dimension materialized as a dense matrix.
DENSE_CAP = 4096

#: Largest dimension at which a dense SVD cross-checks iterative estimates.
SVD_CAP = 512

_UNIMODULAR_TOL = 1e-12


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WeightSequence:
    """Finite positive weight vector w_1..w_d defining a shift.

    When built from the ramp construction the provenance (``eta``, ``n``)
    is recorded and the anchor values w_1 = 1, w_N = w_{N+1} = N**eta and
    w_{2N} = N**(2*eta) are enforced to 1e-12 relative.
    """

    values: np.ndarray
    eta: float | None = None
    n: int | None = None

    def __post_init__(self):
        vals = _frozen_array(self.values, float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 1:
            raise ValidationError("weights must form a non-empty 1-D vector")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValidationError("weights must be positive and finite")
        if (self.eta is None) != (self.n is None):
            raise ValidationError("provenance requires both eta and n")
        if self.n is not None:
            n = int(self.n)
            if n < 1 or vals.size != 2 * n:
                raise ValidationError("provenance dimension must equal 2*n")
            anchors = (
                (vals[0], 1.0),
                (vals[n - 1], float(n) ** self.eta),
                (vals[n], float(n) ** self.eta),
                (vals[2 * n - 1], float(n) ** (2 * self.eta)),
            )
            for got, want in anchors:
                if abs(got - want) > 1e-12 * abs(want):
                    raise ValidationError("weight anchors do not match provenance")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Dense:
    """Explicit complex matrix operator."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_array(self.matrix, complex)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValidationError("dense operator requires a square matrix")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("dense operator entries must be finite")


@dataclass(frozen=True)
class WeightedShift:
    """Weighted shift given by the successive weight ratios w_{j+1}/w_j.

    ``forward`` maps e_j to ratios[j-1] * e_{j+1}, ``backward`` is its
    adjoint and maps e_{j+1} to ratios[j-1] * e_j.
    """

    direction: str
    ratios: np.ndarray
    weights: WeightSequence | None = None

    def __post_init__(self):
        if self.direction not in ("forward", "backward"):
            raise ValidationError("direction must be 'forward' or 'backward'")
        ratios = _frozen_array(self.ratios, float)
        object.__setattr__(self, "ratios", ratios)
        if ratios.ndim != 1 or ratios.size < 1:
            raise ValidationError("ratio list must be a non-empty 1-D vector")
        if not np.all(np.isfinite(ratios)) or np.any(ratios <= 0):
            raise ValidationError("shift ratios must be strictly positive and finite")
        if self.weights is not None:
            w = self.weights.values
            if w.size != ratios.size + 1:
                raise ValidationError("weight sequence length must be dimension")
            derived = w[1:] / w[:-1]
            if np.max(np.abs(derived - ratios)) > 1e-12 * np.max(ratios):
                raise ValidationError("ratios inconsistent with weight sequence")


@dataclass(frozen=True)
class DirectSum:
    """Block-diagonal direct sum of operator summands."""

    summands: tuple

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if not self.summands:
            raise ValidationError("direct sum requires at least one summand")


@dataclass(frozen=True)
class RotatedScale:
    """Unimodular scalar multiple of an inner operator."""

    scalar: complex
    inner: "OperatorSpec"

    def __post_init__(self):
        lam = complex(self.scalar)
        object.__setattr__(self, "scalar", lam)
        if abs(abs(lam) - 1.0) > _UNIMODULAR_TOL:
            raise ValidationError("rotation scalar must be unimodular")


OperatorSpec = Union[Dense, WeightedShift, DirectSum, RotatedScale]


@dataclass(frozen=True)
class NormEstimate:
    """A spectral-norm value together with how it was obtained."""

    value: float
    method: str  # "closed-form" | "power-iteration" | "dense-svd-oracle"
    residual: float
    iterations: int

    def __post_init__(self):
        if self.value < 0:
            raise ValidationError("norm estimates are non-negative")


@dataclass(frozen=True)
class NormSeries:
    """Power-norm sequence (k, ||T^k||) with per-k method tags."""

    k: np.ndarray
    values: np.ndarray
    methods: tuple
    residuals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _frozen_array(self.k, int))
        object.__setattr__(self, "values", _frozen_array(self.values, float))
        object.__setattr__(self, "residuals", _frozen_array(self.residuals, float))
        object.__setattr__(self, "methods", tuple(self.methods))


def dimension(op: OperatorSpec) -> int:
    if isinstance(op, Dense):
        return op.matrix.shape[0]
    if isinstance(op, WeightedShift):
        return op.ratios.size + 1
    if isinstance(op, DirectSum):
        return sum(dimension(s) for s in op.summands)
    if isinstance(op, RotatedScale):
        return dimension(op.inner)
    raise TypeError(f"not an operator spec: {type(op)!r}")


def is_shift_like(op: OperatorSpec) -> bool:
    """True when op is unitarily equivalent to all its unimodular rotations.

    Holds for weighted shifts, direct sums of shift-like operators, and
    rotations thereof: conjugating by the diagonal unitary diag(lam**j)
    turns lam*op back into op and leaves every norm unchanged.
    """
    if isinstance(op, WeightedShift):
        return True
    if isinstance(op, DirectSum):
        return all(is_shift_like(s) for s in op.summands)
    if isinstance(op, RotatedScale):
        return is_shift_like(op.inner)
    return False


def adjoint(op: OperatorSpec) -> OperatorSpec:
    """Structural adjoint: conjugate transpose action as a new spec."""
    if isinstance(op, Dense):
        return Dense(op.matrix.conj().T)
    if isinstance(op, WeightedShift):
        flipped = "backward" if op.direction == "forward" else "forward"
        return WeightedShift(flipped, op.ratios, op.weights)
    if isinstance(op, DirectSum):
        return DirectSum(tuple(adjoint(s) for s in op.summands))
    if isinstance(op, RotatedScale):
        return RotatedScale(np.conj(op.scalar), adjoint(op.inner))
    raise TypeError(f"not an operator spec: {type(op)!r}")


def _check_dim(op: OperatorSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.size != dimension(op):
        raise DimensionError(
            f"vector of size {x.size} does not match operator dimension {dimension(op)}"
        )
    return x.astype(complex, copy=False)


def apply(op: OperatorSpec, x: np.ndarray) -> np.ndarray:
    """Return op @ x.  O(d) for shifts, blockwise for direct sums."""
    x = _check_dim(op, x)
    if isinstance(op, Dense):
        return op.matrix @ x
    if isinstance(op, WeightedShift):
        y = np.zeros_like(x)
        if op.direction == "forward":
            y[1:] = op.ratios * x[:-1]
        else:
            y[:-1] = op.ratios * x[1:]
        return y
    if isinstance(op, DirectSum):
        parts = []
        offset = 0
        for s in op.summands:
            d = dimension(s)
            parts.append(apply(s, x[offset : offset + d]))
            offset += d
        return np.concatenate(parts)
    if isinstance(op, RotatedScale):
        return op.scalar * apply(op.inner, x)
    raise TypeError(f"not an operator spec: {type(op)!r}")


def apply_adjoint(op: OperatorSpec, x: np.ndarray) -> np.ndarray:
    """Return op* @ x, the conjugate-transpose action."""
    return apply(adjoint(op), x)


def materialize(op: OperatorSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit complex matrix of op, exact for structured variants."""
    d = dimension(op)
    if d > cap:
        raise SizeError(f"dimension {d} exceeds dense cap {cap}")
    if isinstance(op, Dense):
        return op.matrix.copy()
    if isinstance(op, WeightedShift):
        mat = np.zeros((d, d), dtype=complex)
        idx = np.arange(d - 1)
        if op.direction == "forward":
            mat[idx + 1, idx] = op.ratios
        else:
            mat[idx, idx + 1] = op.ratios
        return mat
    if isinstance(op, DirectSum):
        mat = np.zeros((d, d), dtype=complex)
        offset = 0
        for s in op.summands:
            ds = dimension(s)
            mat[offset : offset + ds, offset : offset + ds] = materialize(s, cap)
            offset += ds
        return mat
    if isinstance(op, RotatedScale):
        return op.scalar * materialize(op.inner, cap)
    raise TypeError(f"not an operator spec: {type(op)!r}")


def _compact(mat: np.ndarray) -> np.ndarray:
    # Real matrices power and decompose ~3x faster than complex ones.
    if np.iscomplexobj(mat) and not mat.imag.any():
        return np.ascontiguousarray(mat.real)
    return mat


_STALL_WINDOW = 300


def _power_iteration(matvec, matvec_adj, d, tol, max_iter, seed, real_start=False):
    """Largest singular value via power iteration on A* A.

    Deterministic seeded start, Rayleigh-quotient residual stopping:
    stop when ||A*A v - rho v|| <= tol * rho with v the current unit
    iterate and rho its Rayleigh quotient.  When the residual stops
    improving for _STALL_WINDOW iterations (clustered top singular
    values), the iteration reports non-convergence early instead of
    burning the full budget; the value estimate is still the best seen.

    A real start vector is used for real matrices (A.T A is then real
    symmetric and its top eigenvector real), which avoids promoting the
    matrix to complex on every product.
    """
    rng = np.random.default_rng(seed)
    if real_start:
        v = rng.standard_normal(d)
    else:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    best = 0.0
    best_res = np.inf
    last_gain = 0
    for it in range(1, max_iter + 1):
        w = matvec_adj(matvec(v))
        rho = float(np.real(np.vdot(v, w)))
        if rho <= 0.0:
            # A*A v vanished for a generic start vector: norm is zero.
            return 0.0, 0.0, it, True
        res = float(np.linalg.norm(w - rho * v)) / rho
        if res < 0.99 * best_res:
            last_gain = it
        if res < best_res:
            best = float(np.sqrt(rho))
            best_res = res
        if res <= tol:
            return float(np.sqrt(rho)), res, it, True
        if it - last_gain >= _STALL_WINDOW:
            break
        v = w / np.linalg.norm(w)
    return best, best_res, it, False


def _matrix_norm(mat: np.ndarray, tol: float, max_iter: int, seed: int, svd_cap: int) -> NormEstimate:
    """Spectral norm of an explicit matrix, SVD-checked below svd_cap."""
    mat = _compact(mat)
    d = mat.shape[0]
    value, res, iters, ok = _power_iteration(
        lambda v: mat @ v, lambda v: mat.conj().T @ v, d, tol, max_iter, seed,
        real_start=not np.iscomplexobj(mat),
    )
    if d <= svd_cap:
        sigma = float(np.linalg.svd(mat, compute_uv=False)[0])
        scale = max(sigma, value, 1e-300)
        if not ok or abs(value - sigma) > 1e-8 * scale:
            return NormEstimate(sigma, "dense-svd-oracle", res, iters)
        return NormEstimate(value, "power-iteration", res, iters)
    if not ok:
        raise ConvergenceError(
            f"power iteration stalled at residual {res:.3e} after {iters} iterations",
            best=value,
            residual=res,
            iterations=iters,
        )
    return NormEstimate(value, "power-iteration", res, iters)


def spectral_norm(
    op: OperatorSpec,
    tol: float = 1e-10,
    max_iter: int = 20000,
    seed: int = SEED,
    svd_cap: int = SVD_CAP,
) -> NormEstimate:
    """Largest singular value of op.

    Runs power iteration on op* op from a seeded start vector.  Below
    ``svd_cap`` a dense SVD of the materialized matrix cross-checks the
    estimate and wins on disagreement or non-convergence; above the cap,
    non-convergence raises ConvergenceError carrying the best estimate.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    d = dimension(op)
    value, res, iters, ok = _power_iteration(
        lambda v: apply(op, v), lambda v: apply_adjoint(op, v), d, tol, max_iter, seed
    )
    if d <= svd_cap:
        sigma = float(np.linalg.svd(materialize(op), compute_uv=False)[0])
        scale = max(sigma, value, 1e-300)
        if not ok or abs(value - sigma) > 1e-8 * scale:
            return NormEstimate(sigma, "dense-svd-oracle", res, iters)
        return NormEstimate(value, "power-iteration", res, iters)
    if not ok:
        raise ConvergenceError(
            f"power iteration stalled at residual {res:.3e} after {iters} iterations",
            best=value,
            residual=res,
            iterations=iters,
        )
    return NormEstimate(value, "power-iteration", res, iters)


def _shift_log_weights(op: WeightedShift) -> np.ndarray:
    # Cumulative log weights L with L[0] = 0; window products of ratios
    # become differences, which keeps k-step products stable for any k.
    return np.concatenate(([0.0], np.cumsum(np.log(op.ratios))))


def _shift_power_norms(op: WeightedShift, kmax: int) -> np.ndarray:
    d = op.ratios.size + 1
    logw = _shift_log_weights(op)
    out = np.zeros(kmax)
    for k in range(1, min(kmax, d - 1) + 1):
        out[k - 1] = np.exp(np.max(logw[k:] - logw[:-k]))
    return out


def power_norms(
    op: OperatorSpec,
    kmax: int,
    tol: float = 1e-10,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
    seed: int = SEED,
) -> NormSeries:
    """The sequence ||op**k|| for k = 1..kmax.

    Weighted shifts use the exact closed form: ||S^k|| is the largest
    product of k consecutive ratios (equivalently max_j w_{j+k}/w_j),
    and is 0 once k reaches the dimension.  Direct sums take the sup
    over summands.  Everything else powers the materialized matrix and
    estimates each norm iteratively; a per-k convergence failure raises
    ConvergenceError with the completed prefix attached as ``partial``.
    """
    if kmax < 1:
        raise ValidationError("kmax must be at least 1")
    ks = np.arange(1, kmax + 1)
    if isinstance(op, WeightedShift):
        vals = _shift_power_norms(op, kmax)
        return NormSeries(ks, vals, ("closed-form",) * kmax, np.zeros(kmax))
    if isinstance(op, RotatedScale):
        inner = power_norms(op.inner, kmax, tol, svd_cap, cap, seed)
        return NormSeries(ks, inner.values, inner.methods, inner.residuals)
    if isinstance(op, DirectSum):
        vals = np.zeros(kmax)
        methods = ["closed-form"] * kmax
        residuals = np.zeros(kmax)
        for s in op.summands:
            sub = power_norms(s, kmax, tol, svd_cap, cap, seed)
            take = sub.values > vals
            vals = np.where(take, sub.values, vals)
            for i in range(kmax):
                if take[i]:
                    methods[i] = sub.methods[i]
                    residuals[i] = sub.residuals[i]
        return NormSeries(ks, vals, tuple(methods), residuals)
    mat = _compact(materialize(op, cap))
    power = mat.copy()
    vals = np.zeros(kmax)
    methods = []
    residuals = np.zeros(kmax)
    for i, k in enumerate(ks):
        if k > 1:
            power = power @ mat
        try:
            est = _matrix_norm(power, tol, 20000, seed, svd_cap)
        except ConvergenceError as exc:
            exc.partial = NormSeries(ks[:i], vals[:i], tuple(methods), residuals[:i])
            raise
        vals[i] = est.value
        methods.append(est.method)
        residuals[i] = est.residual
    return NormSeries(ks, vals, tuple(methods), residuals)


def _resolvent_residual_check(op, lam, y, x):
    res = lam * y - apply(op, y) - x
    bound = 1e-10 * max(float(np.linalg.norm(x)), 1e-300)
    return float(np.linalg.norm(res)) <= bound


def resolvent_apply(op: OperatorSpec, lam: complex, x: np.ndarray) -> np.ndarray:
    """Solve (lam*I - op) y = x for |lam| > 1.

    Dense blocks use an LU solve; shifts reduce to bidiagonal
    substitution in O(d); direct sums solve blockwise.  The residual is
    verified against 1e-10 * ||x|| with one refinement step before a
    SingularError is raised.
    """
    lam = complex(lam)
    if abs(lam) <= 1.0:
        raise ValidationError("resolvent points must satisfy |lam| > 1")
    x = _check_dim(op, x)
    if isinstance(op, Dense):
        system = lam * np.eye(op.matrix.shape[0]) - op.matrix
        try:
            y = np.linalg.solve(system, x)
            if not _resolvent_residual_check(op, lam, y, x):
                y = y + np.linalg.solve(system, x - system @ y)
        except np.linalg.LinAlgError as exc:
            raise SingularError(f"resolvent system singular at lam={lam}") from exc
        if not _resolvent_residual_check(op, lam, y, x):
            raise SingularError(f"resolvent solve lost accuracy at lam={lam}")
        return y
    if isinstance(op, WeightedShift):
        d = x.size
        y = np.empty_like(x)
        r = op.ratios
        if op.direction == "forward":
            y[0] = x[0] / lam
            for j in range(1, d):
                y[j] = (x[j] + r[j - 1] * y[j - 1]) / lam
        else:
            y[d - 1] = x[d - 1] / lam
            for j in range(d - 2, -1, -1):
                y[j] = (x[j] + r[j] * y[j + 1]) / lam
        if not _resolvent_residual_check(op, lam, y, x):
            raise SingularError(f"shift resolvent lost accuracy at lam={lam}")
        return y
    if isinstance(op, DirectSum):
        parts = []
        offset = 0
        for s in op.summands:
            d = dimension(s)
            parts.append(resolvent_apply(s, lam, x[offset : offset + d]))
            offset += d
        return np.concatenate(parts)
    if isinstance(op, RotatedScale):
        # (lam - mu*A)^{-1} x = mu^{-1} ((lam/mu) - A)^{-1} x with |mu| = 1.
        return resolvent_apply(op.inner, lam / op.scalar, x) / op.scalar
    raise TypeError(f"not an operator spec: {type(op)!r}")
