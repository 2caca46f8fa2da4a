"""Cesaro means, second means, rotated mean profiles, and ergodicity probes.

All mean computations accumulate a running sum of powers (one operator
application per step), never re-powering from scratch, so a full profile
up to n_max costs n_max multiplications.  Rotated profiles take the sup
over a uniform unimodular grid; for shift-like operators the rotation is
a unitary equivalence, so a single angle suffices and is recorded as such.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeError, ValidationError
from .operators import (
    DENSE_CAP,
    SEED,
    SVD_CAP,
    Dense,
    DirectSum,
    OperatorSpec,
    RotatedScale,
    _compact,
    _matrix_norm,
    apply,
    dimension,
    is_shift_like,
    materialize,
)


@dataclass(frozen=True)
class MeanSeries:
    """Per-n mean norms, the rotated sup, and how they were computed."""

    n: np.ndarray
    norm_m1: np.ndarray
    norm_m2: np.ndarray | None
    sup_lambda: np.ndarray
    order: int
    angle_count: int
    rotation_shortcut: bool
    method: str

    def __post_init__(self):
        for name in ("n", "norm_m1", "sup_lambda"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.norm_m2 is not None:
            arr = np.asarray(self.norm_m2)
            arr.setflags(write=False)
            object.__setattr__(self, "norm_m2", arr)


@dataclass(frozen=True)
class ErgodicProbe:
    """Cauchy gaps of M_n(T)x along a ladder, per probe vector."""

    ladder: tuple
    probe_labels: tuple
    gaps: np.ndarray  # shape (probes, len(ladder) - 1)
    tolerance: float
    consistent: bool


def _dense_norm(mat: np.ndarray, svd_cap: int = SVD_CAP) -> float:
    """Spectral norm of an explicit matrix, dense SVD below the cap."""
    if mat.shape[0] <= svd_cap:
        return float(np.linalg.svd(mat, compute_uv=False)[0])
    return _matrix_norm(mat, 1e-8, 20000, SEED, svd_cap).value


def _unit_angles(angle_count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(angle_count) / angle_count)


def rotated_mean_tables(
    op: OperatorSpec,
    n_max: int,
    lams: np.ndarray,
    want_order2: bool = False,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
):
    """Norm tables ||M_n(lam*T)|| (and order 2) over a grid of scalars.

    Returns arrays of shape (len(lams), n_max + 1).  Direct sums reduce
    blockwise (the mean of a block diagonal is block diagonal, its norm
    the max over blocks); rotations fold their scalar into the grid.
    """
    lams = np.asarray(lams, dtype=complex)
    if isinstance(op, DirectSum):
        norm1 = np.zeros((lams.size, n_max + 1))
        norm2 = np.zeros((lams.size, n_max + 1)) if want_order2 else None
        for s in op.summands:
            sub1, sub2 = rotated_mean_tables(s, n_max, lams, want_order2, svd_cap, cap)
            np.maximum(norm1, sub1, out=norm1)
            if want_order2:
                np.maximum(norm2, sub2, out=norm2)
        return norm1, norm2
    if isinstance(op, RotatedScale):
        return rotated_mean_tables(op.inner, n_max, lams * op.scalar, want_order2, svd_cap, cap)
    mat = _compact(materialize(op, cap))
    d = mat.shape[0]
    norm1 = np.zeros((lams.size, n_max + 1))
    norm2 = np.zeros((lams.size, n_max + 1)) if want_order2 else None
    eye = np.eye(d)
    for li, lam in enumerate(lams):
        scaled = _compact(lam * mat)
        power = eye.astype(scaled.dtype)
        total = power.copy()
        triangular = power.copy()  # sum of (n+1-j) * (lam T)^j
        norm1[li, 0] = _dense_norm(total, svd_cap)
        if want_order2:
            norm2[li, 0] = norm1[li, 0]
        for n in range(1, n_max + 1):
            power = power @ scaled
            total = total + power
            norm1[li, n] = _dense_norm(total, svd_cap) / (n + 1)
            if want_order2:
                triangular = triangular + total
                norm2[li, n] = 2.0 * _dense_norm(triangular, svd_cap) / ((n + 1) * (n + 2))
    return norm1, norm2


def rotated_mean_norm_profile(
    op: OperatorSpec,
    n_max: int,
    angle_count: int = 256,
    order: int = 1,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
) -> MeanSeries:
    """Sup over the angle grid of ||M_n(lam*T)|| (or the order-2 mean).

    The grid is uniform with lam = 1 as its first point, so the norm_m1
    column always holds the unrotated means.  Shift-like operators are
    evaluated at lam = 1 only; the sup is exact for them at any
    resolution, which is recorded via ``rotation_shortcut``.
    """
    if angle_count < 1:
        raise ValidationError("angle count must be at least 1")
    if order not in (1, 2):
        raise ValidationError("order must be 1 or 2")
    if n_max < 0:
        raise ValidationError("n_max must be non-negative")
    shortcut = is_shift_like(op)
    lams = np.array([1.0 + 0.0j]) if shortcut else _unit_angles(angle_count)
    norm1, norm2 = rotated_mean_tables(op, n_max, lams, order == 2, svd_cap, cap)
    chosen = norm1 if order == 1 else norm2
    return MeanSeries(
        n=np.arange(n_max + 1),
        norm_m1=norm1[0],
        norm_m2=norm2[0] if norm2 is not None else None,
        sup_lambda=chosen.max(axis=0),
        order=order,
        angle_count=angle_count,
        rotation_shortcut=shortcut,
        method="dense-svd-oracle" if dimension(op) <= svd_cap else "power-iteration",
    )


def cesaro_mean(op: OperatorSpec, n: int, cap: int = DENSE_CAP) -> Dense:
    """The average of powers I, T, .., T^n as a dense operator."""
    if n < 0:
        raise ValidationError("mean index must be non-negative")
    d = dimension(op)
    if d > cap:
        raise SizeError(f"dimension {d} exceeds dense cap {cap}")
    total = np.eye(d, dtype=complex)
    if n > 0:
        mat = materialize(op, cap)
        power = np.eye(d, dtype=complex)
        for _ in range(n):
            power = power @ mat
            total = total + power
    return Dense(total / (n + 1))


def cesaro_mean2(op: OperatorSpec, n: int, cap: int = DENSE_CAP) -> Dense:
    """The second mean, cross-checking its two equivalent forms.

    Form one averages the running means with weights (j+1); form two is
    the triangular sum of (n+1-j) T^j.  Both are evaluated and must
    agree to 1e-12; the triangular form is returned.
    """
    if n < 0:
        raise ValidationError("mean index must be non-negative")
    d = dimension(op)
    if d > cap:
        raise SizeError(f"dimension {d} exceeds dense cap {cap}")
    eye = np.eye(d, dtype=complex)
    mat = materialize(op, cap) if n > 0 else None
    scale = 2.0 / ((n + 1) * (n + 2))

    power = eye.copy()
    running = eye.copy()
    averaged = eye.copy()  # sum of (j+1) * M_j, literally
    for j in range(1, n + 1):
        power = power @ mat
        running = running + power
        averaged = averaged + (j + 1) * (running / (j + 1))
    form_one = scale * averaged

    power = eye.copy()
    triangular = (n + 1) * eye
    for j in range(1, n + 1):
        power = power @ mat
        triangular = triangular + (n + 1 - j) * power
    form_two = scale * triangular

    gap = float(np.max(np.abs(form_one - form_two)))
    if gap > 1e-12 * max(1.0, float(np.max(np.abs(form_two)))):
        raise RuntimeError(f"second-mean forms disagree by {gap:.3e}")
    return Dense(form_two)


def cesaro_identity_check(
    op: OperatorSpec, n: int, cap: int = DENSE_CAP, svd_cap: int = SVD_CAP
) -> float:
    """Largest residual of the two power/mean recurrences at index n.

    Checks T^n = (n+1) M_n - n M_{n-1} and
    (n+2)/(n+1) M_{n+1} - M_n = T^{n+1}/(n+1), both in operator norm.
    """
    if n < 1:
        raise ValidationError("identity check needs n >= 1")
    d = dimension(op)
    mat = materialize(op, cap)
    power = np.eye(d, dtype=complex)
    total = np.eye(d, dtype=complex)
    means = {}
    powers = {}
    for j in range(1, n + 2):
        power = power @ mat
        total = total + power
        if j in (n - 1, n, n + 1):
            means[j] = total / (j + 1)
        if j in (n, n + 1):
            powers[j] = power.copy()
    if n == 1:
        means[0] = np.eye(d, dtype=complex)
    first = _dense_norm(
        powers[n] - ((n + 1) * means[n] - n * means[n - 1]), svd_cap
    )
    second = _dense_norm(
        (n + 2) / (n + 1) * means[n + 1] - means[n] - powers[n + 1] / (n + 1), svd_cap
    )
    return max(first, second)


def mean_difference_decay(
    op: OperatorSpec,
    ladder,
    cap: int = DENSE_CAP,
    svd_cap: int = SVD_CAP,
) -> np.ndarray:
    """||M_{n+1}(T) - M_n(T)|| at each ladder index n."""
    ladder = tuple(int(n) for n in ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or any(n < 0 for n in ladder):
        raise ValidationError("ladder must be strictly increasing and non-negative")
    d = dimension(op)
    mat = materialize(op, cap)
    wanted = set(ladder)
    out = {}
    power = np.eye(d, dtype=complex)
    total = np.eye(d, dtype=complex)
    for n in range(1, max(ladder) + 2):
        power = power @ mat
        new_total = total + power
        if (n - 1) in wanted:
            out[n - 1] = _dense_norm(new_total / (n + 1) - total / n, svd_cap)
        total = new_total
    return np.array([out[n] for n in ladder])


def ergodic_probe(
    op: OperatorSpec,
    probes=8,
    ladder=(16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192),
    tolerance: float = 1e-3,
    seed: int = SEED,
    cap: int = DENSE_CAP,
) -> ErgodicProbe:
    """Cauchy gaps ||M_n(T)x - M_m(T)x|| across the ladder.

    ``probes`` is either a count of seeded unit vectors or an explicit
    sequence of vectors (normalized here).  The verdict is consistent
    with mean ergodicity when, for every probe, the final gap sits below
    the tolerance.  A reporting heuristic, never an acceptance gate.
    """
    ladder = tuple(int(n) for n in ladder)
    if len(ladder) < 2:
        raise ValidationError("ladder needs at least two rungs")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValidationError("ladder must be strictly increasing")
    d = dimension(op)
    if isinstance(probes, int):
        rng = np.random.default_rng(seed)
        vecs = []
        labels = []
        for i in range(probes):
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            vecs.append(v / np.linalg.norm(v))
            labels.append(f"seeded-{i}")
    else:
        vecs = []
        labels = []
        for i, v in enumerate(probes):
            v = np.asarray(v, dtype=complex)
            norm = np.linalg.norm(v)
            if norm == 0:
                raise ValidationError("probe vectors must be nonzero")
            vecs.append(v / norm)
            labels.append(f"given-{i}")
    # Long ladders dominate the cost; iterate on a compacted materialized
    # matrix when one fits, falling back to structured application.
    if d <= cap:
        mat = _compact(materialize(op, cap))
        step = lambda v: mat @ v
    else:
        step = lambda v: apply(op, v)
    gaps = np.zeros((len(vecs), len(ladder) - 1))
    for pi, x in enumerate(vecs):
        if d <= cap and not np.iscomplexobj(mat) and not x.imag.any():
            x = x.real
        running = x.copy()
        current = x.copy()
        snapshots = {0: x}
        for n in range(1, max(ladder) + 1):
            current = step(current)
            running = running + current
            if n in ladder:
                snapshots[n] = running / (n + 1)
        for gi, (a, b) in enumerate(zip(ladder, ladder[1:])):
            gaps[pi, gi] = float(np.linalg.norm(snapshots[b] - snapshots[a]))
    consistent = bool(np.all(gaps[:, -1] <= tolerance))
    return ErgodicProbe(ladder, tuple(labels), gaps, tolerance, consistent)
