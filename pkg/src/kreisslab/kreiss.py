"""Resolvent-condition constants and the inequality checkers built on them.

Three flavors of constant are estimated on finite grids: the plain
resolvent constant sup (|lam|-1) * ||(lam I - T)^-1||, the uniform
variant through rotated Cesaro means, and the strong variant through
resolvent powers.  The second-mean constant is also reported in the
quadratic normalization sup_N N^-2 * ||sum_{j<N} (N-j) (lam T)^j||,
which is the form the orbit inequalities (claims H1..H4) consume.

Every checker returns a ClaimCheckResult carrying value, bound, margin
and a status; hypotheses that fail to hold (a vanishing orbit power, a
diverging hypothesis sum) yield distinct non-failure states rather than
silent passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cesaro import _dense_norm, rotated_mean_tables, _unit_angles
from .errors import SingularError, ValidationError
from .operators import (
    DENSE_CAP,
    SEED,
    SVD_CAP,
    DirectSum,
    OperatorSpec,
    RotatedScale,
    WeightedShift,
    _power_iteration,
    adjoint,
    apply,
    dimension,
    is_shift_like,
    materialize,
    resolvent_apply,
)

#: Dimension up to which the spectral-radius precondition is verified
#: by a dense eigenvalue computation when structure does not settle it.
EIG_CHECK_CAP = 256

_REL_SLACK = 1e-9
_ORBIT_FLOOR = 1e-300


def default_radii(levels: int = 12) -> tuple:
    """Radii 1 + 2^-m clustering geometrically toward the unit circle."""
    return tuple(1.0 + 2.0 ** (-m) for m in range(1, levels + 1))


@dataclass(frozen=True)
class AnnulusGrid:
    """Sampling grid outside the unit circle: radii x uniform angles."""

    radii: tuple
    angle_count: int = 64

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii or any(r <= 1.0 + 1e-9 for r in radii):
            raise ValidationError("all radii must exceed 1 + 1e-9")
        if self.angle_count < 1:
            raise ValidationError("angle count must be at least 1")

    @classmethod
    def default(cls, angle_count: int = 64) -> "AnnulusGrid":
        return cls(default_radii(), angle_count)

    def refine(self) -> "AnnulusGrid":
        """Insert geometric midpoints between radii and double the angles."""
        mids = tuple(
            1.0 + math.sqrt((a - 1.0) * (b - 1.0))
            for a, b in zip(self.radii, self.radii[1:])
        )
        radii = tuple(sorted(set(self.radii) | set(mids), reverse=True))
        return AnnulusGrid(radii, 2 * self.angle_count)


@dataclass(frozen=True)
class KreissReport:
    """Estimated resolvent-type constants and the grids that produced them."""

    kreiss_C: float | None = None
    ukb_C: float | None = None
    kb2_C: float | None = None
    strong_C: float | None = None
    kb2_sum_C: float | None = None
    radii: tuple | None = None
    angle_count: int | None = None
    n_max: int | None = None
    k_max: int | None = None
    rotation_shortcut: bool = False
    skipped: tuple = ()

    def to_dict(self) -> dict:
        return {
            "kreiss_C": self.kreiss_C,
            "ukb_C": self.ukb_C,
            "kb2_C": self.kb2_C,
            "strong_C": self.strong_C,
            "kb2_sum_C": self.kb2_sum_C,
            "radii": list(self.radii) if self.radii is not None else None,
            "angle_count": self.angle_count,
            "n_max": self.n_max,
            "k_max": self.k_max,
            "rotation_shortcut": self.rotation_shortcut,
            "skipped": [list(point) for point in self.skipped],
        }


@dataclass(frozen=True)
class ClaimCheckResult:
    """Outcome of one inequality instance.

    ``margin`` is the slack in the inequality's favor, so the pass rule
    is uniformly margin >= -slack * |bound|.  ``passed`` is None when no
    verdict applies (the hypothesis itself failed), with the reason in
    ``status``: pass, fail, vacuous-pass, or hypothesis-diverged.
    """

    claim_id: str
    params: dict = field(default_factory=dict)
    lhs: float | None = None
    bound: float | None = None
    margin: float | None = None
    passed: bool | None = None
    status: str = "pass"

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "params": dict(self.params),
            "lhs": self.lhs,
            "bound": self.bound,
            "margin": self.margin,
            "passed": self.passed,
            "status": self.status,
        }


def _upper_result(claim_id, params, lhs, bound, slack=_REL_SLACK) -> ClaimCheckResult:
    margin = bound - lhs
    ok = margin >= -slack * abs(bound)
    return ClaimCheckResult(claim_id, params, float(lhs), float(bound), float(margin), ok,
                            "pass" if ok else "fail")


def _lower_result(claim_id, params, lhs, bound, slack=_REL_SLACK) -> ClaimCheckResult:
    margin = lhs - bound
    ok = margin >= -slack * abs(bound)
    return ClaimCheckResult(claim_id, params, float(lhs), float(bound), float(margin), ok,
                            "pass" if ok else "fail")


def _vacuous(claim_id, params) -> ClaimCheckResult:
    return ClaimCheckResult(claim_id, params, None, None, None, True, "vacuous-pass")


def certify_spectral_radius(op: OperatorSpec):
    """Upper bound for the spectral radius, or None when uncertifiable.

    Shifts are nilpotent at finite truncation; triangular dense blocks
    read the bound off their diagonal; other dense blocks fall back to a
    dense eigenvalue computation up to EIG_CHECK_CAP.
    """
    if isinstance(op, WeightedShift):
        return 0.0
    if isinstance(op, DirectSum):
        bounds = [certify_spectral_radius(s) for s in op.summands]
        return None if any(b is None for b in bounds) else max(bounds)
    if isinstance(op, RotatedScale):
        return certify_spectral_radius(op.inner)
    mat = op.matrix
    if not np.any(np.tril(mat, -1)) or not np.any(np.triu(mat, 1)):
        return float(np.max(np.abs(np.diag(mat))))
    if mat.shape[0] <= EIG_CHECK_CAP:
        return float(np.max(np.abs(np.linalg.eigvals(mat))))
    return None


def _require_contractive_spectrum(op: OperatorSpec):
    bound = certify_spectral_radius(op)
    if bound is not None and bound > 1.0 + 1e-9:
        raise ValidationError(f"spectral radius bound {bound:.6g} exceeds 1")


def resolvent_norm(op: OperatorSpec, lam: complex, svd_cap: int = SVD_CAP) -> float:
    """||(lam I - op)^-1||, exact blockwise over direct sums.

    Small blocks use 1/sigma_min of the materialized system; larger ones
    run power iteration whose matrix-vector products are resolvent
    solves, so structured variants never materialize.
    """
    lam = complex(lam)
    if isinstance(op, DirectSum):
        return max(resolvent_norm(s, lam, svd_cap) for s in op.summands)
    if isinstance(op, RotatedScale):
        return resolvent_norm(op.inner, lam / op.scalar, svd_cap)
    d = dimension(op)
    if d <= svd_cap:
        system = lam * np.eye(d) - materialize(op)
        smin = float(np.linalg.svd(system, compute_uv=False)[-1])
        if smin == 0.0:
            raise SingularError(f"resolvent singular at lam={lam}")
        return 1.0 / smin
    op_adj = adjoint(op)
    value, _res, _it, ok = _power_iteration(
        lambda v: resolvent_apply(op, lam, v),
        lambda v: resolvent_apply(op_adj, np.conj(lam), v),
        d,
        1e-10,
        20000,
        SEED,
    )
    if not ok:
        raise SingularError(f"resolvent norm estimate stalled at lam={lam}")
    return value


def kreiss_constant(op: OperatorSpec, grid: AnnulusGrid, svd_cap: int = SVD_CAP) -> KreissReport:
    """sup over the grid of (|lam| - 1) * ||(lam I - T)^-1||.

    Shift-like operators are rotation invariant, so one angle per radius
    is evaluated and recorded as a shortcut.  Singular grid points are
    skipped and listed in the report.
    """
    _require_contractive_spectrum(op)
    shortcut = is_shift_like(op)
    angles = np.array([1.0 + 0.0j]) if shortcut else _unit_angles(grid.angle_count)
    best = 0.0
    skipped = []
    for r in grid.radii:
        for mu in angles:
            lam = r * mu
            try:
                value = (r - 1.0) * resolvent_norm(op, lam, svd_cap)
            except SingularError:
                skipped.append((float(r), complex(mu)))
                continue
            best = max(best, value)
    return KreissReport(
        kreiss_C=best,
        radii=grid.radii,
        angle_count=grid.angle_count,
        rotation_shortcut=shortcut,
        skipped=tuple(skipped),
    )


def uniform_kreiss_constant(
    op: OperatorSpec,
    n_max: int,
    angles: int = 256,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
) -> KreissReport:
    """sup over n <= n_max and the angle grid of ||M_n(lam T)||."""
    shortcut = is_shift_like(op)
    lams = np.array([1.0 + 0.0j]) if shortcut else _unit_angles(angles)
    norm1, _ = rotated_mean_tables(op, n_max, lams, False, svd_cap, cap)
    return KreissReport(
        ukb_C=float(norm1.max()),
        angle_count=angles,
        n_max=n_max,
        rotation_shortcut=shortcut,
    )


def kb2_constant(
    op: OperatorSpec,
    n_max: int,
    angles: int = 256,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
) -> KreissReport:
    """Second-mean constant, in both normalizations.

    kb2_C is sup ||M_n^(2)(lam T)||; kb2_sum_C rescales the same values
    to sup_N N^-2 * ||sum_{j<N} (N-j)(lam T)^j|| via the exact identity
    between the triangular sum and the second mean.
    """
    shortcut = is_shift_like(op)
    lams = np.array([1.0 + 0.0j]) if shortcut else _unit_angles(angles)
    _, norm2 = rotated_mean_tables(op, n_max, lams, True, svd_cap, cap)
    n = np.arange(n_max + 1, dtype=float)
    quad = norm2 * ((n + 2.0) / (2.0 * (n + 1.0)))
    return KreissReport(
        kb2_C=float(norm2.max()),
        kb2_sum_C=float(quad.max()),
        angle_count=angles,
        n_max=n_max,
        rotation_shortcut=shortcut,
    )


def strong_kreiss_constant(
    op: OperatorSpec,
    grid: AnnulusGrid,
    k_max: int = 16,
    svd_cap: int = SVD_CAP,
    cap: int = DENSE_CAP,
) -> KreissReport:
    """sup over the grid and k <= k_max of (|lam|-1)^k * ||(lam I - T)^-k||.

    Terms are combined in log space so that tiny (|lam|-1)^k factors
    against large resolvent-power norms neither underflow nor overflow.
    """
    _require_contractive_spectrum(op)
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")

    def _sweep(node: OperatorSpec, lam: complex, r: float) -> float:
        if isinstance(node, DirectSum):
            return max(_sweep(s, lam, r) for s in node.summands)
        if isinstance(node, RotatedScale):
            return _sweep(node.inner, lam / node.scalar, r)
        d = dimension(node)
        system = lam * np.eye(d) - materialize(node, cap)
        try:
            resolvent = np.linalg.inv(system)
        except np.linalg.LinAlgError as exc:
            raise SingularError(f"resolvent singular at lam={lam}") from exc
        power = np.eye(d, dtype=resolvent.dtype)
        best_here = 0.0
        log_gap = math.log(r - 1.0)
        for k in range(1, k_max + 1):
            power = power @ resolvent
            norm = _dense_norm(power, svd_cap)
            if norm <= 0.0:
                continue
            log_term = k * log_gap + math.log(norm)
            best_here = max(best_here, math.exp(min(log_term, 700.0)))
        return best_here

    shortcut = is_shift_like(op)
    angles = np.array([1.0 + 0.0j]) if shortcut else _unit_angles(grid.angle_count)
    best = 0.0
    skipped = []
    for r in grid.radii:
        for mu in angles:
            try:
                best = max(best, _sweep(op, r * mu, r))
            except SingularError:
                skipped.append((float(r), complex(mu)))
    return KreissReport(
        strong_C=best,
        radii=grid.radii,
        angle_count=grid.angle_count,
        k_max=k_max,
        rotation_shortcut=shortcut,
        skipped=tuple(skipped),
    )


def orbit_norms(op: OperatorSpec, x: np.ndarray, kmax: int) -> np.ndarray:
    """||T^j x|| for j = 0..kmax, by repeated application."""
    out = np.zeros(kmax + 1)
    v = np.asarray(x, dtype=complex)
    out[0] = float(np.linalg.norm(v))
    for j in range(1, kmax + 1):
        v = apply(op, v)
        out[j] = float(np.linalg.norm(v))
    return out


def _require_unit(x: np.ndarray):
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise ValidationError("probe vector must have unit norm")


def hilbert_claim1(op, C, x, N, params=None) -> ClaimCheckResult:
    """Orbit energy bound: sum_{j<N} ||T^j x||^2 <= 16 C^2 N^2."""
    _require_unit(x)
    if N < 1:
        raise ValidationError("N must be at least 1")
    norms = orbit_norms(op, x, N - 1)
    lhs = float(np.sum(norms**2))
    bound = 16.0 * C * C * N * N
    return _upper_result("H1", {"N": int(N), **(params or {})}, lhs, bound)


def hilbert_claim2(op, C, x, N, M, params=None) -> ClaimCheckResult:
    """Inverse-orbit bound: sum_{j<M} ||T^N x||^2 / ||T^{N-j} x||^2 <= 16 C^2 M^2."""
    _require_unit(x)
    if not 0 < M < N:
        raise ValidationError("need 0 < M < N")
    info = {"N": int(N), "M": int(M), **(params or {})}
    norms = orbit_norms(op, x, N)
    if norms[N] <= _ORBIT_FLOOR:
        return _vacuous("H2", info)
    js = np.arange(M)
    lhs = float(np.sum(norms[N] ** 2 / norms[N - js] ** 2))
    bound = 16.0 * C * C * M * M
    return _upper_result("H2", info, lhs, bound)


def hilbert_claim3(op, C, x, N, params=None) -> ClaimCheckResult:
    """Reciprocal-orbit bound: sum_{j<N} 1/||T^j x|| >= sqrt(N)/(4C)."""
    _require_unit(x)
    if N < 1:
        raise ValidationError("N must be at least 1")
    info = {"N": int(N), **(params or {})}
    norms = orbit_norms(op, x, N)
    if norms[N] <= _ORBIT_FLOOR:
        return _vacuous("H3", info)
    lhs = float(np.sum(1.0 / norms[:N]))
    bound = math.sqrt(N) / (4.0 * C)
    return _lower_result("H3", info, lhs, bound)


def hilbert_claim4(op, C, x, N, M1, M2, params=None) -> ClaimCheckResult:
    """Window bound: sum_{M1<=j<M2} ||T^{N-j}x||^2/||T^N x||^2 >= (M2-M1)^2/(16 C^2 M2^2)."""
    _require_unit(x)
    if not 0 < M1 < M2 < N:
        raise ValidationError("need 0 < M1 < M2 < N")
    info = {"N": int(N), "M1": int(M1), "M2": int(M2), **(params or {})}
    norms = orbit_norms(op, x, N)
    if norms[N] <= _ORBIT_FLOOR:
        return _vacuous("H4", info)
    js = np.arange(M1, M2)
    lhs = float(np.sum(norms[N - js] ** 2 / norms[N] ** 2))
    bound = (M2 - M1) ** 2 / (16.0 * C * C * M2 * M2)
    return _lower_result("H4", info, lhs, bound)


def tn_claim1_bound(eta, n, gamma, delta, c1, params=None) -> ClaimCheckResult:
    """Windowed double-sum bound against the rotated-mean constant c1.

    Checks (n+1)^-1 * sum_j sum_{j<=j'<=j+n} gamma_j delta_j' (j'/j)^eta
    <= c1 for non-negative unit-norm coefficient vectors; the double sum
    is evaluated directly, independent of any operator code path.
    """
    gamma = np.asarray(gamma, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(gamma < 0) or np.any(delta < 0):
        raise ValidationError("coefficient vectors must be non-negative")
    for v in (gamma, delta):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValidationError("coefficient vectors must have unit norm")
    d = gamma.size
    if delta.size != d:
        raise ValidationError("coefficient vectors must share a length")
    powers = np.arange(1, d + 1, dtype=float) ** eta
    total = 0.0
    for j in range(1, d + 1):
        hi = min(j + n, d)
        window = np.arange(j, hi + 1)
        total += gamma[j - 1] * float(
            np.sum(delta[window - 1] * powers[window - 1] / powers[j - 1])
        )
    lhs = total / (n + 1)
    info = {"eta": float(eta), "n": int(n), "d": int(d), **(params or {})}
    return _upper_result("TN-C1", info, lhs, float(c1))


def tn_claim2_bound(eta, M) -> ClaimCheckResult:
    """Power-sum bound sum_{j<=M} j^(-2 eta) <= M^(1-2 eta)/(1-2 eta).

    The constant 1/(1-2 eta) comes from comparing the sum with the
    integral of t^(-2 eta); checked by direct summation with 1e-12
    relative slack.
    """
    if not 0.0 < eta < 0.5:
        raise ValidationError("eta must lie in (0, 1/2)")
    if M < 1:
        raise ValidationError("M must be at least 1")
    j = np.arange(1, M + 1, dtype=float)
    lhs = float(np.sum(j ** (-2.0 * eta)))
    c2 = 1.0 / (1.0 - 2.0 * eta)
    bound = c2 * float(M) ** (1.0 - 2.0 * eta)
    return _upper_result("TN-C2", {"eta": float(eta), "M": int(M), "c2": c2}, lhs, bound,
                         slack=1e-12)


def lemma21_bound(a, r_grid=None) -> ClaimCheckResult:
    """Square-root growth bound for sequences with square-summable tails.

    Estimates B = sup over the radius grid of (1-r)^2 * sum a_k^2 r^(2k)
    (truncated at the sequence length, with the minimal monotone tail
    reported) and then checks a_n <= 2e * sqrt(B n) for every n >= 1.
    When the grid profile of B keeps growing toward r = 1 the hypothesis
    itself fails, which is reported as ``hypothesis-diverged`` with no
    verdict on the conclusion.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValidationError("sequence must be 1-D with at least two entries")
    if np.any(a < 0):
        raise ValidationError("sequence must be non-negative")
    if np.any(np.diff(a) < -1e-12 * max(1.0, float(a.max()))):
        raise ValidationError("sequence must be non-decreasing")
    if r_grid is None:
        r_grid = tuple(1.0 - 2.0 ** (-m) for m in range(1, 13))
    radii = np.sort(np.asarray(r_grid, dtype=float))
    if np.any(radii <= 0.0) or np.any(radii >= 1.0):
        raise ValidationError("radius grid must lie inside (0, 1)")

    length = a.size
    ks = np.arange(length, dtype=float)
    profile = np.array(
        [(1.0 - r) ** 2 * float(np.sum(a**2 * r ** (2.0 * ks))) for r in radii]
    )
    # Radii so close to 1 that the truncation removes most of the series
    # say nothing about the true sup; keep radii with r^(2L) <= 1/2.
    usable = radii ** (2.0 * length) <= 0.5
    if np.count_nonzero(usable) < 3:
        usable = np.ones_like(usable, dtype=bool)
    used_profile = profile[usable]
    used_radii = radii[usable]
    b_hat = float(used_profile.max())
    top = used_radii[int(np.argmax(used_profile))]
    tail = float(a[-1] ** 2 * top ** (2.0 * length) / (1.0 - top**2))
    diverged = bool(used_profile[-1] > 4.0 * used_profile[used_profile.size // 2])
    info = {
        "B": b_hat,
        "tail_bound": tail,
        "r_grid": [float(r) for r in radii],
        "B_profile": [float(b) for b in profile],
        "n_checked": int(length - 1),
        "diverged": diverged,
    }
    if diverged:
        return ClaimCheckResult("L21", info, None, None, None, None, "hypothesis-diverged")
    n = np.arange(1, length, dtype=float)
    bounds = 2.0 * math.e * np.sqrt(b_hat * n)
    if b_hat == 0.0:
        ratio = 0.0 if not np.any(a[1:]) else math.inf
    else:
        ratio = float(np.max(a[1:] / bounds))
    return _upper_result("L21", info, ratio, 1.0)


def dyadic_ladder(top: int) -> tuple:
    """1, 2, 4, .. up to and including top (top must be a power of two)."""
    out = []
    v = 1
    while v <= top:
        out.append(v)
        v *= 2
    return tuple(out)


def run_hilbert_claims(
    op: OperatorSpec,
    C: float,
    n_probes: int = 64,
    n_top: int = 64,
    seed: int = SEED,
) -> list:
    """All four orbit claims over seeded unit probes and dyadic ladders."""
    d = dimension(op)
    ladder = dyadic_ladder(n_top)
    results = []
    for i in range(n_probes):
        rng = np.random.default_rng([seed, i])
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        x /= np.linalg.norm(x)
        tag = {"x_seed": i}
        for N in ladder:
            results.append(hilbert_claim1(op, C, x, N, tag))
            results.append(hilbert_claim3(op, C, x, N, tag))
            for M in ladder:
                if 0 < M < N:
                    results.append(hilbert_claim2(op, C, x, N, M, tag))
            for M1 in ladder:
                for M2 in ladder:
                    if 0 < M1 < M2 < N:
                        results.append(hilbert_claim4(op, C, x, N, M1, M2, tag))
    return results
