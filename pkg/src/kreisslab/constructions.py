"""Builders for the concrete operator families studied by the laboratory.

Every builder returns an immutable OperatorSpec.  The infinite-dimensional
families (the ramp-shift direct sum, the rank-one-perturbed diagonal, and
the coupled backward-shift block) are truncated; `make_operator` wraps the
result together with the truncation notes that state which finite claims
the truncation certifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .operators import Dense, DirectSum, OperatorSpec, WeightedShift, WeightSequence

#: Open-interval parameters are kept this far away from their endpoints;
#: boundary values void the estimates the constructions are built to probe.
STRICT_MARGIN = 1e-6


def _require_open(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not (lo + STRICT_MARGIN <= value <= hi - STRICT_MARGIN):
        raise ValidationError(f"{name} must lie strictly inside ({lo}, {hi})")
    return value


@dataclass(frozen=True)
class TNParams:
    """Size and exponent of one ramp weighted shift."""

    n: int
    eta: float

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValidationError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "eta", _require_open("eta", self.eta, 0.0, 0.5))


@dataclass(frozen=True)
class DirectSumParams:
    """Parameters of the direct-sum growth counterexample."""

    epsilon: float
    eta: float
    n_max: int

    def __post_init__(self):
        eps = _require_open("epsilon", self.epsilon, 0.0, 1.0)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "eta", _require_open("eta", self.eta, (1.0 - eps) / 2.0, 0.5))
        if int(self.n_max) < 2:
            raise ValidationError("n_max must be at least 2")
        object.__setattr__(self, "n_max", int(self.n_max))


@dataclass(frozen=True)
class ErgcesParams:
    """Truncation level of the rank-one-perturbed diagonal operator.

    Basis e_0..e_J with column parameters eps_j = 2**-j and
    c_j = 1 - eps_j**2, evaluated exactly in double precision.
    """

    j_max: int

    def __post_init__(self):
        if int(self.j_max) < 2:
            raise ValidationError("truncation level must be at least 2")
        object.__setattr__(self, "j_max", int(self.j_max))

    @property
    def eps(self) -> np.ndarray:
        return 2.0 ** (-np.arange(1, self.j_max + 1, dtype=float))

    @property
    def c(self) -> np.ndarray:
        return 1.0 - self.eps**2


def tn_weights(n: int, eta: float) -> np.ndarray:
    """Ramp weights: w_j = j**eta up to j = n, then n**(2*eta)/(2n-j+1)**eta.

    Anchors w_1 = 1, w_n = w_{n+1} = n**eta and w_{2n} = n**(2*eta).
    """
    p = TNParams(n, eta)
    j = np.arange(1, 2 * p.n + 1, dtype=float)
    ramp_up = j**p.eta
    ramp_top = p.n ** (2 * p.eta) / (2 * p.n - j + 1) ** p.eta
    return np.where(j <= p.n, ramp_up, ramp_top)


def build_TN(n: int, eta: float) -> WeightedShift:
    """Forward weighted shift on 2n coordinates with the ramp weights.

    The norm is the largest single ratio, 2**eta for n >= 2, while the
    (2n-1)-st power attains w_{2n}/w_1 = n**(2*eta): maximal transient
    growth under a uniform bound on all the averaged powers.
    """
    w = tn_weights(n, eta)
    seq = WeightSequence(w, eta=float(eta), n=int(n))
    return WeightedShift("forward", w[1:] / w[:-1], seq)


def build_shields_counterexample(epsilon: float, eta: float, n_max: int) -> DirectSum:
    """Direct sum of the ramp shifts for n = 1..n_max.

    With eta in ((1-epsilon)/2, 1/2) the power norms dominate
    (1/3)*(k+1)**(1-epsilon); the truncation certifies that bound for
    k <= 2*n_max - 2 (see `shields_certified_kmax`).
    """
    p = DirectSumParams(epsilon, eta, n_max)
    return DirectSum(tuple(build_TN(n, p.eta) for n in range(1, p.n_max + 1)))


def shields_certified_kmax(n_max: int) -> int:
    """Largest k whose lower bound the n_max-truncation certifies.

    Odd k = 2n-1 needs summand n, even k = 2n needs summand n+1, so
    every k up to 2*n_max - 2 is covered.
    """
    return 2 * int(n_max) - 2


def build_bermbmp_shift(alpha: float, direction: str = "forward", d: int = 2) -> WeightedShift:
    """d-dimensional truncation of the shift with ratios ((j+1)/j)**alpha.

    The backward variant annihilates e_1 and is absolutely Cesaro
    bounded but not power bounded; the forward variant has uniformly
    bounded rotated Cesaro means.  Requires 0 < alpha < 1/2.
    """
    alpha = _require_open("alpha", alpha, 0.0, 0.5)
    if int(d) < 2:
        raise ValidationError("dimension must be at least 2")
    d = int(d)
    j = np.arange(1, d, dtype=float)
    ratios = ((j + 1) / j) ** alpha
    seq = WeightSequence(np.arange(1, d + 1, dtype=float) ** alpha)
    return WeightedShift(direction, ratios, seq)


def build_ergces(j_max: int) -> Dense:
    """Cesaro-bounded triangular operator with a unimodular residual point.

    Column j has diagonal entry -c_j and first-row entry -eps_j; column 0
    is -e_0.  The powers stay in the same sparsity pattern (closed form
    in `ergces_power_closed_form`), the even Cesaro means are bounded by
    3/2, and (T + I)(-e_j/eps_j) = e_0 - eps_j*e_j witnesses density of
    the range of T + I.
    """
    p = ErgcesParams(j_max)
    size = p.j_max + 1
    mat = np.zeros((size, size))
    mat[0, 0] = -1.0
    mat[0, 1:] = -p.eps
    idx = np.arange(1, size)
    mat[idx, idx] = -p.c
    return Dense(mat)


def ergces_power_closed_form(j_max: int, n: int) -> np.ndarray:
    """Exact n-th power of the `build_ergces` matrix.

    Diagonal ((-1)**n, (-c_j)**n) and first row
    (-1)**n * eps_j * (1 - c_j**n)/(1 - c_j); all other entries vanish.
    """
    p = ErgcesParams(j_max)
    if int(n) < 1:
        raise ValidationError("power must be at least 1")
    n = int(n)
    size = p.j_max + 1
    mat = np.zeros((size, size))
    sign = -1.0 if n % 2 else 1.0
    mat[0, 0] = sign
    idx = np.arange(1, size)
    mat[idx, idx] = (-p.c) ** n
    mat[0, 1:] = sign * p.eps * (1.0 - p.c**n) / (1.0 - p.c)
    return mat


def _backward_shift_matrix(d: int) -> np.ndarray:
    mat = np.zeros((d, d))
    mat[np.arange(d - 1), np.arange(1, d)] = 1.0
    return mat


def build_tz_block(d: int) -> Dense:
    """2d-dimensional block operator [[B, B - I], [0, B]], B backward shift.

    Mean ergodic on the full space while n**-1 * ||T^n|| stays >= 2; at
    truncation d the power-norm claims are trusted only for n well below
    d (see the catalog notes).
    """
    if int(d) < 2:
        raise ValidationError("block dimension must be at least 2")
    d = int(d)
    b = _backward_shift_matrix(d)
    mat = np.zeros((2 * d, 2 * d))
    mat[:d, :d] = b
    mat[:d, d:] = b - np.eye(d)
    mat[d:, d:] = b
    return Dense(mat)


def tz_block_power(d: int, n: int) -> np.ndarray:
    """Closed-form n-th power [[B^n, n*B^(n-1)*(B - I)], [0, B^n]].

    Follows from the blocks being upper triangular with commuting
    entries; used as the structured fast path against dense powering.
    """
    if int(n) < 1:
        raise ValidationError("power must be at least 1")
    d, n = int(d), int(n)
    b = _backward_shift_matrix(d)
    bn = np.linalg.matrix_power(b, n)
    mat = np.zeros((2 * d, 2 * d))
    mat[:d, :d] = bn
    mat[:d, d:] = n * np.linalg.matrix_power(b, n - 1) @ (b - np.eye(d))
    mat[d:, d:] = bn
    return mat


@dataclass(frozen=True)
class CatalogEntry:
    """A named catalog operator with its parameters and validity notes."""

    name: str
    spec: OperatorSpec
    params: dict
    notes: tuple


def make_operator(name: str, **params) -> CatalogEntry:
    """Build a catalog operator by CLI name.

    Names: tn (n, eta), shields (epsilon, eta, n_max), bermbmp
    (alpha, direction, d), ergces (j_max), tzblock (d).
    """
    if name == "tn":
        n, eta = int(params["n"]), float(params["eta"])
        spec = build_TN(n, eta)
        notes = (
            f"norm 2**eta and top power norm n**(2*eta) exact for n={n}",
            "nilpotent: spectral radius 0",
        )
        return CatalogEntry(name, spec, {"n": n, "eta": eta}, notes)
    if name == "shields":
        p = DirectSumParams(float(params["epsilon"]), float(params["eta"]), int(params["n_max"]))
        spec = build_shields_counterexample(p.epsilon, p.eta, p.n_max)
        notes = (
            f"power-norm lower bound certified for k <= {shields_certified_kmax(p.n_max)}",
            "nilpotent: spectral radius 0",
        )
        return CatalogEntry(
            name, spec, {"epsilon": p.epsilon, "eta": p.eta, "n_max": p.n_max}, notes
        )
    if name == "bermbmp":
        alpha = float(params["alpha"])
        direction = str(params.get("direction", "forward"))
        d = int(params["d"])
        spec = build_bermbmp_shift(alpha, direction, d)
        notes = (
            f"truncation of the infinite {direction} shift; power norms exact for k < {d}",
            "nilpotent: spectral radius 0",
        )
        return CatalogEntry(name, spec, {"alpha": alpha, "direction": direction, "d": d}, notes)
    if name == "ergces":
        j_max = int(params["j_max"])
        spec = build_ergces(j_max)
        notes = (
            f"truncation at basis index {j_max}; closed-form powers exact at this truncation",
            "triangular: spectrum is the diagonal, inside [-1, 0)",
        )
        return CatalogEntry(name, spec, {"j_max": j_max}, notes)
    if name == "tzblock":
        d = int(params["d"])
        spec = build_tz_block(d)
        notes = (
            f"truncation at block dimension {d}; power-norm claims trusted for n << {d}",
            "strictly upper triangular: spectral radius 0",
        )
        return CatalogEntry(name, spec, {"d": d}, notes)
    raise ValidationError(f"unknown operator name {name!r}")


CATALOG_NAMES = ("tn", "shields", "bermbmp", "ergces", "tzblock")
