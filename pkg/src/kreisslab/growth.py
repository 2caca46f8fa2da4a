"""Power-law fits and lower-bound certification for power-norm series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .operators import NormSeries


@dataclass(frozen=True)
class GrowthReport:
    """Least-squares exponent of a norm series plus per-k bound flags."""

    k: np.ndarray
    values: np.ndarray
    window: tuple
    exponent: float
    intercept: float
    residual_rms: float
    epsilon: float | None
    lower_bound: np.ndarray | None
    lower_bound_ok: np.ndarray | None

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residual_rms": self.residual_rms,
            "epsilon": self.epsilon,
            "lower_bound_holds": (
                bool(np.all(self.lower_bound_ok)) if self.lower_bound_ok is not None else None
            ),
        }


def growth_fit(series: NormSeries, window, epsilon: float | None = None) -> GrowthReport:
    """Ordinary least squares on (log k, log ||T^k||) over the window.

    When ``epsilon`` is given, every k in the series is also flagged
    against the lower envelope (1/3) * (k+1)**(1-epsilon); the window
    only restricts the fit, not the flags.
    """
    lo, hi = int(window[0]), int(window[1])
    if lo < 1 or hi <= lo:
        raise ValidationError("window must satisfy 1 <= lo < hi")
    mask = (series.k >= lo) & (series.k <= hi)
    if int(np.count_nonzero(mask)) < 8:
        raise ValidationError("fit window must contain at least 8 points")
    vals = series.values[mask]
    if np.any(vals <= 0):
        raise ValidationError("fit window must contain positive norms only")
    logk = np.log(series.k[mask].astype(float))
    logv = np.log(vals)
    design = np.column_stack([logk, np.ones_like(logk)])
    (slope, intercept), *_ = np.linalg.lstsq(design, logv, rcond=None)
    resid = logv - design @ np.array([slope, intercept])
    rms = float(np.sqrt(np.mean(resid**2)))
    lower = ok = None
    if epsilon is not None:
        lower = (1.0 / 3.0) * (series.k + 1.0) ** (1.0 - epsilon)
        ok = series.values >= lower * (1.0 - 1e-12)
    return GrowthReport(
        k=series.k,
        values=series.values,
        window=(lo, hi),
        exponent=float(slope),
        intercept=float(intercept),
        residual_rms=rms,
        epsilon=epsilon,
        lower_bound=lower,
        lower_bound_ok=ok,
    )
