"""Numerical laboratory for resolvent bounds, Cesaro means, and power-norm
growth of structured Hilbert-space operators."""

from .cesaro import (
    ErgodicProbe,
    MeanSeries,
    cesaro_identity_check,
    cesaro_mean,
    cesaro_mean2,
    ergodic_probe,
    mean_difference_decay,
    rotated_mean_norm_profile,
)
from .constructions import (
    CatalogEntry,
    DirectSumParams,
    ErgcesParams,
    TNParams,
    build_TN,
    build_bermbmp_shift,
    build_ergces,
    build_shields_counterexample,
    build_tz_block,
    ergces_power_closed_form,
    make_operator,
    shields_certified_kmax,
    tn_weights,
    tz_block_power,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    SingularError,
    SizeError,
    ValidationError,
)
from .growth import GrowthReport, growth_fit
from .kreiss import (
    AnnulusGrid,
    ClaimCheckResult,
    KreissReport,
    dyadic_ladder,
    hilbert_claim1,
    hilbert_claim2,
    hilbert_claim3,
    hilbert_claim4,
    kb2_constant,
    kreiss_constant,
    lemma21_bound,
    resolvent_norm,
    run_hilbert_claims,
    strong_kreiss_constant,
    tn_claim1_bound,
    tn_claim2_bound,
    uniform_kreiss_constant,
)
from .operators import (
    DENSE_CAP,
    SEED,
    SVD_CAP,
    Dense,
    DirectSum,
    NormEstimate,
    NormSeries,
    OperatorSpec,
    RotatedScale,
    WeightSequence,
    WeightedShift,
    adjoint,
    apply,
    apply_adjoint,
    dimension,
    is_shift_like,
    materialize,
    power_norms,
    resolvent_apply,
    spectral_norm,
)
from .reports import CheckRecord, RunConfig, emit_report, to_json_bytes, write_csv
from .reproduce import REPRODUCIBLE_IDS, reproduce

__all__ = [name for name in dir() if not name.startswith("_")]
