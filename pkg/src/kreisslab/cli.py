"""Command-line front end.

Subcommands: construct | powers | cesaro | kreiss | claims | growth |
reproduce.  Every run writes a deterministic report into --out: the
same flags and seed always produce byte-identical files.  The exit
status is nonzero when any definite check failed.

KREISSLAB_THREADS, when set, caps the linear-algebra thread pools; it
must be read before numpy loads, so the heavy imports happen inside
main().
"""

from __future__ import annotations

import argparse
import os
import sys


def _cap_threads() -> None:
    cap = os.environ.get("KREISSLAB_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _parse_radii(text: str):
    return tuple(float(part) for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kreisslab",
        description="Numerical experiments on resolvent bounds, Cesaro means, "
                    "and power-norm growth of structured operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, operator=True):
        if operator:
            p.add_argument("--operator", required=True,
                           choices=("tn", "shields", "bermbmp", "ergces", "tzblock"))
            p.add_argument("--trunc", type=int, default=16,
                           help="size parameter: n for tn, d for bermbmp/tzblock, "
                                "basis cutoff for ergces")
            p.add_argument("--eta", type=float, default=0.45,
                           help="shift exponent (also the bermbmp exponent)")
            p.add_argument("--epsilon", type=float, default=0.15)
            p.add_argument("--nmax-sum", type=int, default=8,
                           help="number of direct summands for shields")
            p.add_argument("--direction", choices=("forward", "backward"), default="forward")
        p.add_argument("--seed", type=int, default=0x5EED)
        p.add_argument("--out", default=".")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("construct", help="build a catalog operator and summarize it")
    add_common(p)

    p = sub.add_parser("powers", help="power-norm series ||T^k||")
    add_common(p)
    p.add_argument("--k-max", type=int, default=32)

    p = sub.add_parser("cesaro", help="rotated Cesaro mean norm profile")
    add_common(p)
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--angles", type=int, default=256)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("kreiss", help="resolvent-type constants")
    add_common(p)
    p.add_argument("--n-max", type=int, default=128)
    p.add_argument("--k-max", type=int, default=16)
    p.add_argument("--angles", type=int, default=64)
    p.add_argument("--radii", type=_parse_radii, default=None,
                   help="comma-separated radii > 1")

    p = sub.add_parser("claims", help="orbit inequality checks against the quadratic constant")
    add_common(p)
    p.add_argument("--n-max", type=int, default=256,
                   help="mean index sweep for the constant estimate")
    p.add_argument("--k-max", type=int, default=64, help="top of the dyadic claim ladder")
    p.add_argument("--angles", type=int, default=256)
    p.add_argument("--probes", type=int, default=64)

    p = sub.add_parser("growth", help="power-law fit of the norm series")
    add_common(p)
    p.add_argument("--k-max", type=int, default=126)
    p.add_argument("--window", type=int, nargs=2, default=(16, 126))

    p = sub.add_parser("reproduce", help="run one canonical experiment end to end")
    p.add_argument("theorem_id")
    p.add_argument("--seed", type=int, default=0x5EED)
    p.add_argument("--out", default=".")
    return parser


def _operator_entry(args):
    from .constructions import make_operator

    name = args.operator
    if name == "tn":
        return make_operator("tn", n=args.trunc, eta=args.eta)
    if name == "shields":
        return make_operator("shields", epsilon=args.epsilon, eta=args.eta,
                             n_max=args.nmax_sum)
    if name == "bermbmp":
        return make_operator("bermbmp", alpha=args.eta, direction=args.direction, d=args.trunc)
    if name == "ergces":
        return make_operator("ergces", j_max=args.trunc)
    return make_operator("tzblock", d=args.trunc)


def _config(args, command, entry=None, **extra):
    from .reports import RunConfig

    return RunConfig(
        command=command,
        operator=entry.name if entry is not None else extra.pop("operator", None),
        params=dict(entry.params) if entry is not None else {},
        n_max=getattr(args, "n_max", None),
        k_max=getattr(args, "k_max", None),
        angles=getattr(args, "angles", None),
        radii=getattr(args, "radii", None),
        seed=args.seed,
        out=str(args.out),
        format=getattr(args, "format", "json"),
        tolerances=extra.pop("tolerances", {}),
    )


def _emit(args, config, results, tables):
    from .reports import emit_report, summarize

    formats = ("json",) if args.format == "json" else ("csv",)
    emit_report(config, results, tables, args.out, formats)
    summary = summarize(results)
    print(f"{config.command}: {summary['checks']} records, "
          f"{summary['failed']} failed, {summary['vacuous_pass']} vacuous")
    return 0 if summary["all_passed"] else 1


def _cmd_construct(args) -> int:
    from .operators import WeightedShift, dimension, spectral_norm
    from .reports import CheckRecord

    entry = _operator_entry(args)
    est = spectral_norm(entry.spec, tol=1e-10)
    results = [
        CheckRecord("operator-summary", None, est.value, None, status="info",
                    detail=f"dimension={dimension(entry.spec)}; " + "; ".join(entry.notes)
                    ).to_dict()
    ]
    rows = []
    if isinstance(entry.spec, WeightedShift):
        if entry.spec.weights is not None:
            rows = [(j + 1, float(w)) for j, w in enumerate(entry.spec.weights.values)]
        else:
            rows = [(j + 1, float(r)) for j, r in enumerate(entry.spec.ratios)]
    return _emit(args, _config(args, "construct", entry), results,
                 {"operator.csv": (("index", "value"), rows)})


def _cmd_powers(args) -> int:
    from .operators import power_norms

    entry = _operator_entry(args)
    series = power_norms(entry.spec, args.k_max)
    rows = [
        (int(k), float(v), m, float(r))
        for k, v, m, r in zip(series.k, series.values, series.methods, series.residuals)
    ]
    from .reports import CheckRecord

    results = [CheckRecord("power-norms", None, float(series.values.max()), None,
                           status="info", detail=f"k <= {args.k_max}").to_dict()]
    return _emit(args, _config(args, "powers", entry), results,
                 {"powers.csv": (("k", "norm", "method", "residual"), rows)})


def _cmd_cesaro(args) -> int:
    from .cesaro import rotated_mean_norm_profile
    from .reports import CheckRecord

    entry = _operator_entry(args)
    profile = rotated_mean_norm_profile(entry.spec, args.n_max, args.angles, args.order)
    rows = []
    for i, n in enumerate(profile.n):
        m2 = float(profile.norm_m2[i]) if profile.norm_m2 is not None else None
        rows.append((int(n), float(profile.norm_m1[i]), m2, float(profile.sup_lambda[i])))
    results = [CheckRecord("mean-profile", None, float(profile.sup_lambda.max()), None,
                           status="info",
                           detail=f"order={profile.order}; "
                                  f"rotation_shortcut={profile.rotation_shortcut}; "
                                  f"angle_count={profile.angle_count}").to_dict()]
    return _emit(args, _config(args, "cesaro", entry), results,
                 {"means.csv": (("n", "norm_M1", "norm_M2", "sup_lambda"), rows)})


def _cmd_kreiss(args) -> int:
    from .kreiss import (AnnulusGrid, kb2_constant, kreiss_constant,
                         strong_kreiss_constant, uniform_kreiss_constant)
    from .reports import CheckRecord

    entry = _operator_entry(args)
    grid = AnnulusGrid(args.radii, args.angles) if args.radii else AnnulusGrid.default(args.angles)
    base = kreiss_constant(entry.spec, grid)
    ukb = uniform_kreiss_constant(entry.spec, args.n_max, args.angles)
    kb2 = kb2_constant(entry.spec, args.n_max, args.angles)
    strong = strong_kreiss_constant(entry.spec, grid, args.k_max)
    merged = base.to_dict()
    merged.update({
        "ukb_C": ukb.ukb_C,
        "kb2_C": kb2.kb2_C,
        "kb2_sum_C": kb2.kb2_sum_C,
        "strong_C": strong.strong_C,
        "n_max": args.n_max,
        "k_max": args.k_max,
    })
    results = [dict(merged, check_id="kreiss-report", passed=None, status="info")]
    rows = [(name, merged[name]) for name in
            ("kreiss_C", "ukb_C", "kb2_C", "kb2_sum_C", "strong_C")]
    return _emit(args, _config(args, "kreiss", entry), results,
                 {"constants.csv": (("constant", "value"), rows)})


def _cmd_claims(args) -> int:
    from .kreiss import kb2_constant, run_hilbert_claims
    from .reports import CheckRecord

    entry = _operator_entry(args)
    report = kb2_constant(entry.spec, args.n_max, args.angles)
    constant = float(report.kb2_sum_C)
    claims = run_hilbert_claims(entry.spec, constant, n_probes=args.probes,
                                n_top=args.k_max, seed=args.seed)
    results = [CheckRecord("kb2-sum-constant", None, constant, None, status="info").to_dict()]
    rows = []
    for claim in claims:
        results.append(claim.to_dict())
        rows.append((claim.claim_id, claim.params.get("x_seed"), claim.params.get("N"),
                     claim.params.get("M"), claim.params.get("M1"), claim.params.get("M2"),
                     claim.lhs, claim.bound, claim.margin, claim.status))
    header = ("claim", "x_seed", "N", "M", "M1", "M2", "lhs", "bound", "margin", "status")
    return _emit(args, _config(args, "claims", entry), results, {"claims.csv": (header, rows)})


def _cmd_growth(args) -> int:
    from .growth import growth_fit
    from .operators import power_norms
    from .reports import CheckRecord

    entry = _operator_entry(args)
    series = power_norms(entry.spec, args.k_max)
    epsilon = args.epsilon if args.operator == "shields" else None
    fit = growth_fit(series, tuple(args.window), epsilon=epsilon)
    results = [dict(fit.to_dict(), check_id="growth-fit", passed=None, status="info")]
    rows = []
    for i, k in enumerate(fit.k):
        lb = float(fit.lower_bound[i]) if fit.lower_bound is not None else None
        ok = bool(fit.lower_bound_ok[i]) if fit.lower_bound_ok is not None else None
        rows.append((int(k), float(fit.values[i]), lb, ok))
    return _emit(args, _config(args, "growth", entry), results,
                 {"growth.csv": (("k", "norm", "lower_bound", "pass"), rows)})


def _cmd_reproduce(args) -> int:
    from .reproduce import reproduce

    return reproduce(args.theorem_id, args.out, args.seed)


def main(argv=None) -> int:
    _cap_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    from .errors import ValidationError

    handlers = {
        "construct": _cmd_construct,
        "powers": _cmd_powers,
        "cesaro": _cmd_cesaro,
        "kreiss": _cmd_kreiss,
        "claims": _cmd_claims,
        "growth": _cmd_growth,
        "reproduce": _cmd_reproduce,
    }
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
