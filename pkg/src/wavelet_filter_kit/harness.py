from __future__ import annotations

import math
from collections.abc import Callable

from .checks import (
    CheckReport,
    EvalFn,
    VerificationReport,
    check_paraunitary,
    check_reconstruction,
    check_symmetry,
    sampled_check,
)
from .config import WaveletKitConfig
from .errors import NumericSingularityError
from .filters import FilterParameters, wavelet_eval
from .matrix import frobenius_distance
from .realization import (
    Realization,
    eval_realization,
    mcmillan_degree,
    realize_wavelet,
    stein_verify,
    verify_minimality,
)


def _guarded(name: str, cfg: WaveletKitConfig, seed: int, run: Callable[[], CheckReport]):
    try:
        return run()
    except NumericSingularityError:
        return CheckReport(
            name=name,
            residual=math.inf,
            tolerance=cfg.verification.tolerance,
            samples=cfg.verification.points,
            seed=seed,
        )


def _exact(name: str, residual: float, seed: int) -> CheckReport:
    return CheckReport(name=name, residual=float(residual), tolerance=0.0, samples=1, seed=seed)


def _circle_checks(
    eval_fn: EvalFn, n: int, cfg: WaveletKitConfig, seed: int
) -> list[CheckReport]:
    options = cfg.verification
    args = (eval_fn, n, options.points, options.tolerance, seed, options.max_retries)
    return [
        _guarded("symmetry", cfg, seed, lambda: check_symmetry(*args)),
        _guarded("paraunitary", cfg, seed, lambda: check_paraunitary(*args)),
        _guarded(
            "frequency_pr", cfg, seed, lambda: check_reconstruction(*args, name="frequency_pr")
        ),
    ]


def _state_checks(r: Realization, cfg: WaveletKitConfig, seed: int) -> list[CheckReport]:
    minimality = verify_minimality(r)
    lowest_rank = min(minimality.controllability_rank, minimality.observability_rank)
    try:
        certificate = stein_verify(r, cfg.stein.max_iterations, cfg.stein.tolerance)
        stein, hermitian = certificate.max_residual, certificate.hermitian_error
    except NumericSingularityError:
        stein = hermitian = math.inf
    return [
        _exact("minimality", r.state_dim - lowest_rank, seed),
        CheckReport("stein", stein, cfg.verification.tolerance, 1, seed),
        CheckReport("stein_hermitian", hermitian, cfg.verification.hermitian_tolerance, 1, seed),
    ]


def degree_defect(r: Realization) -> int:
    """Distance of the state dimension from N (N - 1) / 2 + N m for any m >= 0."""
    n, p = r.n, r.state_dim
    base = n * (n - 1) // 2
    return base - p if p < base else (p - base) % n


def verify_parameters(
    params: FilterParameters, cfg: WaveletKitConfig, seed: int, source: str = "<memory>"
) -> VerificationReport:
    options = cfg.verification
    report = VerificationReport(
        source=source,
        kind="parameters",
        seed=seed,
        points=options.points,
        tolerance=options.tolerance,
    )
    report.checks.extend(_circle_checks(lambda z: wavelet_eval(params, z), params.n, cfg, seed))
    realization = realize_wavelet(params)
    report.checks.append(
        _exact("degree", abs(realization.state_dim - mcmillan_degree(params)), seed)
    )

    def transfer_gap(z: complex) -> float:
        return frobenius_distance(eval_realization(realization, z), wavelet_eval(params, z))

    report.checks.append(
        _guarded(
            "transfer",
            cfg,
            seed,
            lambda: sampled_check(
                "transfer",
                transfer_gap,
                options.points,
                options.tolerance,
                seed,
                options.max_retries,
            ),
        )
    )
    report.checks.extend(_state_checks(realization, cfg, seed))
    return report


def verify_realization(
    r: Realization, cfg: WaveletKitConfig, seed: int, source: str = "<memory>"
) -> VerificationReport:
    report = VerificationReport(
        source=source,
        kind="realization",
        seed=seed,
        points=cfg.verification.points,
        tolerance=cfg.verification.tolerance,
    )
    report.checks.extend(_circle_checks(lambda z: eval_realization(r, z), r.n, cfg, seed))
    report.checks.append(_exact("degree", degree_defect(r), seed))
    report.checks.extend(_state_checks(r, cfg, seed))
    return report
