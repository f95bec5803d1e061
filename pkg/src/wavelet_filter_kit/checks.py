from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericSingularityError
from .filters import permutation_phat, root_of_unity
from .matrix import TOL, ComplexMatrix, adjoint, frobenius_distance, identity, right_divide

EvalFn = Callable[[complex], ComplexMatrix]


@dataclass(frozen=True)
class CheckReport:
    name: str
    residual: float
    tolerance: float
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass
class VerificationReport:
    source: str
    kind: str
    seed: int
    points: int
    tolerance: float
    checks: list[CheckReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "kind": self.kind,
            "seed": self.seed,
            "points": self.points,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


def circle_points(count: int, seed: int, radius: float = 1.0) -> np.ndarray:
    """Half a uniform grid e^(2 pi i k / P), half seeded random angles."""
    if count < 1:
        raise ValueError(f"need at least one sample point, got {count}")
    grid_count = (count + 1) // 2
    rng = np.random.default_rng(seed)
    angles = np.concatenate(
        [
            2.0 * np.pi * np.arange(grid_count) / grid_count,
            rng.uniform(0.0, 2.0 * np.pi, size=count - grid_count),
        ]
    )
    return radius * np.exp(1j * angles)


def sampled_check(
    name: str,
    residual_at: Callable[[complex], float],
    sample_points: int,
    tol: float,
    seed: int,
    max_retries: int,
    radius: float = 1.0,
) -> CheckReport:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for z in circle_points(sample_points, seed, radius):
        point = complex(z)
        for attempt in range(max_retries + 1):
            try:
                value = float(residual_at(point))
                break
            except NumericSingularityError:
                if attempt == max_retries:
                    raise
                point = complex(radius * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        worst = max(worst, value if math.isfinite(value) else math.inf)
    return CheckReport(name=name, residual=worst, tolerance=tol, samples=sample_points, seed=seed)


def check_symmetry(
    eval_fn: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
) -> CheckReport:
    eps = root_of_unity(n)
    phat = permutation_phat(n)
    return sampled_check(
        "symmetry",
        lambda z: frobenius_distance(eval_fn(eps * z), eval_fn(z) @ phat),
        sample_points,
        tol,
        seed,
        max_retries,
    )


def check_paraunitary(
    eval_fn: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
) -> CheckReport:
    eye = identity(n)

    def residual(z: complex) -> float:
        value = eval_fn(z)
        return frobenius_distance(adjoint(value) @ value, eye)

    return sampled_check("paraunitary", residual, sample_points, tol, seed, max_retries)


def check_reconstruction(
    eval_fn: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
    name: str = "perfect_reconstruction",
) -> CheckReport:
    eye = identity(n)

    def residual(z: complex) -> float:
        synthesis = adjoint(eval_fn(1.0 / z.conjugate()))
        return frobenius_distance(synthesis @ eval_fn(z), eye)

    return sampled_check(name, residual, sample_points, tol, seed, max_retries)


def quotient_decimation_check(
    fa: EvalFn,
    fb: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
) -> CheckReport:
    """F_b F_a^-1 is unchanged by z -> eps z, i.e. a function of z^N."""
    eps = root_of_unity(n)

    def quotient(z: complex) -> ComplexMatrix:
        return right_divide(fb(z), fa(z))

    return sampled_check(
        "quotient_decimation",
        lambda z: frobenius_distance(quotient(eps * z), quotient(z)),
        sample_points,
        tol,
        seed,
        max_retries,
    )


def check_conjugate_quotient(
    fa: EvalFn,
    fb: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
) -> CheckReport:
    eps = root_of_unity(n)

    def product(z: complex) -> ComplexMatrix:
        return fb(z) @ adjoint(fa(z))

    return sampled_check(
        "conjugate_quotient",
        lambda z: frobenius_distance(product(eps * z), product(z)),
        sample_points,
        tol,
        seed,
        max_retries,
    )


def check_reflected_product(
    fa: EvalFn,
    fb: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
    radius: float = 1.0,
) -> CheckReport:
    eps = root_of_unity(n)

    def product(z: complex) -> ComplexMatrix:
        return fb(z) @ adjoint(fa(1.0 / z.conjugate()))

    return sampled_check(
        "reflected_product",
        lambda z: frobenius_distance(product(eps * z), product(z)),
        sample_points,
        tol,
        seed,
        max_retries,
        radius,
    )


def check_conjugated_product(
    fa: EvalFn,
    fb: EvalFn,
    n: int,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
    radius: float = 1.0,
) -> CheckReport:
    """F_b(z) F_a(conj z)^* under z -> eps z.

    The product picks up P_hat^2 on the right of F_b, so the invariance only
    holds in general for N = 2 where P_hat is an involution.
    """
    eps = root_of_unity(n)

    def product(z: complex) -> ComplexMatrix:
        return fb(z) @ adjoint(fa(z.conjugate()))

    return sampled_check(
        "conjugated_product",
        lambda z: frobenius_distance(product(eps * z), product(z)),
        sample_points,
        tol,
        seed,
        max_retries,
        radius,
    )
