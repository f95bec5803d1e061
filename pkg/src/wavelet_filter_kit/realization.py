"""State-space realizations x(n+1) = A x(n) + B u(n), y(n) = C x(n) + D u(n).

The transfer function is F(z) = C (zI - A)^-1 B + D. Wavelet filters are
realized by cascading one realization per elementary unitary factor onto the
realization of the elementary wavelet filter, so the state dimension equals
the McMillan degree N (N - 1) / 2 + N m.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    IndefiniteCertificateWarning,
    InvariantError,
    PoleError,
    SingularMatrixError,
)
from .filters import FilterParameters, dft_matrix
from .matrix import (
    SINGULAR_CONDITION,
    TOL,
    ComplexMatrix,
    adjoint,
    as_matrix,
    condition_estimate,
    identity,
    is_positive_definite,
    mat_mul,
    orthonormal_columns,
    solve_linear,
)


def _block(value, rows: int, cols: int, label: str) -> ComplexMatrix:
    if np.size(value) == 0 and rows * cols == 0:
        matrix = np.zeros((rows, cols), dtype=np.complex128)
    else:
        matrix = as_matrix(value)
    if matrix.shape != (rows, cols):
        raise DimensionError(f"block {label} has shape {matrix.shape}, expected {(rows, cols)}")
    matrix = matrix.copy()
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class Realization:
    a: ComplexMatrix
    b: ComplexMatrix
    c: ComplexMatrix
    d: ComplexMatrix

    def __post_init__(self) -> None:
        d = as_matrix(self.d)
        outputs, inputs = d.shape
        a = np.asarray(self.a)
        p = a.shape[0] if a.ndim == 2 else int(a.size > 0)
        object.__setattr__(self, "a", _block(self.a, p, p, "A"))
        object.__setattr__(self, "b", _block(self.b, p, inputs, "B"))
        object.__setattr__(self, "c", _block(self.c, outputs, p, "C"))
        object.__setattr__(self, "d", _block(d, outputs, inputs, "D"))

    @property
    def state_dim(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.d.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.d.shape[0]

    @property
    def n(self) -> int:
        return self.n_outputs

    def system_matrix(self) -> ComplexMatrix:
        return np.block([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_system_matrix(
        cls, m, state_dim: int, n_inputs: int | None = None
    ) -> Realization:
        matrix = as_matrix(m)
        p = state_dim
        inputs = matrix.shape[1] - p if n_inputs is None else n_inputs
        if p < 0 or inputs < 0 or p + inputs != matrix.shape[1] or p > matrix.shape[0]:
            raise DimensionError(
                f"cannot split a {matrix.shape} system matrix with state dimension {p}"
            )
        return cls(a=matrix[:p, :p], b=matrix[:p, p:], c=matrix[p:, :p], d=matrix[p:, p:])

    def to_dict(self) -> dict:
        def encode(block: ComplexMatrix) -> dict:
            rows, cols = block.shape
            return {
                "rows": rows,
                "cols": cols,
                "data": [[float(x.real), float(x.imag)] for x in block.ravel()],
            }

        return {
            "n": self.n,
            "state_dim": self.state_dim,
            "a": encode(self.a),
            "b": encode(self.b),
            "c": encode(self.c),
            "d": encode(self.d),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Realization:
        def decode(raw: dict, label: str) -> ComplexMatrix:
            rows, cols = int(raw["rows"]), int(raw["cols"])
            values = [complex(re, im) for re, im in raw["data"]]
            if len(values) != rows * cols:
                raise DimensionError(
                    f"block {label} declares {rows}x{cols} but holds {len(values)} entries"
                )
            return np.array(values, dtype=np.complex128).reshape(rows, cols)

        realization = cls(
            a=decode(data["a"], "A"),
            b=decode(data["b"], "B"),
            c=decode(data["c"], "C"),
            d=decode(data["d"], "D"),
        )
        if realization.n_inputs != realization.n_outputs:
            raise DimensionError(
                f"block D must be N x N, got {realization.n_outputs}x{realization.n_inputs}"
            )
        if "state_dim" in data and int(data["state_dim"]) != realization.state_dim:
            raise InvariantError(
                f"declared state_dim = {data['state_dim']} but A is {realization.state_dim}"
            )
        if "n" in data and int(data["n"]) != realization.n:
            raise InvariantError(f"declared n = {data['n']} but D has {realization.n} rows")
        return realization


def realize_elementary_wavelet(n: int) -> Realization:
    """Jordan chains of lengths 1..N-1 fed through a permutation, then Q_N."""
    if n < 2:
        raise DimensionError(f"band count must be >= 2, got {n}")
    p = n * (n - 1) // 2
    a = np.zeros((p, p), dtype=np.complex128)
    b_perm = np.zeros((p, n), dtype=np.complex128)
    c = np.zeros((n, p), dtype=np.complex128)
    d_perm = np.zeros((n, n), dtype=np.complex128)
    d_perm[0, 0] = 1.0
    for length in range(1, n):
        first = length * (length - 1) // 2
        last = first + length - 1
        for state in range(first, last):
            a[state, state + 1] = 1.0
        b_perm[last, length] = 1.0
        c[length, first] = 1.0
    q = dft_matrix(n)
    return Realization(a=a, b=b_perm @ q, c=c, d=d_perm @ q)


def _psi_roots(alpha: complex, n: int) -> np.ndarray:
    principal = complex(alpha) ** (1.0 / n) if alpha != 0 else 0j
    order = [0, 2, 1, 3] if n == 4 else list(range(n))
    return np.array([principal * np.exp(2j * np.pi * k / n) for k in order])


def realize_psi(alpha: complex, n: int) -> Realization:
    """Single-input single-output realization of (1 - |alpha|^2) / (z^n - alpha)."""
    alpha = complex(alpha)
    if abs(alpha) >= 1.0:
        raise InvariantError(f"pole must lie in the open unit disk, got {alpha}")
    if n < 1:
        raise DimensionError(f"decimation order must be >= 1, got {n}")
    gain = math.sqrt(1.0 - abs(alpha) ** 2)
    a = np.diag(_psi_roots(alpha, n)) + np.diag(np.ones(n - 1), k=1)
    b = np.zeros((n, 1), dtype=np.complex128)
    b[-1, 0] = gain
    c = np.zeros((1, n), dtype=np.complex128)
    c[0, 0] = gain
    return Realization(a=a, b=b, c=c, d=np.zeros((1, 1)))


def realize_decimated_unitary(v: Sequence[complex], alpha: complex, n: int) -> Realization:
    """Lift the psi core of order ``n`` to I + (b(z^n) - 1) v v^* with v of any length."""
    vec = np.asarray(v, dtype=np.complex128).reshape(-1, 1)
    if abs(float(np.linalg.norm(vec)) - 1.0) > 1e-12:
        raise InvariantError("factor vector must have unit norm")
    core = realize_psi(alpha, n)
    projector = vec @ adjoint(vec)
    return Realization(
        a=core.a,
        b=core.b @ adjoint(vec),
        c=vec @ core.c,
        d=identity(vec.shape[0]) - (1.0 + np.conj(complex(alpha))) * projector,
    )


def cascade(delta: Realization, a: Realization) -> Realization:
    if delta.n_inputs != a.n_outputs:
        raise DimensionError(
            f"cannot feed {a.n_outputs} outputs into {delta.n_inputs} inputs"
        )
    p_delta, p_a = delta.state_dim, a.state_dim
    lower_left = np.zeros((p_a, p_delta), dtype=np.complex128)
    return Realization(
        a=np.block([[delta.a, mat_mul(delta.b, a.c)], [lower_left, a.a]]),
        b=np.vstack([mat_mul(delta.b, a.d), a.b]),
        c=np.hstack([delta.c, mat_mul(delta.d, a.c)]),
        d=mat_mul(delta.d, a.d),
    )


def realize_wavelet(params: FilterParameters) -> Realization:
    realization = realize_elementary_wavelet(params.n)
    for factor in params.factors:
        lift = realize_decimated_unitary(factor.v, factor.alpha, params.n)
        realization = cascade(lift, realization)
    return realization


def eval_realization(r: Realization, z: complex) -> ComplexMatrix:
    if r.state_dim == 0:
        return np.array(r.d)
    pencil = complex(z) * identity(r.state_dim) - r.a
    try:
        resolvent_b = solve_linear(pencil, np.array(r.b))
    except SingularMatrixError as exc:
        raise PoleError(f"z = {complex(z)} is a pole of the realization: {exc}") from exc
    return r.c @ resolvent_b + r.d


def impulse_response(r: Realization, horizon: int) -> list[ComplexMatrix]:
    if horizon < 1:
        raise DimensionError(f"horizon must be >= 1, got {horizon}")
    response = [np.array(r.d)]
    state = np.array(r.b)
    for _ in range(1, horizon):
        response.append(r.c @ state)
        state = r.a @ state
    return response


def mcmillan_degree(params: FilterParameters) -> int:
    return params.n * (params.n - 1) // 2 + params.n * params.m


def spectral_radius(params: FilterParameters) -> float:
    if not params.factors:
        return 0.0
    return max(abs(factor.alpha) ** (1.0 / params.n) for factor in params.factors)


def similarity_transform(r: Realization, t) -> Realization:
    t = as_matrix(t)
    if t.shape != (r.state_dim, r.state_dim):
        raise DimensionError(f"transform {t.shape} does not match state dimension {r.state_dim}")
    return Realization(
        a=solve_linear(t, r.a @ t),
        b=solve_linear(t, np.array(r.b)),
        c=r.c @ t,
        d=r.d,
    )


@dataclass(frozen=True, eq=False)
class SteinCertificate:
    h: ComplexMatrix
    residuals: tuple[float, float, float]
    hermitian_error: float
    positive_definite: bool
    condition: float
    iterations: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    def to_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "hermitian_error": self.hermitian_error,
            "positive_definite": self.positive_definite,
            "condition": self.condition,
            "iterations": self.iterations,
        }


def stein_blocks(r: Realization, h: ComplexMatrix) -> tuple[float, float, float]:
    a, b, c, d = r.a, r.b, r.c, r.d
    return (
        float(np.linalg.norm(adjoint(a) @ h @ a + adjoint(c) @ c - h)),
        float(np.linalg.norm(adjoint(a) @ h @ b + adjoint(c) @ d)),
        float(np.linalg.norm(adjoint(b) @ h @ b + adjoint(d) @ d - identity(r.n_inputs))),
    )


def stein_residual(r: Realization, h: ComplexMatrix) -> float:
    """||M* diag(H, I) M - diag(H, I)|| for the system matrix M."""
    if r.n_inputs != r.n_outputs:
        raise DimensionError("the compact Stein residual needs a square transfer function")
    m = r.system_matrix()
    p = r.state_dim
    weight = identity(m.shape[0])
    weight[:p, :p] = h
    return float(np.linalg.norm(adjoint(m) @ weight @ m - weight))


def stein_verify(
    r: Realization, max_iterations: int = 64, tol: float = 1e-12
) -> SteinCertificate:
    """Solve A*HA + C*C = H by the doubling series and report all three blocks."""
    p = r.state_dim
    if p == 0:
        h = np.zeros((0, 0), dtype=np.complex128)
        return SteinCertificate(h, stein_blocks(r, h), 0.0, True, 1.0, 0)
    a_power = np.array(r.a)
    h = adjoint(r.c) @ r.c
    iterations = 0
    converged = False
    with np.errstate(over="ignore", invalid="ignore"):
        for iterations in range(1, max_iterations + 1):
            increment = adjoint(a_power) @ h @ a_power
            h = h + increment
            a_power = a_power @ a_power
            if not np.all(np.isfinite(h)):
                break
            if np.linalg.norm(increment) <= tol * max(1.0, float(np.linalg.norm(h))):
                converged = True
                break
    if not converged:
        raise ConvergenceError(
            f"Stein series did not converge in {iterations} doublings; spectral radius >= 1?"
        )
    hermitian_error = float(np.linalg.norm(h - adjoint(h)))
    h = 0.5 * (h + adjoint(h))
    condition = condition_estimate(h)
    if condition > SINGULAR_CONDITION:
        raise SingularMatrixError("Stein solution H is singular", condition)
    positive = is_positive_definite(h)
    if not positive:
        warnings.warn(
            "Stein solution H is indefinite", IndefiniteCertificateWarning, stacklevel=2
        )
    return SteinCertificate(
        h=h,
        residuals=stein_blocks(r, h),
        hermitian_error=hermitian_error,
        positive_definite=positive,
        condition=condition,
        iterations=iterations,
    )


@dataclass(frozen=True)
class MinimalityReport:
    controllability_rank: int
    observability_rank: int
    state_dim: int

    @property
    def minimal(self) -> bool:
        return self.controllability_rank == self.state_dim == self.observability_rank

    def to_dict(self) -> dict:
        return {
            "controllability_rank": self.controllability_rank,
            "observability_rank": self.observability_rank,
            "state_dim": self.state_dim,
            "minimal": self.minimal,
        }


def _krylov_rank(a: ComplexMatrix, b: ComplexMatrix, rel_tol: float) -> int:
    """Rank of [B, AB, ..., A^(p-1) B] grown one orthogonalized block at a time."""
    p = a.shape[0]
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    if p == 0 or scale == 0.0:
        return 0
    threshold = rel_tol * scale
    basis = orthonormal_columns(b, threshold)
    frontier = basis
    while basis.shape[1] < p and frontier.shape[1] > 0:
        candidate = a @ frontier
        for _ in range(2):
            candidate = candidate - basis @ (adjoint(basis) @ candidate)
        frontier = orthonormal_columns(candidate, threshold)
        basis = np.hstack([basis, frontier])
    return min(basis.shape[1], p)


def verify_minimality(r: Realization, rel_tol: float = TOL) -> MinimalityReport:
    return MinimalityReport(
        controllability_rank=_krylov_rank(np.array(r.a), np.array(r.b), rel_tol),
        observability_rank=_krylov_rank(adjoint(r.a), adjoint(r.c), rel_tol),
        state_dim=r.state_dim,
    )
