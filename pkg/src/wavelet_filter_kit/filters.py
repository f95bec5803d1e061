"""Wavelet filters in evaluation form.

A wavelet filter of band count N and index m is

    W(z) = V_m(z^N) ... V_1(z^N) W_hat_N(z),

with W_hat_N(z) = diag(1, 1/z, ..., 1/z^(N-1)) Q_N the elementary wavelet filter and
each V_j(z^N) = I + (b_j(z^N) - 1) v_j v_j^* a rank-one Blaschke perturbation of the
identity. ``FilterParameters.factors[0]`` is V_1, the factor applied first.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvariantError, NonCanonicalWarning, PoleError
from .matrix import ComplexMatrix, identity

UNIT_NORM_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def _wrap_angle(angle: float) -> float:
    wrapped = float(angle) % TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


def _require_band_count(n: int) -> None:
    if n < 2:
        raise DimensionError(f"band count must be >= 2, got {n}")


@dataclass(frozen=True)
class Factor:
    v: tuple[complex, ...]
    alpha: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", tuple(complex(x) for x in self.v))
        object.__setattr__(self, "alpha", complex(self.alpha))
        values = (*self.v, self.alpha)
        if not all(math.isfinite(x.real) and math.isfinite(x.imag) for x in values):
            raise InvariantError("factor entries must be finite")
        norm = math.sqrt(sum(abs(x) ** 2 for x in self.v))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise InvariantError(f"factor vector must have unit norm, got {norm!r}")
        if abs(self.alpha) >= 1.0:
            raise InvariantError(f"factor pole must lie in the open unit disk, got {self.alpha}")

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.v, dtype=np.complex128)

    def projector(self) -> ComplexMatrix:
        v = self.vector
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class FilterParameters:
    n: int
    rho: float
    factors: tuple[Factor, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        _require_band_count(self.n)
        if not 0.0 <= self.rho <= 1.0:
            raise InvariantError(f"rho must lie in [0, 1], got {self.rho}")
        for index, factor in enumerate(self.factors):
            if len(factor.v) != self.n:
                raise InvariantError(
                    f"factor {index} has a vector of length {len(factor.v)}, expected {self.n}"
                )
            if self.rho == 0.0:
                if factor.alpha != 0:
                    raise InvariantError(f"factor {index}: rho == 0 forces alpha == 0")
            elif abs(factor.alpha) >= self.rho:
                raise InvariantError(
                    f"factor {index}: |alpha| = {abs(factor.alpha)} is not below rho = {self.rho}"
                )

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def is_fir(self) -> bool:
        return all(factor.alpha == 0 for factor in self.factors)

    def with_factor(self, factor: Factor) -> FilterParameters:
        return FilterParameters(n=self.n, rho=self.rho, factors=(*self.factors, factor))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "rho": self.rho,
            "factors": [
                {
                    "v": [[x.real, x.imag] for x in factor.v],
                    "alpha": [factor.alpha.real, factor.alpha.imag],
                }
                for factor in self.factors
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> FilterParameters:
        factors = tuple(
            Factor(
                v=tuple(complex(re, im) for re, im in raw["v"]),
                alpha=complex(*raw.get("alpha", (0.0, 0.0))),
            )
            for raw in data.get("factors", [])
        )
        params = cls(n=int(data["n"]), rho=float(data["rho"]), factors=factors)
        if "m" in data and int(data["m"]) != params.m:
            raise InvariantError(f"declared m = {data['m']} but {params.m} factors given")
        return params


@dataclass(frozen=True)
class BoxCoordinates:
    """One factor's point in [0, pi) x [0, 2pi)^(2N-3) x [0, 2pi) x [0, rho)."""

    delta1: float
    angles: tuple[float, ...]
    theta: float = 0.0
    radius: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    def flat(self) -> list[float]:
        return [self.delta1, *self.angles, self.theta, self.radius]


@dataclass(frozen=True)
class BoxPoint:
    n: int
    coordinates: tuple[BoxCoordinates, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coordinates", tuple(self.coordinates))

    @property
    def m(self) -> int:
        return len(self.coordinates)

    def to_flat(self) -> list[float]:
        return [value for coords in self.coordinates for value in coords.flat()]

    @classmethod
    def from_flat(cls, values: Sequence[float], n: int, m: int) -> BoxPoint:
        _require_band_count(n)
        width = 2 * n
        if len(values) != width * m:
            raise DimensionError(
                f"box needs {width * m} coordinates for n={n}, m={m}, got {len(values)}"
            )
        coordinates = []
        for j in range(m):
            chunk = [float(x) for x in values[j * width : (j + 1) * width]]
            coordinates.append(
                BoxCoordinates(
                    delta1=chunk[0], angles=tuple(chunk[1:-2]), theta=chunk[-2], radius=chunk[-1]
                )
            )
        return cls(n=n, coordinates=tuple(coordinates))


@dataclass(frozen=True, eq=False)
class ModulationStructure:
    n: int
    phat: ComplexMatrix
    epsilon: complex
    q: ComplexMatrix

    @classmethod
    def for_bands(cls, n: int) -> ModulationStructure:
        return cls(n=n, phat=permutation_phat(n), epsilon=root_of_unity(n), q=dft_matrix(n))


def root_of_unity(n: int) -> complex:
    return complex(np.exp(2j * np.pi / n))


def dft_matrix(n: int) -> ComplexMatrix:
    _require_band_count(n)
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp(-2j * np.pi * jk / n) / math.sqrt(n)


def permutation_phat(n: int) -> ComplexMatrix:
    _require_band_count(n)
    phat = np.zeros((n, n), dtype=np.complex128)
    phat[0, n - 1] = 1.0
    phat[np.arange(1, n), np.arange(n - 1)] = 1.0
    return phat


def elementary_wavelet_eval(n: int, z: complex) -> ComplexMatrix:
    _require_band_count(n)
    if z == 0:
        raise PoleError("the elementary wavelet filter has its pole at z = 0")
    scaling = np.cumprod(np.r_[1.0 + 0j, np.full(n - 1, 1.0 / complex(z))])
    return scaling[:, None] * dft_matrix(n)


def elementary_scalar_unitary_eval(alpha: complex, w: complex) -> complex:
    """Blaschke factor (1 - conj(alpha) w) / (w - alpha)."""
    if w == alpha:
        raise PoleError(f"evaluation at the pole {alpha}")
    return complex((1.0 - np.conj(alpha) * w) / (w - alpha))


def scalar_product_eval(alphas: Sequence[complex], z: complex) -> complex:
    value = 1.0 + 0j
    for alpha in alphas:
        value *= elementary_scalar_unitary_eval(alpha, z)
    return complex(value)


def _rank_one_unitary(v: Sequence[complex], alpha: complex, w: complex) -> ComplexMatrix:
    vec = np.asarray(v, dtype=np.complex128)
    blaschke = elementary_scalar_unitary_eval(complex(alpha), w)
    return identity(vec.size) + (blaschke - 1.0) * np.outer(vec, vec.conj())


def elementary_unitary_eval(v: Sequence[complex], alpha: complex, z: complex) -> ComplexMatrix:
    return _rank_one_unitary(v, alpha, complex(z))


def decimated_unitary_eval(
    v: Sequence[complex], alpha: complex, n: int, z: complex
) -> ComplexMatrix:
    return _rank_one_unitary(v, alpha, complex(z) ** n)


def unitary_product_eval(factors: Sequence[Factor], z: complex) -> ComplexMatrix:
    if not factors:
        raise DimensionError("an empty product has no dimension")
    value = identity(len(factors[0].v))
    for factor in factors:
        value = elementary_unitary_eval(factor.v, factor.alpha, z) @ value
    return value


def wavelet_eval(params: FilterParameters, z: complex) -> ComplexMatrix:
    z = complex(z)
    value = elementary_wavelet_eval(params.n, z)
    zn = z**params.n
    for factor in params.factors:
        value = _rank_one_unitary(factor.v, factor.alpha, zn) @ value
    return value


def _check_box_range(coords: BoxCoordinates, n: int, rho: float, index: int) -> None:
    if len(coords.angles) != 2 * n - 3:
        raise DimensionError(
            f"factor {index}: expected {2 * n - 3} angle coordinates, got {len(coords.angles)}"
        )
    if not 0.0 <= coords.delta1 < math.pi:
        raise InvariantError(f"factor {index}: delta1 = {coords.delta1} outside [0, pi)")
    for angle in (*coords.angles, coords.theta):
        if not 0.0 <= angle < TWO_PI:
            raise InvariantError(f"factor {index}: angle {angle} outside [0, 2pi)")
    if rho == 0.0:
        if coords.radius != 0.0:
            raise InvariantError(f"factor {index}: rho == 0 forces radius 0")
    elif not 0.0 <= coords.radius < rho:
        raise InvariantError(f"factor {index}: radius {coords.radius} outside [0, {rho})")


def _vector_from_angles(n: int, delta1: float, angles: Sequence[float]) -> tuple[complex, ...]:
    moduli_angles = [delta1, *angles[: n - 2]]
    phases = [0.0, *angles[n - 2 :]]
    amplitudes = []
    sine_product = 1.0
    for delta in moduli_angles:
        amplitudes.append(sine_product * math.cos(delta))
        sine_product *= math.sin(delta)
    amplitudes.append(sine_product)
    return tuple(
        complex(a * math.cos(phi), a * math.sin(phi))
        for a, phi in zip(amplitudes, phases, strict=True)
    )


def box_to_params(box: BoxPoint, n: int, m: int, rho: float) -> FilterParameters:
    if box.n != n or box.m != m:
        raise DimensionError(f"box is for n={box.n}, m={box.m}; expected n={n}, m={m}")
    factors = []
    for index, coords in enumerate(box.coordinates):
        _check_box_range(coords, n, rho, index)
        v = _vector_from_angles(n, coords.delta1, coords.angles)
        alpha = coords.radius * complex(math.cos(coords.theta), math.sin(coords.theta))
        factors.append(Factor(v=v, alpha=alpha))
    return FilterParameters(n=n, rho=rho, factors=tuple(factors))


def canonical_vector(v: Sequence[complex]) -> tuple[np.ndarray, bool]:
    """Fix the global phase of ``v``; the flag is False when v[0] vanishes.

    A real first component is kept as is (its sign carries delta1 > pi/2);
    otherwise the first nonzero component is rotated onto the positive axis.
    """
    vec = np.asarray(v, dtype=np.complex128)
    nonzero = np.flatnonzero(np.abs(vec) > UNIT_NORM_TOL)
    if nonzero.size == 0:
        raise InvariantError("zero vector has no canonical form")
    lead = int(nonzero[0])
    if lead == 0 and vec[0].imag == 0.0:
        return vec, True
    pivot = vec[lead]
    return vec * (np.conj(pivot) / abs(pivot)), lead == 0


def params_to_box(params: FilterParameters) -> BoxPoint:
    """Inverse of ``box_to_params`` on its canonical chart.

    Secondary modulus angles come back in [0, pi/2]; phases in [0, 2pi).
    """
    n = params.n
    coordinates = []
    for index, factor in enumerate(params.factors):
        vec, canonical = canonical_vector(factor.v)
        if not canonical:
            warnings.warn(
                f"factor {index} has a vanishing first component; box point is non-canonical",
                NonCanonicalWarning,
                stacklevel=2,
            )
        if vec[0].real < 0.0 and abs(vec[0]) >= 1.0 - UNIT_NORM_TOL:
            vec = -vec
        tails = np.sqrt(np.cumsum(np.abs(vec[::-1]) ** 2)[::-1])
        delta1 = math.atan2(float(tails[1]), float(vec[0].real))
        moduli = [math.atan2(float(tails[k + 1]), abs(vec[k])) for k in range(1, n - 1)]
        phases = [_wrap_angle(np.angle(vec[k])) for k in range(1, n)]
        coordinates.append(
            BoxCoordinates(
                delta1=delta1,
                angles=(*moduli, *phases),
                theta=_wrap_angle(np.angle(factor.alpha)),
                radius=abs(factor.alpha),
            )
        )
    return BoxPoint(n=n, coordinates=tuple(coordinates))


def sample_box(
    seed: int, n: int, m: int, rho: float, max_alpha: float = 0.999
) -> BoxPoint:
    _require_band_count(n)
    if m < 0:
        raise DimensionError(f"index must be >= 0, got {m}")
    if not 0.0 <= rho <= 1.0:
        raise InvariantError(f"rho must lie in [0, 1], got {rho}")
    rng = np.random.default_rng(seed)
    radius_cap = min(rho, max_alpha)
    coordinates = []
    for _ in range(m):
        delta1 = float(rng.uniform(0.0, math.pi))
        angles = tuple(float(a) for a in rng.uniform(0.0, TWO_PI, size=2 * n - 3))
        theta = float(rng.uniform(0.0, TWO_PI))
        radius = float(rng.uniform(0.0, radius_cap)) if radius_cap > 0.0 else 0.0
        coordinates.append(BoxCoordinates(delta1, angles, theta, radius))
    return BoxPoint(n=n, coordinates=tuple(coordinates))


def sample_parameters(
    seed: int, n: int, m: int, rho: float, max_alpha: float = 0.999
) -> FilterParameters:
    return box_to_params(sample_box(seed, n, m, rho, max_alpha), n, m, rho)
