from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .checks import CheckReport, check_reconstruction
from .errors import DimensionError, InvariantError, UnsupportedModeError
from .filters import FilterParameters, wavelet_eval
from .matrix import TOL
from .realization import Realization, impulse_response, realize_wavelet

Signal = NDArray[np.complex128]
TAP_TRIM = 1e-14


def as_signal(samples: ArrayLike) -> Signal:
    signal = np.asarray(samples, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(signal)):
        raise InvariantError("signal samples must be finite")
    return signal


@dataclass(frozen=True, eq=False)
class SubbandFilterSet:
    taps: tuple[Signal, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "taps", tuple(as_signal(h) for h in self.taps))
        if len(self.taps) < 2:
            raise DimensionError(f"need at least two band filters, got {len(self.taps)}")
        if any(h.size == 0 for h in self.taps):
            raise DimensionError("band filters must have at least one tap")

    @property
    def n(self) -> int:
        return len(self.taps)

    @property
    def delay(self) -> int:
        return max(h.size for h in self.taps) - 1

    def energy(self) -> float:
        return float(sum(np.vdot(h, h).real for h in self.taps))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delay": self.delay,
            "taps": [[[float(x.real), float(x.imag)] for x in h] for h in self.taps],
        }


@dataclass(frozen=True, eq=False)
class SubbandSet:
    bands: tuple[Signal, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bands", tuple(as_signal(b) for b in self.bands))
        lengths = {band.size for band in self.bands}
        if len(lengths) > 1:
            raise DimensionError(f"bands must have equal length, got {sorted(lengths)}")

    @property
    def n(self) -> int:
        return len(self.bands)

    @property
    def band_length(self) -> int:
        return self.bands[0].size if self.bands else 0

    def energy(self) -> float:
        return float(sum(np.vdot(b, b).real for b in self.bands))


def _trim(h: Signal) -> Signal:
    keep = np.flatnonzero(np.abs(h) > TAP_TRIM)
    return h[: int(keep[-1]) + 1] if keep.size else h[:1]


def subband_filters(params: FilterParameters) -> SubbandFilterSet:
    """Impulse responses of the first column of W(z); FIR filters only."""
    if not params.is_fir:
        raise UnsupportedModeError(
            "time-domain band filters need an FIR filter (every alpha = 0)"
        )
    realization = realize_wavelet(params)
    response = impulse_response(realization, realization.state_dim + 1)
    column = np.array([h[:, 0] for h in response])
    return SubbandFilterSet(taps=tuple(_trim(column[:, k]) for k in range(params.n)))


def _check_factor(n: int) -> None:
    if n < 1:
        raise DimensionError(f"rate factor must be >= 1, got {n}")


def decimate(x: ArrayLike, n: int) -> Signal:
    _check_factor(n)
    return as_signal(x)[::n]


def expand(x: ArrayLike, n: int) -> Signal:
    _check_factor(n)
    signal = as_signal(x)
    out = np.zeros(signal.size * n, dtype=np.complex128)
    out[::n] = signal
    return out


def circular_convolve(x: ArrayLike, h: ArrayLike) -> Signal:
    """y_t = sum_s h_s x_((t - s) mod L)."""
    signal, taps = as_signal(x), as_signal(h)
    if taps.size > signal.size:
        raise DimensionError(
            f"filter of length {taps.size} is longer than the signal ({signal.size})"
        )
    out = np.zeros_like(signal)
    for shift, tap in enumerate(taps):
        if tap != 0:
            out += tap * np.roll(signal, shift)
    return out


def _require_bands(filters: SubbandFilterSet, n: int) -> None:
    if filters.n != n:
        raise DimensionError(f"filter set has {filters.n} bands, expected {n}")


def analyze(x: ArrayLike, filters: SubbandFilterSet, n: int) -> SubbandSet:
    signal = as_signal(x)
    _require_bands(filters, n)
    if signal.size % n:
        raise DimensionError(f"signal length {signal.size} is not divisible by {n}")
    scale = math.sqrt(n)
    return SubbandSet(
        bands=tuple(decimate(circular_convolve(signal, scale * h), n) for h in filters.taps)
    )


def synthesis_taps(filters: SubbandFilterSet) -> tuple[Signal, ...]:
    """g_k(t) = conj(h_k(T - t)) with the shared delay T."""
    width = filters.delay + 1
    padded = [np.pad(h, (0, width - h.size)) for h in filters.taps]
    return tuple(np.conj(h[::-1]) for h in padded)


def synthesize(bands: SubbandSet, filters: SubbandFilterSet, n: int) -> Signal:
    _require_bands(filters, n)
    if bands.n != n:
        raise DimensionError(f"got {bands.n} bands, expected {n}")
    scale = math.sqrt(n)
    out = np.zeros(bands.band_length * n, dtype=np.complex128)
    for band, g in zip(bands.bands, synthesis_taps(filters), strict=True):
        out += circular_convolve(expand(band, n), scale * g)
    return out


def frequency_pr_check(
    params: FilterParameters,
    sample_points: int = 256,
    tol: float = TOL,
    seed: int = 0,
    max_retries: int = 8,
) -> CheckReport:
    return check_reconstruction(
        lambda z: wavelet_eval(params, z),
        params.n,
        sample_points,
        tol,
        seed,
        max_retries,
        name="frequency_pr",
    )


def simulate(
    r: Realization, inputs: ArrayLike, x0: ArrayLike | None = None
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    u = np.asarray(inputs, dtype=np.complex128)
    if u.ndim == 1 and r.n_inputs == 1:
        u = u.reshape(-1, 1)
    if u.ndim != 2 or u.shape[1] != r.n_inputs:
        raise DimensionError(f"inputs need {r.n_inputs} columns, got shape {u.shape}")
    state = (
        np.zeros(r.state_dim, dtype=np.complex128)
        if x0 is None
        else np.asarray(x0, dtype=np.complex128).ravel()
    )
    if state.size != r.state_dim:
        raise DimensionError(f"initial state has {state.size} entries, expected {r.state_dim}")
    outputs = np.zeros((u.shape[0], r.n_outputs), dtype=np.complex128)
    for step, sample in enumerate(u):
        outputs[step] = r.c @ state + r.d @ sample
        state = r.a @ state + r.b @ sample
    return outputs, state


@dataclass(frozen=True, eq=False)
class DecayEnvelope:
    norms: NDArray[np.float64]

    def slope(self, start: int, stop: int) -> float:
        if not 0 <= start < stop < self.norms.size:
            raise DimensionError(f"window [{start}, {stop}] outside 0..{self.norms.size - 1}")
        return float((np.log(self.norms[stop]) - np.log(self.norms[start])) / (stop - start))

    def bound(self, rate: float, warmup: int) -> float:
        """Smallest beta with ||x(n)|| <= beta ||x(0)|| rate^n over the first steps."""
        head = self.norms[: warmup + 1]
        return float(np.max(head / (self.norms[0] * rate ** np.arange(head.size))))


def decay_envelope(r: Realization, x0: ArrayLike, steps: int) -> DecayEnvelope:
    state = np.asarray(x0, dtype=np.complex128).ravel()
    if state.size != r.state_dim:
        raise DimensionError(f"initial state has {state.size} entries, expected {r.state_dim}")
    norms = [float(np.linalg.norm(state))]
    for _ in range(steps):
        state = r.a @ state
        norms.append(float(np.linalg.norm(state)))
    return DecayEnvelope(norms=np.array(norms))


def circular_shift(x: ArrayLike, delay: int) -> Signal:
    return np.roll(as_signal(x), delay)


def reconstruction_error(x: ArrayLike, reconstruction: ArrayLike, delay: int) -> float:
    reference = circular_shift(x, delay)
    return float(np.linalg.norm(as_signal(reconstruction) - reference))


def energy(x: ArrayLike) -> float:
    signal = as_signal(x)
    return float(np.vdot(signal, signal).real)
