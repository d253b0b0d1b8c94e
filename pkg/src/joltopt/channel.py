"""IRS-reflected channel model: cascade geometry, array responses, quantized
phase selection, and per-link rates.

The reflect panel is a uniform linear array of M elements at spacing d. Both
cascade legs (stop point -> IRS, IRS -> device) are line-of-sight with path
gain sqrt(alpha)/distance and the usual geometric phase progression
-(2pi/lambda) * d * (m-1) * cos(angle-of-arrival), where the direction
cosine is (X_irs - x) / distance for each leg.

Per element the panel can only apply one of N discrete rotations
Upsilon = {2*pi*k/N : k = 0..N-1}. Each element's rotation is chosen
independently as the circular nearest level to the summed cascade phase of
that element; the residual misalignment is therefore at most pi/N per
element, which lower-bounds the combined gain by cos(pi/N) * M * |h1| * |h2|.
(Note this per-element rule does not coordinate a common residual direction
across elements, so it is not the global optimum over all N^M vectors; it is
the contracted selection rule.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, ParameterError
from .scenario import RadioParams

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArrayResponse:
    """Magnitude and per-element phases of one cascade leg."""

    magnitude: float
    phases: np.ndarray  # (M,) angles in [0, 2pi)

    def __post_init__(self):
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        if self.magnitude < 0:
            raise ParameterError("magnitude must be non-negative")


@dataclass(frozen=True)
class PhaseVector:
    """Quantized per-element rotations, kept as exact level indices."""

    levels: int
    level_indices: np.ndarray  # (M,) ints in [0, levels)

    def __post_init__(self):
        idx = np.asarray(self.level_indices, dtype=int)
        object.__setattr__(self, "level_indices", idx)
        if self.levels < 2:
            raise ParameterError("levels must be >= 2")
        if np.any(idx < 0) or np.any(idx >= self.levels):
            raise ParameterError("level indices out of range")

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * self.level_indices / self.levels


@dataclass(frozen=True)
class LinkBudget:
    distance_uav_irs: float
    distance_irs_device: float
    effective_gain: float
    rate_bps: float


def distances(stop, device, irs) -> tuple[float, float]:
    """Cascade leg lengths for one (stop point, device) pair.

    `stop` is (x, y, altitude), `device` is (x, y) at ground level, `irs` is
    (x, y, height).
    """
    sx, sy, sz = float(stop[0]), float(stop[1]), float(stop[2])
    dx, dy = float(device[0]), float(device[1])
    ix, iy, iz = float(irs[0]), float(irs[1]), float(irs[2])
    d_uav_irs = math.sqrt((sx - ix) ** 2 + (sy - iy) ** 2 + (sz - iz) ** 2)
    d_irs_device = math.sqrt((ix - dx) ** 2 + (iy - dy) ** 2 + iz**2)
    if d_uav_irs == 0.0:
        raise DegenerateGeometryError("stop point coincides with the IRS")
    if d_irs_device == 0.0:
        raise DegenerateGeometryError("device coincides with the IRS")
    return d_uav_irs, d_irs_device


def _leg_phases(direction_cosine: float, radio: RadioParams) -> np.ndarray:
    m = np.arange(radio.num_elements, dtype=float)
    raw = -(TWO_PI / radio.wavelength_m) * radio.element_spacing_m * m * direction_cosine
    return np.mod(raw, TWO_PI)


def array_responses(stop, device, irs, radio: RadioParams) -> tuple[ArrayResponse, ArrayResponse]:
    """ULA responses of the two cascade legs."""
    d_uav_irs, d_irs_device = distances(stop, device, irs)
    cos_uav = (float(irs[0]) - float(stop[0])) / d_uav_irs
    cos_dev = (float(irs[0]) - float(device[0])) / d_irs_device
    resp_uav = ArrayResponse(
        magnitude=math.sqrt(radio.path_loss_1) / d_uav_irs,
        phases=_leg_phases(cos_uav, radio),
    )
    resp_dev = ArrayResponse(
        magnitude=math.sqrt(radio.path_loss_2) / d_irs_device,
        phases=_leg_phases(cos_dev, radio),
    )
    return resp_uav, resp_dev


def _nearest_levels(targets: np.ndarray, levels: int) -> np.ndarray:
    """Circular nearest grid level per target angle.

    Exact half-way ties resolve to the numerically smaller angle in
    [0, 2pi): the lower neighbor, except when the upper neighbor wraps to 0.
    """
    x = np.mod(targets, TWO_PI) * levels / TWO_PI  # in [0, levels)
    k_lo = np.floor(x)
    frac = x - k_lo
    k = np.where(frac < 0.5, k_lo, k_lo + 1.0)
    tie = frac == 0.5
    if np.any(tie):
        upper_wraps = (k_lo + 1.0) >= levels
        k = np.where(tie, np.where(upper_wraps, k_lo + 1.0, k_lo), k)
    return np.mod(k.astype(int), levels)


def quantize_phases(resp_uav: ArrayResponse, resp_dev: ArrayResponse, levels: int) -> PhaseVector:
    """Per element, the grid rotation circularly nearest to the summed
    cascade phase of that element."""
    if len(resp_uav.phases) != len(resp_dev.phases):
        raise ParameterError("responses must have the same element count")
    targets = np.mod(resp_uav.phases + resp_dev.phases, TWO_PI)
    return PhaseVector(levels=levels, level_indices=_nearest_levels(targets, levels))


def _combine(resp_uav: ArrayResponse, resp_dev: ArrayResponse, thetas: np.ndarray) -> float:
    residual = thetas - (resp_uav.phases + resp_dev.phases)
    # The modulus is invariant under a global rotation; anchoring on the
    # first element keeps the M=1 case exact in floating point.
    residual = residual - residual[0]
    total = np.exp(1j * residual).sum()
    return float(resp_uav.magnitude * resp_dev.magnitude * abs(total))


def effective_gain(resp_uav: ArrayResponse, resp_dev: ArrayResponse, phases: PhaseVector) -> float:
    return _combine(resp_uav, resp_dev, phases.thetas)


def rate_from_gain(gain: float, radio: RadioParams) -> float:
    snr = radio.tx_power_w * gain * gain / radio.noise_power_w
    return radio.bandwidth_hz * math.log2(1.0 + snr)


def link_budget(stop, device, irs, radio: RadioParams, phases: PhaseVector) -> LinkBudget:
    """Full per-link budget for a given phase vector."""
    if len(phases.level_indices) != radio.num_elements:
        raise ParameterError("phase vector length must equal num_elements")
    d_uav_irs, d_irs_device = distances(stop, device, irs)
    resp_uav, resp_dev = array_responses(stop, device, irs, radio)
    gain = _combine(resp_uav, resp_dev, phases.thetas)
    return LinkBudget(
        distance_uav_irs=d_uav_irs,
        distance_irs_device=d_irs_device,
        effective_gain=gain,
        rate_bps=rate_from_gain(gain, radio),
    )


def best_link_budget(stop, device, irs, radio: RadioParams) -> tuple[LinkBudget, PhaseVector]:
    """Quantized-phase link budget (the selection actually deployed)."""
    resp_uav, resp_dev = array_responses(stop, device, irs, radio)
    phases = quantize_phases(resp_uav, resp_dev, radio.phase_levels)
    budget = link_budget(stop, device, irs, radio, phases)
    return budget, phases


def rate_matrix(scenario, stops_xy) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized quantized-phase rates for every (device, stop) pair.

    Returns (rates (N,K), gains (N,K), level_indices (N,K,M)). Matches the
    scalar path bit-for-bit on the shared formulas; the scalar ops remain
    the reference implementation.
    """
    radio = scenario.radio
    stops_xy = np.atleast_2d(np.asarray(stops_xy, dtype=float))
    ix, iy, iz = scenario.irs_position
    h = scenario.uav_altitude_m

    d_uav = np.sqrt(
        (stops_xy[:, 0] - ix) ** 2 + (stops_xy[:, 1] - iy) ** 2 + (h - iz) ** 2
    )  # (K,)
    dev = scenario.device_xy
    d_dev = np.sqrt((ix - dev[:, 0]) ** 2 + (iy - dev[:, 1]) ** 2 + iz**2)  # (N,)
    if np.any(d_uav == 0.0):
        raise DegenerateGeometryError("a stop point coincides with the IRS")
    if np.any(d_dev == 0.0):
        raise DegenerateGeometryError("a device coincides with the IRS")

    m = np.arange(radio.num_elements, dtype=float)
    scale = -(TWO_PI / radio.wavelength_m) * radio.element_spacing_m
    cos_uav = (ix - stops_xy[:, 0]) / d_uav  # (K,)
    cos_dev = (ix - dev[:, 0]) / d_dev  # (N,)
    ph_uav = np.mod(scale * m[None, :] * cos_uav[:, None], TWO_PI)  # (K, M)
    ph_dev = np.mod(scale * m[None, :] * cos_dev[:, None], TWO_PI)  # (N, M)

    targets = np.mod(ph_dev[:, None, :] + ph_uav[None, :, :], TWO_PI)  # (N, K, M)
    levels = _nearest_levels(targets, radio.phase_levels)
    thetas = TWO_PI * levels / radio.phase_levels
    residual = thetas - (ph_dev[:, None, :] + ph_uav[None, :, :])
    residual = residual - residual[..., :1]
    total = np.abs(np.exp(1j * residual).sum(axis=-1))  # (N, K)

    mag = (math.sqrt(radio.path_loss_1) / d_uav)[None, :] * (
        math.sqrt(radio.path_loss_2) / d_dev
    )[:, None]
    gains = mag * total
    snr = radio.tx_power_w * gains * gains / radio.noise_power_w
    rates = radio.bandwidth_hz * np.log2(1.0 + snr)
    return rates, gains, levels


__all__ = [
    "ArrayResponse",
    "LinkBudget",
    "PhaseVector",
    "array_responses",
    "best_link_budget",
    "distances",
    "effective_gain",
    "link_budget",
    "quantize_phases",
    "rate_from_gain",
    "rate_matrix",
]
