"""Physical-layer arithmetic for hybrid quantum-classical fibers.

Powers are normalized photon numbers: quantum launch power relative to the
single-photon level, classical launch power relative to the receiver noise
``n_ref``. Attenuations are given in dB/km. Base-10 losses use the usual
``10**(-alpha * L / 10)`` convention; exponential (``e**(-alpha * L)``)
expressions use alpha converted to nepers/km.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

# Calibration geometry: an isolated quantum channel must reach the threshold
# at 60 km, and a 40 km quantum channel fully shared with one classical
# channel launched at its own 40 km power must reach it too.
CALIBRATION_ISOLATED_KM = 60.0
CALIBRATION_SHARED_KM = 40.0

# Numerical slack for the ">= threshold" admission rule, in dB.
THRESHOLD_SLACK_DB = 1e-9


class LengthMetric(str, enum.Enum):
    ACTUAL = "actual"
    EFFECTIVE = "effective"


class CalibrationError(ValueError):
    """The two calibration constraints cannot both hold."""


@dataclass(frozen=True)
class ChannelParams:
    alpha_q_db_per_km: float = 0.32
    alpha_c_db_per_km: float = 0.17
    p_tx_quantum: float = 1.0
    n_fixed: float = 1.0
    gamma_nl: float = 0.0
    qsnr_threshold_db: float = 15.0
    snr_target_db: float = 20.0
    n_ref: float = 1.0
    length_metric: LengthMetric = LengthMetric.EFFECTIVE

    def __post_init__(self) -> None:
        positive = ("alpha_q_db_per_km", "alpha_c_db_per_km", "p_tx_quantum", "n_fixed", "n_ref")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.gamma_nl < 0:
            raise ValueError("gamma_nl must be non-negative")
        object.__setattr__(self, "length_metric", LengthMetric(self.length_metric))

    @property
    def alpha_c_natural(self) -> float:
        return db_to_natural(self.alpha_c_db_per_km)


@dataclass(frozen=True, slots=True)
class Interferer:
    """A classical channel sharing one contiguous span with a quantum channel."""

    launch_power_at_span_start: float
    shared_length_km: float

    def __post_init__(self) -> None:
        if not self.shared_length_km > 0:
            raise ValueError("shared_length_km must be positive")


def attenuation_factor(alpha_db_per_km: float, length_km: float) -> float:
    """Power transmission ``10**(-alpha * L / 10)`` over ``length_km``."""
    if length_km < 0:
        raise ValueError("length_km must be non-negative")
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def db_to_natural(alpha_db_per_km: float) -> float:
    """Convert an attenuation from dB/km to Np/km."""
    return alpha_db_per_km * math.log(10.0) / 10.0


def effective_length(alpha_c_db_per_km: float, length_km: float) -> float:
    """Nonlinear effective length ``(1 - exp(-alpha L)) / alpha`` with alpha in Np/km."""
    alpha = db_to_natural(alpha_c_db_per_km)
    # -expm1(-x) keeps full precision when alpha * L is tiny
    return -math.expm1(-alpha * length_km) / alpha


def db(x: float) -> float:
    return 10.0 * math.log10(x)


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def snr(params: ChannelParams, launch_power: float, path_length_km: float) -> float:
    """Received classical SNR (linear) for a given launch power."""
    return attenuation_factor(params.alpha_c_db_per_km, path_length_km) * launch_power / params.n_ref


def required_launch_power(params: ChannelParams, path_length_km: float) -> float:
    """Lowest classical launch power meeting ``snr_target_db`` after ``path_length_km``."""
    return from_db(params.snr_target_db) * params.n_ref / attenuation_factor(
        params.alpha_c_db_per_km, path_length_km
    )


def max_launch_power(params: ChannelParams, candidate_lengths_km: Iterable[float]) -> float:
    """Launch power that serves the longest of a connection's candidate paths.

    Accepts path lengths or objects with a ``length_km`` attribute.
    """
    lengths = [getattr(c, "length_km", c) for c in candidate_lengths_km]
    if not lengths:
        raise ValueError("max_launch_power needs at least one candidate path")
    return required_launch_power(params, max(lengths))


def noise_contribution(params: ChannelParams, interferer: Interferer) -> float:
    """Nonlinear noise photons one interferer injects, ``gamma * P * exp(-alpha * l)``."""
    ell = interferer.shared_length_km
    if params.length_metric is LengthMetric.EFFECTIVE:
        ell = effective_length(params.alpha_c_db_per_km, ell)
    return params.gamma_nl * interferer.launch_power_at_span_start * math.exp(
        -params.alpha_c_natural * ell
    )


def quantum_signal(params: ChannelParams, quantum_path_length_km: float) -> float:
    return attenuation_factor(params.alpha_q_db_per_km, quantum_path_length_km) * params.p_tx_quantum


def qsnr(
    params: ChannelParams,
    quantum_path_length_km: float,
    interferers: Sequence[Interferer] = (),
) -> float:
    """Quantum signal-to-noise ratio as a linear ratio."""
    noise = params.n_fixed
    for it in interferers:
        noise += noise_contribution(params, it)
    return quantum_signal(params, quantum_path_length_km) / noise


def qsnr_db(
    params: ChannelParams,
    quantum_path_length_km: float,
    interferers: Sequence[Interferer] = (),
) -> float:
    return db(qsnr(params, quantum_path_length_km, interferers))


def meets_threshold(params: ChannelParams, value_db: float) -> bool:
    """Admission rule: QSNR equal to or above the threshold is accepted."""
    return value_db >= params.qsnr_threshold_db - THRESHOLD_SLACK_DB


def calibration_interferer(params: ChannelParams) -> Interferer:
    """The classical channel of the shared calibration scenario."""
    return Interferer(
        required_launch_power(params, CALIBRATION_SHARED_KM), CALIBRATION_SHARED_KM
    )


def calibrate_noise(
    alpha_q_db_per_km: float = 0.32,
    alpha_c_db_per_km: float = 0.17,
    p_tx_quantum: float = 1.0,
    qsnr_threshold_db: float = 15.0,
    snr_target_db: float = 20.0,
    n_ref: float = 1.0,
    length_metric: LengthMetric | str = LengthMetric.EFFECTIVE,
) -> tuple[float, float]:
    """Solve ``(n_fixed, gamma_nl)`` from the two threshold constraints.

    Raises :class:`CalibrationError` when the shared scenario leaves no room
    for nonlinear noise.
    """
    threshold = from_db(qsnr_threshold_db)
    base = ChannelParams(
        alpha_q_db_per_km=alpha_q_db_per_km,
        alpha_c_db_per_km=alpha_c_db_per_km,
        p_tx_quantum=p_tx_quantum,
        qsnr_threshold_db=qsnr_threshold_db,
        snr_target_db=snr_target_db,
        n_ref=n_ref,
        length_metric=LengthMetric(length_metric),
    )
    n_fixed = quantum_signal(base, CALIBRATION_ISOLATED_KM) / threshold
    budget = quantum_signal(base, CALIBRATION_SHARED_KM) / threshold - n_fixed
    unit = noise_contribution(replace(base, gamma_nl=1.0), calibration_interferer(base))
    gamma_nl = budget / unit
    if not gamma_nl > 0:
        raise CalibrationError(
            f"gamma_nl={gamma_nl:.4g}: a {CALIBRATION_SHARED_KM:g} km channel has no noise "
            f"margin left once the {CALIBRATION_ISOLATED_KM:g} km isolated constraint holds"
        )
    return n_fixed, gamma_nl


def calibrated_params(**inputs) -> ChannelParams:
    """:class:`ChannelParams` with ``n_fixed`` and ``gamma_nl`` from :func:`calibrate_noise`."""
    n_fixed, gamma_nl = calibrate_noise(**inputs)
    inputs["length_metric"] = LengthMetric(inputs.get("length_metric", LengthMetric.EFFECTIVE))
    return ChannelParams(n_fixed=n_fixed, gamma_nl=gamma_nl, **inputs)


def calibration_check(params: ChannelParams) -> tuple[float, float]:
    """QSNR (dB) of the isolated and the shared calibration scenarios."""
    isolated = qsnr_db(params, CALIBRATION_ISOLATED_KM)
    shared = qsnr_db(params, CALIBRATION_SHARED_KM, [calibration_interferer(params)])
    return isolated, shared
