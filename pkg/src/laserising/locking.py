"""Single-laser injection locking: locked phase vs. detuning and locking bandwidth.

Inside the locking range the slave phase ``phi0`` relative to the master
satisfies

    dw = w - w_r0 = (sin phi0 + alpha cos phi0) (F0 / A0) sqrt(w/Q_e)

and the locking bandwidth is ``(1/2pi) (w/Q) sqrt(P_in / P_out)`` with
``P_in = hbar w F0**2`` and ``P_out = hbar w A0**2 (w/Q_e)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

HBAR = 1.054571817e-34
SPEED_OF_LIGHT = 299_792_458.0

_EDGE_SLACK = 1e-12


class UnlockedError(ValueError):
    """The requested detuning lies outside the locking range."""


@dataclass(frozen=True)
class LockingParams:
    """Injection-locking constants.

    Parameters
    ----------
    injection_amplitude : float
        ``F0``, with ``F0**2`` a photon flux (1/s).
    internal_amplitude : float
        ``A0``, with ``A0**2`` a photon number.
    external_decay_rate : float
        ``w/Q_e`` (1/s).
    master_frequency : float
        ``w`` (rad/s); only needed for the power conversions.
    linewidth_factor : float
        ``alpha``.
    photon_decay_rate : float, optional
        Total ``w/Q`` used by the bandwidth formula; defaults to
        ``external_decay_rate``.
    """

    injection_amplitude: float
    internal_amplitude: float
    external_decay_rate: float
    master_frequency: float = 2 * math.pi * SPEED_OF_LIGHT / 1577.5e-9
    linewidth_factor: float = 0.0
    photon_decay_rate: float | None = None

    def __post_init__(self) -> None:
        if self.injection_amplitude <= 0 or self.internal_amplitude <= 0:
            raise ValueError("F0 and A0 must be positive")
        if self.external_decay_rate <= 0 or self.master_frequency <= 0:
            raise ValueError("decay rate and master frequency must be positive")
        if self.photon_decay_rate is None:
            object.__setattr__(self, "photon_decay_rate", float(self.external_decay_rate))
        elif self.photon_decay_rate <= 0:
            raise ValueError("photon_decay_rate must be positive")

    @classmethod
    def from_powers(cls, input_power: float, output_power: float, external_decay_rate: float,
                    master_frequency: float = 2 * math.pi * SPEED_OF_LIGHT / 1577.5e-9,
                    linewidth_factor: float = 0.0,
                    photon_decay_rate: float | None = None) -> "LockingParams":
        """Build from injected and emitted powers in watts."""
        if input_power <= 0 or output_power <= 0:
            raise ValueError("powers must be positive")
        quantum = HBAR * master_frequency
        f0 = math.sqrt(input_power / quantum)
        a0 = math.sqrt(output_power / (quantum * external_decay_rate))
        return cls(f0, a0, external_decay_rate, master_frequency, linewidth_factor,
                   photon_decay_rate)

    @classmethod
    def for_bandwidth(cls, bandwidth_hz: float, decay_rate: float = 1e12,
                      linewidth_factor: float = 0.0) -> "LockingParams":
        """Parameters whose locking bandwidth equals ``bandwidth_hz`` (with ``Q = Q_e``)."""
        ratio = 2 * math.pi * bandwidth_hz / decay_rate
        return cls(ratio * math.sqrt(decay_rate), 1.0, decay_rate,
                   linewidth_factor=linewidth_factor)

    @property
    def input_power(self) -> float:
        return HBAR * self.master_frequency * self.injection_amplitude ** 2

    @property
    def output_power(self) -> float:
        return (HBAR * self.master_frequency * self.internal_amplitude ** 2
                * self.external_decay_rate)

    @property
    def band_scale(self) -> float:
        """``(F0/A0) sqrt(w/Q_e)`` in rad/s."""
        return self.injection_amplitude / self.internal_amplitude * math.sqrt(
            self.external_decay_rate)

    @property
    def locking_half_width(self) -> float:
        """Largest ``|dw|`` (rad/s) that still locks."""
        return self.band_scale * math.hypot(1.0, self.linewidth_factor)


def detuning_from_phase(phi0: float, p: LockingParams) -> float:
    """Detuning ``w - w_r0`` (rad/s) that holds the slave at phase ``phi0``."""
    return (math.sin(phi0) + p.linewidth_factor * math.cos(phi0)) * p.band_scale


def locking_phase(detuning: float, p: LockingParams) -> float:
    """Stable locked phase for detuning ``w - w_r0``.

    ``sin(phi) + alpha cos(phi) = sqrt(1 + alpha**2) sin(phi + atan(alpha))``,
    so the root on the branch continuous with ``phi0(0) = -atan(alpha)`` is
    ``asin(x / sqrt(1 + alpha**2)) - atan(alpha)`` with ``x = dw / band_scale``.
    That branch is the stable one: along it ``cos(phi + atan(alpha)) >= 0``.
    For ``alpha = 0`` it reduces to ``asin(x)`` on ``[-pi/2, pi/2]``.

    Raises
    ------
    UnlockedError
        If ``|dw|`` exceeds the locking half-width.
    """
    alpha = p.linewidth_factor
    x = detuning / (p.band_scale * math.hypot(1.0, alpha))
    if abs(x) > 1.0:
        if abs(x) > 1.0 + _EDGE_SLACK:
            raise UnlockedError(
                f"detuning {detuning:.6g} rad/s is outside the locking range "
                f"+-{p.locking_half_width:.6g} rad/s")
        x = math.copysign(1.0, x)
    return math.asin(x) - math.atan(alpha)


def locking_bandwidth(p: LockingParams) -> float:
    """``(1/2pi) (w/Q) sqrt(P_in / P_out)`` in Hz."""
    return p.photon_decay_rate * math.sqrt(p.input_power / p.output_power) / (2 * math.pi)


def frequency_ramp(excursion_hz: float, points: int) -> np.ndarray:
    """Symmetric master-frequency sweep ``[-excursion, +excursion]`` in Hz."""
    if points < 2 or excursion_hz <= 0:
        raise ValueError("need at least two points and a positive excursion")
    return np.linspace(-excursion_hz, excursion_hz, points)


class LockingCurve(NamedTuple):
    df_hz: np.ndarray
    phi_rad: np.ndarray
    intensity: np.ndarray
    locked: np.ndarray

    def locked_fraction(self) -> float:
        return float(np.mean(self.locked))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["df_hz", "phi_rad", "intensity", "locked"])
        for df, phi, inten, ok in zip(*self):
            w.writerow([f"{df:.17g}", f"{phi:.17g}", f"{inten:.17g}", int(ok)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def locking_curve(sweep_hz: Sequence[float], p: LockingParams,
                  visibility: float = 1.0) -> LockingCurve:
    """Master/slave interference versus master detuning.

    Locked points carry ``phi0`` and intensity ``(1 + V cos phi0) / 2``.
    Unlocked points beat at the detuning frequency; they are flagged, get a
    NaN phase and the time-averaged intensity 1/2.
    """
    df = np.asarray(sweep_hz, dtype=float)
    phi = np.full(df.shape, np.nan)
    locked = np.zeros(df.shape, dtype=bool)
    for k, f in enumerate(df):
        try:
            phi[k] = locking_phase(2 * math.pi * f, p)
        except UnlockedError:
            continue
        locked[k] = True
    intensity = np.where(locked, 0.5 * (1 + visibility * np.cos(np.nan_to_num(phi))), 0.5)
    return LockingCurve(df, phi, intensity, locked)


def locking_params_for_laser(params, amplitude: float) -> LockingParams:
    """Locking constants seen by one slave laser of the network model.

    With no coupling the phase equation reduces to
    ``dphi/dt = -(w/Q) zeta sqrt(n_M) / A sin(phi) + (w_r0 - w)``, so the
    band scale is ``(w/Q) zeta sqrt(n_M) / A``. Choosing ``A0 = A``,
    ``Q_e = Q`` and ``F0 = zeta sqrt(n_M) sqrt(w/Q)`` reproduces it.
    The dynamical phase then equals ``-locking_phase(w - w_r0)``. The drift
    equations carry no linewidth factor, so that agreement holds for
    ``alpha = 0`` only.
    """
    wq = params.photon_decay_rate
    f0 = params.zeta * math.sqrt(params.master_photon_number) * math.sqrt(wq)
    return LockingParams(f0, amplitude, wq, linewidth_factor=params.linewidth_factor,
                         photon_decay_rate=wq)
