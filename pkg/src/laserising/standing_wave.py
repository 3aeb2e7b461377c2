"""Quasi-static frequency selection of two slave lasers sharing a coupling path.

The two lasers settle on a frequency at which a standing wave fits between
their facets. For a path of length ``L`` and self-oscillation wavelength
``lambda_M`` the standing wave has ``N = round(2 L / lambda_M)`` loops. The
frequency moves by the amount that restores an integer loop count. An even
``N`` gives in-phase (ferromagnetic) order and an odd ``N`` gives
out-of-phase (antiferromagnetic) order.

Along ``L`` the frequency shift is a sawtooth with period ``lambda_M / 2``
and peak-to-peak excursion ``kappa * c / (2 L)``, the free spectral range
scaled by the pull factor ``kappa``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class CavityGeometry:
    path_length: float = 1.550
    wavelength: float = 1577.5e-9
    pull_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.path_length <= 0 or self.wavelength <= 0:
            raise ValueError("path length and wavelength must be positive")
        if self.path_length < 100 * self.wavelength:
            raise ValueError("path length must be much longer than the wavelength")
        if not 0 < self.pull_factor <= 1:
            raise ValueError("pull_factor must lie in (0, 1]")

    @property
    def period(self) -> float:
        """Sawtooth period in path length, ``lambda_M / 2``."""
        return self.wavelength / 2


class Selection(NamedTuple):
    frequency_shift: float
    loop_count: int
    phase_order: float  # 0.0 or pi


def free_spectral_range(length: float) -> float:
    """``c / (2 L)`` in Hz."""
    return SPEED_OF_LIGHT / (2 * length)


def select_frequency(length: float, g: CavityGeometry) -> Selection:
    """Frequency shift, loop count and phase order at path length ``length``."""
    if length <= 0:
        raise ValueError("path length must be positive")
    loops = 2 * length / g.wavelength
    n = round(loops)
    shift = -g.pull_factor * free_spectral_range(length) * (loops - n)
    return Selection(shift, int(n), 0.0 if n % 2 == 0 else math.pi)


@dataclass
class SawtoothCurve:
    """Sweep of :func:`select_frequency` over a path-length coordinate.

    ``coordinate`` is the swept variable in metres. In mirror mode it is
    the mirror displacement, and the path length changes by twice that
    amount.
    """

    coordinate: np.ndarray
    path_length: np.ndarray
    frequency_shift: np.ndarray
    loop_count: np.ndarray
    phase_order: np.ndarray
    mirror_double_pass: bool = False

    def __len__(self) -> int:
        return self.coordinate.size

    def parity_flips(self) -> np.ndarray:
        """Indices ``k`` where the parity changes between points ``k-1`` and ``k``."""
        return np.flatnonzero(np.diff(self.loop_count % 2) != 0) + 1

    def resets(self) -> np.ndarray:
        """Indices where the sawtooth jumps back, i.e. the loop count changes."""
        return np.flatnonzero(np.diff(self.loop_count) != 0) + 1

    def peak_to_peak(self) -> float:
        return float(self.frequency_shift.max() - self.frequency_shift.min())

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coordinate_m", "freq_shift_hz", "loop_count", "phase_order"])
        for x, f, n, o in zip(self.coordinate, self.frequency_shift, self.loop_count,
                              self.phase_order):
            w.writerow([f"{x:.17g}", f"{f:.17g}", int(n), f"{o:.17g}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def sweep_path_length(start: float, stop: float, steps: int, g: CavityGeometry,
                      mirror_double_pass: bool = False) -> SawtoothCurve:
    """Evaluate :func:`select_frequency` on ``steps`` evenly spaced points.

    Without ``mirror_double_pass``, ``start`` and ``stop`` are path lengths.
    With it they are mirror displacements ``d`` relative to the geometry's
    ``path_length``, and the path length is ``path_length + 2 d``.
    """
    if not start < stop:
        raise ValueError("start must be smaller than stop")
    if steps < 2:
        raise ValueError("need at least two steps")
    x = np.linspace(start, stop, steps)
    lengths = g.path_length + 2 * x if mirror_double_pass else x
    sel = [select_frequency(float(L), g) for L in lengths]
    return SawtoothCurve(
        coordinate=x,
        path_length=lengths,
        frequency_shift=np.array([s.frequency_shift for s in sel]),
        loop_count=np.array([s.loop_count for s in sel], dtype=np.int64),
        phase_order=np.array([s.phase_order for s in sel]),
        mirror_double_pass=mirror_double_pass,
    )


def phase_order_trace(curve: SawtoothCurve) -> tuple[np.ndarray, np.ndarray]:
    """Binary relative-phase channel ``(coordinate, 0 or pi)`` of a sweep.

    This is the model counterpart of an interference trace between the two
    lasers. High output corresponds to 0 and low output to pi.
    """
    return curve.coordinate.copy(), curve.phase_order.copy()


def resonant_length(near: float, g: CavityGeometry, parity: int = 0) -> float:
    """Path length closest to ``near`` with ``2 L / lambda_M`` an integer of given parity."""
    n = round(2 * near / g.wavelength)
    if n % 2 != parity % 2:
        n += 1
    return n * g.wavelength / 2
