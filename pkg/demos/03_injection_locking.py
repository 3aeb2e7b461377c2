"""
Injection locking of a single slave laser
=========================================

Inside the locking band, the slave phase relative to the master follows
the detuning: sin(phi0) = dw / band_scale for a laser without linewidth
enhancement. Sweeping the master frequency therefore produces a
symmetric interference curve, flat outside the band.
"""

import math

import numpy as np

from laserising import (LaserParams, NoiseParams, initial_state, integrate, locking_bandwidth,
                        locking_curve, locking_phase)
from laserising.ising import IsingProblem
from laserising.locking import LockingParams, frequency_ramp, locking_params_for_laser

p = LockingParams.for_bandwidth(1.3e9)
print(f"locking bandwidth: {locking_bandwidth(p) / 1e9:.3f} GHz")

curve = locking_curve(frequency_ramp(4.5e9, 901), p)
print(f"locked fraction over +-4.5 GHz: {curve.locked_fraction():.3f} (1.3/4.5 = {1.3 / 4.5:.3f})")
curve.to_csv("locking_curve.csv")

# A quick look at the curve without a plotter.
for df in (-2e9, -1.3e9, -0.65e9, 0.0, 0.65e9, 1.3e9, 2e9):
    k = int(np.argmin(np.abs(curve.df_hz - df)))
    bar = "#" * int(40 * curve.intensity[k])
    print(f"{curve.df_hz[k] / 1e9:+6.2f} GHz {bar}")

# The same relation falls out of the laser rate equations: integrate a
# detuned laser with the master only and compare its final phase.
laser = LaserParams(eta=0.0, self_detuning=2e9)
tr = integrate(initial_state(laser, 1), 3e-8, 1e-13, 1e-10, laser, IsingProblem(1, {}),
               NoiseParams.off())
lp = locking_params_for_laser(laser, tr.amplitude[-1, 0])
print(f"dynamics: {tr.phase[-1, 0]:.6f} rad, algebra: {locking_phase(2e9, lp):.6f} rad")
print(f"({math.degrees(tr.phase[-1, 0]):.2f} degrees)")
