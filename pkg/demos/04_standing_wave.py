"""
Standing-wave selection of the coupling sign
============================================

Two lasers coupled over a path of length L oscillate at a frequency
where a standing wave fits between them. Stretching the path makes the
frequency follow a sawtooth with period lambda/2 in L. Each reset adds
one loop to the standing wave, and the loop parity decides whether the
lasers lock in phase (even) or out of phase (odd).
"""

import numpy as np

from laserising import CavityGeometry, sweep_path_length
from laserising.standing_wave import free_spectral_range, resonant_length

g = CavityGeometry(path_length=1.550)
print(f"c/2L = {free_spectral_range(g.path_length) / 1e6:.3f} MHz, "
      f"period = {g.period * 1e9:.2f} nm of path length")

start = resonant_length(g.path_length, g, parity=0)
curve = sweep_path_length(start, start + 3 * g.period, 3001, g)
print(f"3 periods: {len(curve.resets())} resets, "
      f"peak-to-peak {curve.peak_to_peak() / 1e6:.2f} MHz")
curve.to_csv("sawtooth.csv")

# Coarse text rendering of shift and phase order.
for k in range(0, len(curve), 150):
    shift = curve.frequency_shift[k] / 1e6
    col = int(20 + 20 * shift / 50)
    order = "pi" if curve.phase_order[k] else "0 "
    print(f"{(curve.coordinate[k] - start) * 1e9:8.1f} nm {order} " + " " * col + "*")

# Moving one mirror changes the path twice, so the pattern repeats every
# lambda/4 of mirror travel.
mirror = sweep_path_length(0.0, 4 * g.wavelength / 4, 4001, g, mirror_double_pass=True)
flips = mirror.coordinate[mirror.parity_flips()]
print("mirror flips every", np.round(np.diff(flips).mean() * 1e9, 1), "nm")

# Facet effects pull the frequency less than the ideal model; kappa scales it.
pulled = CavityGeometry(path_length=1.550, pull_factor=0.31)
c = sweep_path_length(start, start + g.period, 20001, pulled)
print(f"kappa=0.31: excursion {c.peak_to_peak() / 1e6:.1f} MHz")
