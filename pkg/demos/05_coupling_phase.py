"""
Ferro- and antiferromagnetic order along the coupling path
==========================================================

Feeding the standing-wave parity into the two-laser model as the sign of
J_01 gives a binary order parameter along the coupling-path phase theta:
even loop counts couple the lasers in phase, odd ones out of phase.
"""

import math

import numpy as np

from laserising.experiments import coupling_phase_sweep, order_transitions, two_site_spec

spec = two_site_spec(0.04, trials=6)
thetas = np.linspace(0.25 * math.pi, 4.25 * math.pi, 16, endpoint=False)
rows = coupling_phase_sweep(spec, thetas)
for r in rows:
    label = "AF" if r.measured_order else "F "
    print(f"theta={r.theta / math.pi:5.3f} pi  loops={r.loop_count}  J={r.coupling:+.0f}  "
          f"{label}  (AF share {r.antiferro_fraction:.2f})")
print("order transitions over two full cycles:", order_transitions(rows))
