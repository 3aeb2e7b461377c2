"""
Exact ground states and phase readout
=====================================

The laser network encodes spin i in the phase of slave laser i, relative
to the master laser: +pi/2 is spin up, -pi/2 is spin down. Before running
any dynamics we need ground truth, which for small problems is plain
enumeration.
"""

import math

import numpy as np

from laserising import IsingProblem, brute_force_ground_state, energy, readout_spins

# A frustrated triangle: two antiferromagnetic bonds, one ferromagnetic,
# and a small field on site 0.
triangle = IsingProblem(3, {(0, 1): 1.0, (0, 2): -1.0, (1, 2): 1.0}, (0.5, 0.0, 0.0))
print("E(-1, +1, +1) =", energy(triangle, (-1, 1, 1)))

gs = brute_force_ground_state(triangle)
print("minimum energy:", gs.minimum_energy)
for cfg in gs.configurations:
    print("   ground state", cfg)

# Without a field every problem has the global flip symmetry, so the
# ground states come in pairs. The oracle returns all of them.
pair = IsingProblem(2, {(0, 1): 1.0})
print("AF pair ground states:", brute_force_ground_state(pair).configurations)

# Readout looks at sin(phi), not at the nearest of +-pi/2. Phases close
# to the reference (the master-dominated regime) are flagged unresolved.
for phases in ([math.pi / 2, -math.pi / 2], [1.2, -1.4], [0.05, -0.02]):
    r = readout_spins(phases)
    print(f"phases {np.round(phases, 3)} -> spins {r.spins}, resolved {r.resolved}")

# A random 12-site instance still enumerates in a blink (4096 states).
big = IsingProblem.random(12, np.random.default_rng(0))
print("12-site random instance, minimum:", brute_force_ground_state(big).minimum_energy)
