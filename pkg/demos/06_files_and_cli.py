"""
Problem files, run configurations and the command line
======================================================

Everything the library does is also reachable through plain-text files
and the ``laserising`` command. This script writes a problem and a config
and drives the CLI in-process.
"""

import pathlib
import tempfile

import numpy as np

from laserising import IsingProblem, parse_problem_file, write_problem_file
from laserising.cli import main
from laserising.config import RunConfig

work = pathlib.Path(tempfile.mkdtemp(prefix="laserising-"))

# An antiferromagnetic ring of four spins: two Neel states.
ring = IsingProblem(4, {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0, (0, 3): 1.0})
write_problem_file(ring, work / "ring4.txt")
print((work / "ring4.txt").read_text())
assert parse_problem_file(work / "ring4.txt") == ring

# Dense random instances with fields are much harder for the network than
# the ring; try swapping this one in.
write_problem_file(IsingProblem.random(4, np.random.default_rng(3)), work / "random4.txt")

(work / "run.cfg").write_text(
    "# four spins on a ring, symmetry-breaking kick only\n"
    "problem_file = ring4.txt\n"
    "noise_mode = kick\n"
    "trials = 20\n"
)
print("resolved pump rate:", RunConfig.load(work / "run.cfg").laser_params().pump_rate)

main(["oracle", "--config", str(work / "run.cfg"), "--out", str(work / "oracle")])
main(["solve", "--config", str(work / "run.cfg"), "--out", str(work / "solve")])
print("outputs in", work)
for f in sorted((work / "solve").iterdir()):
    print("  ", f.name)
