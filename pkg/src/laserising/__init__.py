"""Injection-locked laser network Ising machine simulator."""

__version__ = "0.1.0"

from .ising import (GroundStateResult, IsingProblem, OracleInfeasibleError, Readout,  # noqa: E402
                    brute_force_ground_state, energy, readout_spins)
from .dynamics import (IntegrationError, LaserParams, NetworkState, NoiseParams,  # noqa: E402
                       Trajectory, amplitude_drift, carrier_drift, initial_state, integrate,
                       phase_drift, step, trial_rng)
from .locking import (LockingParams, UnlockedError, detuning_from_phase,  # noqa: E402
                      locking_bandwidth, locking_curve, locking_phase)
from .standing_wave import (CavityGeometry, SawtoothCurve, phase_order_trace,  # noqa: E402
                            select_frequency, sweep_path_length)
from .experiments import (EnsembleResult, ExperimentSpec, coupling_phase_sweep,  # noqa: E402
                          regime_classify, run_ensemble, sweep_coupling_ratio)
from .files import ProblemFileError, parse_problem_file, write_problem_file  # noqa: E402
