"""c-number Langevin dynamics of mutually coupled, injection-locked slave lasers.

For slave laser ``i`` with amplitude ``A_i`` (``A_i**2`` is the photon
number), phase ``phi_i`` relative to the master laser and carrier number
``N_i``::

    dA_i/dt   = -1/2 (w/Q - E_i) A_i + (w/Q) sqrt(n_M) (zeta cos phi_i - eta lam_i sin phi_i)
                - (w/Q) sum_j 1/2 eta J_ij A_j cos(phi_j - phi_i) + F_A
    dphi_i/dt = 1/A_i { (w/Q) sqrt(n_M) (-zeta sin phi_i - eta lam_i cos phi_i)
                - (w/Q) sum_j 1/2 eta J_ij A_j sin(phi_j - phi_i) } + (w_r0 - w)_i + F_phi
    dN_i/dt   = P - N_i/tau_sp (1 + beta (A_i**2 + 1)) + F_N

with ``E_i = beta N_i / tau_sp``. Integration is explicit Euler-Maruyama.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .ising import IsingProblem

DEFAULT_DT = 1e-13
#: Largest allowed ``dt * w/Q``.
STABILITY_LIMIT = 0.5
#: Amplitude floor as a fraction of the free-running steady-state amplitude.
AMPLITUDE_FLOOR_FRACTION = 1e-6

_NOISE_MODES = ("langevin", "kick")
_VARIABLES = ("amplitude", "phase", "carriers")
_NOISE_CHUNK_STEPS = 1 << 14


@dataclass(frozen=True)
class LaserParams:
    """Slave-laser constants and network coupling strengths (SI units).

    ``pump_rate`` defaults to twice threshold, ``(w/Q)/beta * 2``.
    ``master_photon_number`` defaults to the free-running steady-state
    photon number, so ``zeta`` and ``eta`` act as relative injection
    strengths. Both are resolved on construction. ``external_decay_rate``
    defaults to ``photon_decay_rate`` (all cavity loss through the output
    facet). ``linewidth_factor`` is not used by the drift equations; it is
    carried for mapping a laser onto :class:`~laserising.locking.LockingParams`.
    """

    photon_decay_rate: float = 1e12
    tau_sp: float = 1e-9
    beta: float = 1e-4
    zeta: float = 0.005
    eta: float = 0.04
    linewidth_factor: float = 0.0
    pump_rate: float | None = None
    master_photon_number: float | None = None
    external_decay_rate: float | None = None
    self_detuning: float | tuple[float, ...] = 0.0

    def __post_init__(self) -> None:
        if self.photon_decay_rate <= 0 or self.tau_sp <= 0:
            raise ValueError("photon_decay_rate and tau_sp must be positive")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.zeta < 0 or self.eta < 0:
            raise ValueError("zeta and eta must be non-negative")
        if self.external_decay_rate is None:
            object.__setattr__(self, "external_decay_rate", float(self.photon_decay_rate))
        elif self.external_decay_rate <= 0:
            raise ValueError("external_decay_rate must be positive")
        if self.pump_rate is None:
            object.__setattr__(self, "pump_rate", 2.0 * self.threshold_pump)
        elif self.pump_rate <= 0:
            raise ValueError("pump_rate must be positive")
        if self.master_photon_number is None:
            a_ss, _ = self.steady_state()
            object.__setattr__(self, "master_photon_number", a_ss * a_ss)
        elif self.master_photon_number < 0:
            raise ValueError("master_photon_number must be non-negative")
        if not np.isscalar(self.self_detuning):
            object.__setattr__(self, "self_detuning",
                               tuple(float(x) for x in self.self_detuning))

    @property
    def threshold_carriers(self) -> float:
        """Carrier number at which ``beta N / tau_sp`` equals ``w/Q``."""
        return self.photon_decay_rate * self.tau_sp / self.beta

    @property
    def threshold_pump(self) -> float:
        return self.threshold_carriers / self.tau_sp

    def steady_state(self) -> tuple[float, float]:
        """Free-running ``(A_ss, N_ss)`` without injection, coupling or noise."""
        n_ss = self.threshold_carriers
        photons = (self.pump_rate * self.tau_sp / n_ss - 1.0) / self.beta - 1.0
        if photons <= 0:
            raise ValueError("pump rate is below the lasing threshold")
        return math.sqrt(photons), n_ss

    def detuning(self, m: int) -> np.ndarray:
        """Per-laser ``w_r0 - w`` as an array of length ``m``."""
        d = np.broadcast_to(np.asarray(self.self_detuning, dtype=float), (m,))
        return np.array(d, dtype=float)

    def amplitude_floor(self) -> float:
        return AMPLITUDE_FLOOR_FRACTION * self.steady_state()[0]


@dataclass(frozen=True)
class NoiseParams:
    """Langevin-force configuration.

    ``mode="langevin"`` adds Gaussian increments every step with variance
    rates (per unit time)

    * amplitude: ``amplitude_scale * E/2``
    * phase: ``phase_scale * E / (2 A**2)``
    * carriers: ``carrier_scale * (N/tau_sp + P)``

    where ``E = beta N / tau_sp``. ``mode="kick"`` only breaks the symmetry
    of the initial state: every phase receives one ``N(0, kick_sigma)``
    offset at ``t = 0`` and the rest of the run is deterministic.
    """

    enabled: bool = True
    mode: str = "langevin"
    amplitude_scale: float = 1.0
    phase_scale: float = 1.0
    carrier_scale: float = 1.0
    kick_sigma: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in _NOISE_MODES:
            raise ValueError(f"noise mode must be one of {_NOISE_MODES}, got {self.mode!r}")
        if min(self.amplitude_scale, self.phase_scale, self.carrier_scale, self.kick_sigma) < 0:
            raise ValueError("noise scales must be non-negative")

    @classmethod
    def off(cls) -> "NoiseParams":
        return cls(enabled=False)

    @classmethod
    def kick(cls, seed: int = 0, sigma: float = 1e-3) -> "NoiseParams":
        return cls(mode="kick", kick_sigma=sigma, seed=seed)

    @property
    def per_step(self) -> bool:
        return self.enabled and self.mode == "langevin"

    def scales(self) -> np.ndarray:
        if not self.per_step:
            return np.zeros(3)
        return np.array([self.amplitude_scale, self.phase_scale, self.carrier_scale])

    def diffusion(self, state: "NetworkState", params: LaserParams) -> np.ndarray:
        """Variance rates, shape ``(3, M)``; identically zero when disabled."""
        out = np.zeros((3, state.M))
        if self.per_step:
            _kernels.diffusions(state.amplitude, state.carriers, params.tau_sp, params.beta,
                                params.pump_rate, self.scales(), out)
        return out


@dataclass(frozen=True)
class NetworkState:
    """Amplitudes, phases (wrapped to (-pi, pi]) and carrier numbers at time ``t``."""

    t: float
    amplitude: np.ndarray
    phase: np.ndarray
    carriers: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.amplitude, dtype=float)
        p = np.array(wrap(self.phase), dtype=float)
        n = np.array(self.carriers, dtype=float)
        if not (a.ndim == p.ndim == n.ndim == 1 and a.size == p.size == n.size):
            raise ValueError("amplitude, phase and carriers must be 1-D of equal length")
        if np.any(a < 0) or np.any(n < 0):
            raise ValueError("amplitudes and carrier numbers must be non-negative")
        for name, arr in (("amplitude", a), ("phase", p), ("carriers", n)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def M(self) -> int:
        return self.amplitude.size


def wrap(x):
    """Vectorised wrap of phases to (-pi, pi]; in-range values pass through unchanged."""
    x = np.asarray(x, dtype=float)
    inside = (x > -np.pi) & (x <= np.pi)
    return np.where(inside, x, np.pi - np.mod(np.pi - x, 2 * np.pi))


def initial_state(params: LaserParams, site_count: int,
                  phases: Sequence[float] | None = None) -> NetworkState:
    """Every laser at the free-running steady state, phases at the master reference."""
    a_ss, n_ss = params.steady_state()
    phi = np.zeros(site_count) if phases is None else np.asarray(phases, dtype=float)
    return NetworkState(0.0, np.full(site_count, a_ss), phi, np.full(site_count, n_ss))


class IntegrationError(RuntimeError):
    """A state variable became non-finite; carries the partial trajectory."""

    def __init__(self, time: float, laser: int, variable: str,
                 trajectory: "Trajectory | None" = None):
        super().__init__(f"non-finite {variable} of laser {laser} at t={time:.6g} s")
        self.time = time
        self.laser = laser
        self.variable = variable
        self.trajectory = trajectory


def _all_drifts(state: NetworkState, params: LaserParams, problem: IsingProblem):
    m = state.M
    if problem.site_count != m:
        raise ValueError(f"state has {m} lasers, problem has {problem.site_count} sites")
    dA, dphi, dN = np.empty(m), np.empty(m), np.empty(m)
    _kernels.drifts(state.amplitude, state.phase, state.carriers, params.photon_decay_rate,
                    params.tau_sp, params.beta, params.zeta, params.eta, params.pump_rate,
                    math.sqrt(params.master_photon_number), problem.matrix(),
                    problem.field(), params.detuning(m), dA, dphi, dN)
    return dA, dphi, dN


def amplitude_drift(state: NetworkState, i: int, params: LaserParams,
                    problem: IsingProblem) -> float:
    """Deterministic ``dA_i/dt``: gain/loss, master injection and mutual coupling."""
    return float(_all_drifts(state, params, problem)[0][i])


def phase_drift(state: NetworkState, i: int, params: LaserParams,
                problem: IsingProblem) -> float:
    """Deterministic ``dphi_i/dt`` including the laser's self-detuning."""
    if state.amplitude[i] <= 0:
        raise ValueError(f"phase drift is singular at A_{i} = 0")
    return float(_all_drifts(state, params, problem)[1][i])


def carrier_drift(state: NetworkState, i: int, params: LaserParams) -> float:
    """``P - N_i/tau_sp (1 + beta (A_i**2 + 1))``."""
    a, n = state.amplitude[i], state.carriers[i]
    return params.pump_rate - n / params.tau_sp * (1.0 + params.beta * (a * a + 1.0))


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Private PCG64 stream for ``(seed, *key)``.

    Streams are derived with ``SeedSequence([seed, *key])``, so trial ``k``
    of an ensemble always sees the same numbers no matter how trials are
    scheduled.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)])))


def _check_dt(dt: float, params: LaserParams) -> None:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt * params.photon_decay_rate > STABILITY_LIMIT:
        raise ValueError(
            f"dt*w/Q = {dt * params.photon_decay_rate:.3g} exceeds the stability limit "
            f"{STABILITY_LIMIT}")


class _Run:
    """Mutable integration buffers for one trajectory."""

    def __init__(self, state: NetworkState, params: LaserParams, problem: IsingProblem,
                 noise: NoiseParams, rng: np.random.Generator | None):
        if problem.site_count != state.M:
            raise ValueError(f"state has {state.M} lasers, problem has {problem.site_count} sites")
        self.params = params
        self.noise = noise
        self.rng = rng if rng is not None else trial_rng(noise.seed)
        self.A = state.amplitude.copy()
        self.phi = state.phase.copy()
        self.N = state.carriers.copy()
        self.J = problem.matrix()
        self.lam = problem.field()
        self.detune = params.detuning(state.M)
        self.scales = noise.scales()
        self.floor = params.amplitude_floor()
        self.sqrt_nm = math.sqrt(params.master_photon_number)
        self.diag = np.zeros(4, dtype=np.int64)

    def advance(self, n_samples: int, stride: int, dt: float, out: np.ndarray) -> int:
        m = self.A.size
        if self.noise.per_step:
            xi = self.rng.standard_normal((n_samples * stride, 3, m))
        else:
            xi = np.zeros((0, 3, m))
        p = self.params
        return _kernels.advance(self.A, self.phi, self.N, n_samples, stride, dt,
                                p.photon_decay_rate, p.tau_sp, p.beta, p.zeta, p.eta,
                                p.pump_rate, self.sqrt_nm, self.J, self.lam, self.detune,
                                xi, self.scales, self.floor, out, self.diag)


def step(state: NetworkState, dt: float, params: LaserParams, problem: IsingProblem,
         noise: NoiseParams, rng: np.random.Generator | None = None) -> NetworkState:
    """One Euler-Maruyama step of length ``dt``.

    Raises
    ------
    ValueError
        If ``dt * w/Q`` exceeds :data:`STABILITY_LIMIT`.
    IntegrationError
        If the update produces a non-finite value.
    """
    _check_dt(dt, params)
    run = _Run(state, params, problem, noise, rng)
    out = np.empty((1, 3, state.M))
    if run.advance(1, 1, dt, out) != _kernels.OK:
        raise IntegrationError(state.t + dt, int(run.diag[2]), _VARIABLES[run.diag[3]])
    return NetworkState(state.t + dt, out[0, 0], out[0, 1], out[0, 2])


@dataclass
class Trajectory:
    """Sampled time series of a network integration."""

    sample_interval: float
    t: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    carriers: np.ndarray
    pairs: list[tuple[int, int]] = field(default_factory=list)
    clamp_events: int = 0

    @property
    def M(self) -> int:
        return self.amplitude.shape[1]

    def __len__(self) -> int:
        return self.t.size

    def relative_phases(self) -> np.ndarray:
        """``phi_i - phi_j`` wrapped to (-pi, pi], one column per configured pair."""
        cols = [self.phase[:, i] - self.phase[:, j] for i, j in self.pairs]
        if not cols:
            return np.zeros((len(self), 0))
        return wrap(np.stack(cols, axis=1))

    def state(self, k: int = -1) -> NetworkState:
        return NetworkState(float(self.t[k]), self.amplitude[k], self.phase[k], self.carriers[k])

    def final_state(self) -> NetworkState:
        return self.state(-1)

    def to_csv(self, path=None) -> str:
        """CSV with 17 significant digits; written to ``path`` when given."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["t"]
        for i in range(self.M):
            header += [f"A_{i}", f"phi_{i}", f"N_{i}"]
        header += [f"dphi_{i}_{j}" for i, j in self.pairs]
        w.writerow(header)
        rel = self.relative_phases()
        for k in range(len(self)):
            row = [self.t[k]]
            for i in range(self.M):
                row += [self.amplitude[k, i], self.phase[k, i], self.carriers[k, i]]
            row += list(rel[k])
            w.writerow([f"{float(x):.17g}" for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _stride(sample_interval: float, dt: float) -> int:
    stride = int(round(sample_interval / dt))
    if stride < 1 or abs(stride * dt - sample_interval) > 1e-9 * sample_interval:
        raise ValueError("sample_interval must be a positive integer multiple of dt")
    return stride


def integrate(initial: NetworkState, duration: float, dt: float, sample_interval: float,
              params: LaserParams, problem: IsingProblem, noise: NoiseParams,
              pairs: Sequence[tuple[int, int]] | None = None,
              rng: np.random.Generator | None = None) -> Trajectory:
    """Integrate from ``initial`` and sample every ``sample_interval``.

    The run covers ``floor(duration / sample_interval)`` whole sample
    intervals; the initial state is the first sample and the final state the
    last. With ``noise.mode == "kick"`` the initial phases are perturbed
    once before the first sample is recorded. ``rng`` defaults to
    ``trial_rng(noise.seed)``.

    ``pairs`` selects the relative phases kept on the trajectory; by default
    every pair ``i < j``.

    Raises
    ------
    IntegrationError
        On a non-finite state; ``err.trajectory`` holds the samples taken so far.
    """
    _check_dt(dt, params)
    if sample_interval < dt:
        raise ValueError("sample_interval must be >= dt")
    if duration < sample_interval:
        raise ValueError("duration must be >= sample_interval")
    stride = _stride(sample_interval, dt)
    n_intervals = int(math.floor(duration / sample_interval * (1 + 1e-12)))
    m = initial.M
    if pairs is None:
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

    run = _Run(initial, params, problem, noise, rng)
    if noise.enabled and noise.mode == "kick":
        run.phi = wrap(run.phi + run.rng.normal(0.0, noise.kick_sigma, m))
    samples = np.empty((n_intervals + 1, 3, m))
    samples[0] = (run.A, run.phi, run.N)

    per_call = max(1, _NOISE_CHUNK_STEPS // stride)
    done = 0
    while done < n_intervals:
        k = min(per_call, n_intervals - done)
        out = samples[1 + done: 1 + done + k]
        status = run.advance(k, stride, dt, out)
        if status != _kernels.OK:
            failed_step = done * stride + int(run.diag[1])
            written = 1 + done + int(run.diag[1]) // stride
            partial = _trajectory(samples[:written], sample_interval, initial.t, pairs,
                                  int(run.diag[0]))
            raise IntegrationError(initial.t + (failed_step + 1) * dt, int(run.diag[2]),
                                   _VARIABLES[run.diag[3]], partial)
        done += k
    return _trajectory(samples, sample_interval, initial.t, pairs, int(run.diag[0]))


def _trajectory(samples: np.ndarray, sample_interval: float, t0: float,
                pairs, clamps: int) -> Trajectory:
    n = samples.shape[0]
    t = t0 + sample_interval * np.arange(n)
    return Trajectory(sample_interval, t, samples[:, 0].copy(), samples[:, 1].copy(),
                      samples[:, 2].copy(), [tuple(p) for p in pairs], clamps)
