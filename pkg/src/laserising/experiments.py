"""Seeded trial ensembles, regime classification and parameter sweeps.

Trial ``k`` of an ensemble draws every random number from
``trial_rng(master_seed, k)``. Results therefore do not depend on how
trials are scheduled across workers. A sweep point ``p`` runs its
sub-ensemble under the master seed ``point_seed(master_seed, p)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from . import __version__
from .dynamics import (IntegrationError, LaserParams, NoiseParams, Trajectory, initial_state,
                       integrate, trial_rng, wrap)
from .ising import (GroundStateResult, IsingProblem, MAX_ORACLE_SITES,
                    OracleInfeasibleError, brute_force_ground_state, readout_spins)
from .standing_wave import CavityGeometry, resonant_length, select_frequency

BIFURCATED = "bifurcated"
INTERMEDIATE = "intermediate"
PINNED = "pinned"
REGIMES = (PINNED, INTERMEDIATE, BIFURCATED)

SWEEP_AXES = ("none", "eta", "zeta", "coupling_phase", "path_length")

#: Largest tolerated fraction of aborted trials.
MAX_ABORT_FRACTION = 0.10


class EnsembleAbortError(RuntimeError):
    """Too many trials hit a non-finite state; ``result`` holds what finished."""

    def __init__(self, message: str, result: "EnsembleResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class RegimeThresholds:
    """Plateau thresholds on ``|dphi|`` and ``|phi_i|`` in radians."""

    pinned: float = 0.1 * math.pi
    antiferro: float = 0.9 * math.pi
    ferro_phase: float = 0.4 * math.pi


def regime_classify(dphi: float | None, phases: Sequence[float] = (),
                    thresholds: RegimeThresholds = RegimeThresholds()) -> str:
    """Label a plateau as pinned, intermediate or bifurcated.

    ``dphi`` is the plateau mean of ``|phi_i - phi_j|`` for the observed pair
    and ``phases`` the plateau means of ``|phi_i|``. An out-of-phase pair
    (``dphi`` above ``thresholds.antiferro``) is bifurcated. An in-phase pair
    is bifurcated when every ``|phi_i|`` exceeds ``thresholds.ferro_phase``
    and pinned otherwise. Everything else is intermediate. With no pair
    (a single laser) only ``phases`` are used.
    """
    ph = np.abs(np.asarray(phases, dtype=float))
    if dphi is None:
        if ph.size and np.all(ph < thresholds.pinned):
            return PINNED
        if ph.size and np.all(ph > thresholds.ferro_phase):
            return BIFURCATED
        return INTERMEDIATE
    dphi = abs(dphi)
    if dphi > thresholds.antiferro:
        return BIFURCATED
    if dphi < thresholds.pinned:
        if ph.size and np.all(ph > thresholds.ferro_phase):
            return BIFURCATED
        return PINNED
    return INTERMEDIATE


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce an ensemble bit for bit."""

    problem: IsingProblem
    params: LaserParams = field(default_factory=LaserParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    duration: float = 2e-8
    dt: float = 1e-13
    sample_interval: float = 1e-11
    trials: int = 100
    readout_threshold: float = 0.5
    master_seed: int = 0
    score: bool = True
    pair: tuple[int, int] | None = (0, 1)
    plateau_fraction: float = 0.2
    stationarity_tol: float = 0.05
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)
    sweep_axis: str = "none"
    sweep_start: float = 0.0
    sweep_stop: float = 0.0
    sweep_steps: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
        if self.sweep_axis != "none":
            if self.sweep_steps < 2 or self.sweep_start == self.sweep_stop:
                raise ValueError("sweep range is degenerate")
        if self.problem.site_count < 2:
            object.__setattr__(self, "pair", None)
        elif self.pair is not None:
            i, j = self.pair
            if not (0 <= i < self.problem.site_count and 0 <= j < self.problem.site_count
                    and i != j):
                raise ValueError(f"pair {self.pair} is not valid for M={self.problem.site_count}")
        if not 0 < self.plateau_fraction <= 1:
            raise ValueError("plateau_fraction must lie in (0, 1]")

    def sweep_values(self) -> np.ndarray:
        if self.sweep_axis == "none":
            return np.zeros(0)
        return np.linspace(self.sweep_start, self.sweep_stop, self.sweep_steps)


@dataclass
class TrialResult:
    index: int
    spins: tuple[int, ...] = ()
    resolved: tuple[bool, ...] = ()
    final_phases: tuple[float, ...] = ()
    final_dphi: float | None = None
    plateau_dphi: float | None = None
    plateau_phases: tuple[float, ...] = ()
    stationary: bool = True
    regime: str = INTERMEDIATE
    success: bool | None = None
    aborted: bool = False
    error: str = ""
    trajectory: Trajectory | None = None


@dataclass
class EnsembleResult:
    trials: list[TrialResult]
    ground_state: GroundStateResult | None
    unbounded_phase: bool = False

    @property
    def completed(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.aborted]

    @property
    def aborted_count(self) -> int:
        return sum(t.aborted for t in self.trials)

    @property
    def success_fraction(self) -> float | None:
        """Share of completed trials landing on an oracle ground state.

        ``None`` when unscored or when every configuration is a ground state,
        in which case success carries no information.
        """
        done = self.completed
        if self.ground_state is None or not done:
            return None
        m = len(done[0].spins)
        if len(self.ground_state.configurations) == 2 ** m:
            return None
        return sum(bool(t.success) for t in done) / len(done)

    def regime_counts(self) -> dict[str, int]:
        c = Counter(t.regime for t in self.completed)
        return {r: c.get(r, 0) for r in REGIMES}

    def regime_fraction(self, regime: str) -> float:
        done = self.completed
        return sum(t.regime == regime for t in done) / len(done) if done else 0.0

    @property
    def regime(self) -> str:
        """Majority regime; ties resolve towards ``intermediate``."""
        counts = self.regime_counts()
        best = max(counts.values())
        leaders = [r for r in REGIMES if counts[r] == best]
        return INTERMEDIATE if len(leaders) > 1 or self.unbounded_phase else leaders[0]

    def dphi_stats(self) -> tuple[float, float]:
        """Mean and standard deviation of the plateau ``|dphi|`` over completed trials."""
        vals = [t.plateau_dphi for t in self.completed if t.plateau_dphi is not None]
        if not vals:
            return math.nan, math.nan
        return float(np.mean(vals)), float(np.std(vals))

    def outcome_counts(self) -> Counter:
        """How often each read-out configuration occurred among resolved trials."""
        return Counter(t.spins for t in self.completed if all(t.resolved))

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "aborted", "spins", "resolved", "final_dphi", "plateau_dphi",
                    "stationary", "regime", "success"])
        for t in self.trials:
            w.writerow([
                t.index, int(t.aborted),
                " ".join(f"{s:+d}" for s in t.spins),
                " ".join(str(int(r)) for r in t.resolved),
                _fmt(t.final_dphi), _fmt(t.plateau_dphi),
                int(t.stationary), t.regime,
                "" if t.success is None else int(t.success),
            ])
        return buf.getvalue()

    def summary(self) -> dict:
        mean, std = self.dphi_stats()
        gs = self.ground_state
        return {
            "trials": len(self.trials),
            "aborted": self.aborted_count,
            "success_fraction": self.success_fraction,
            "regime": self.regime,
            "regime_counts": self.regime_counts(),
            "mean_plateau_dphi": mean,
            "std_plateau_dphi": std,
            "unbounded_phase": self.unbounded_phase,
            "oracle_minimum": None if gs is None else gs.minimum_energy,
            "oracle_configurations": None if gs is None else [list(c) for c in gs.configurations],
            "outcomes": {" ".join(f"{s:+d}" for s in k): v
                         for k, v in sorted(self.outcome_counts().items(), reverse=True)},
        }


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def point_seed(master_seed: int, point: int) -> int:
    """Master seed of sweep point ``point``."""
    ss = np.random.SeedSequence([int(master_seed), int(point)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def has_restoring_force(problem: IsingProblem, params: LaserParams) -> bool:
    """False when no term in the phase equation depends on the phases themselves."""
    master = params.master_photon_number > 0 and (
        params.zeta > 0 or (params.eta > 0 and any(problem.zeeman)))
    mutual = params.eta > 0 and any(v != 0 for v in problem.couplings.values())
    return master or mutual


def plateau_statistics(traj: Trajectory, pair: tuple[int, int] | None,
                       fraction: float = 0.2):
    """Plateau ``|dphi|`` (or None), per-laser ``|phi_i|``, and the stationarity check.

    Statistics use the final ``fraction`` of samples. The window counts as
    stationary when the mean ``|dphi|`` of its two halves differ by less
    than the tolerance applied by the caller; the difference is returned.
    """
    n = len(traj)
    start = min(n - 1, int(math.floor(n * (1 - fraction))))
    window = slice(start, n)
    phases = np.abs(traj.phase[window]).mean(axis=0)
    if pair is None:
        series = np.abs(traj.phase[window, 0])
        dphi = None
    else:
        i, j = pair
        series = np.abs(wrap(traj.phase[window, i] - traj.phase[window, j]))
        dphi = float(series.mean())
    half = series.size // 2
    drift = float(abs(series[:half].mean() - series[half:].mean())) if half else 0.0
    return dphi, phases, drift


def run_trial(spec: ExperimentSpec, index: int,
              ground: GroundStateResult | None = None,
              keep_trajectory: bool = False) -> TrialResult:
    """Integrate one trial of ``spec`` and read it out."""
    m = spec.problem.site_count
    rng = trial_rng(spec.master_seed, index)
    pairs = [spec.pair] if spec.pair is not None else []
    try:
        traj = integrate(initial_state(spec.params, m), spec.duration, spec.dt,
                         spec.sample_interval, spec.params, spec.problem, spec.noise,
                         pairs=pairs, rng=rng)
    except IntegrationError as exc:
        return TrialResult(index, aborted=True, error=str(exc),
                           trajectory=exc.trajectory if keep_trajectory else None)
    final = traj.phase[-1]
    readout = readout_spins(final, spec.readout_threshold)
    dphi, phases, drift = plateau_statistics(traj, spec.pair, spec.plateau_fraction)
    spins = tuple(int(s) for s in readout.spins)
    resolved = tuple(bool(r) for r in readout.resolved)
    success = None
    if ground is not None:
        success = all(resolved) and spins in set(ground.configurations)
    final_dphi = None
    if spec.pair is not None:
        i, j = spec.pair
        final_dphi = float(abs(wrap(final[i] - final[j])))
    return TrialResult(
        index=index,
        spins=spins,
        resolved=resolved,
        final_phases=tuple(float(x) for x in final),
        final_dphi=final_dphi,
        plateau_dphi=dphi,
        plateau_phases=tuple(float(x) for x in phases),
        stationary=drift < spec.stationarity_tol,
        regime=regime_classify(dphi, phases, spec.thresholds),
        success=success,
        trajectory=traj if keep_trajectory else None,
    )


def run_ensemble(spec: ExperimentSpec, workers: int = 1,
                 keep_trajectories: bool = False) -> EnsembleResult:
    """Run ``spec.trials`` independent trials and score them against the oracle.

    Raises
    ------
    OracleInfeasibleError
        When scoring is requested for a problem above the oracle limit.
    EnsembleAbortError
        When more than 10 % of trials abort on a non-finite state.
    """
    ground = None
    if spec.score:
        if spec.problem.site_count > MAX_ORACLE_SITES:
            raise OracleInfeasibleError(
                f"scoring needs the exact oracle, which is limited to M <= {MAX_ORACLE_SITES}")
        ground = brute_force_ground_state(spec.problem)

    def one(k: int) -> TrialResult:
        return run_trial(spec, k, ground, keep_trajectories)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(one, range(spec.trials)))
    else:
        trials = [one(k) for k in range(spec.trials)]

    unbounded = not has_restoring_force(spec.problem, spec.params)
    if unbounded:
        for t in trials:
            if not t.aborted:
                t.regime = INTERMEDIATE
    result = EnsembleResult(trials, ground, unbounded)
    if result.aborted_count > MAX_ABORT_FRACTION * spec.trials:
        raise EnsembleAbortError(
            f"{result.aborted_count} of {spec.trials} trials aborted", result)
    return result


@dataclass
class SweepPoint:
    value: float
    regime: str
    success_fraction: float | None
    mean_dphi: float
    regime_counts: dict[str, int]
    unbounded_phase: bool = False
    result: EnsembleResult | None = None


def sweep_coupling_ratio(spec: ExperimentSpec, axis: str | None = None,
                         values: Sequence[float] | None = None,
                         workers: int = 1) -> list[SweepPoint]:
    """Sub-ensemble per value of ``eta`` or ``zeta``, ordered by the axis value.

    ``axis`` and ``values`` default to the spec's sweep settings.
    """
    axis = axis or spec.sweep_axis
    if axis not in ("eta", "zeta"):
        raise ValueError(f"coupling-ratio sweeps run over eta or zeta, not {axis!r}")
    vals = np.sort(np.asarray(spec.sweep_values() if values is None else values, dtype=float))
    rows = []
    for p, v in enumerate(vals):
        sub = replace(spec, params=replace(spec.params, **{axis: float(v)}),
                      master_seed=point_seed(spec.master_seed, p), sweep_axis="none")
        res = run_ensemble(sub, workers=workers)
        rows.append(SweepPoint(float(v), res.regime, res.success_fraction, res.dphi_stats()[0],
                               res.regime_counts(), res.unbounded_phase, res))
    return rows


@dataclass
class OrderPoint:
    theta: float
    path_length: float
    loop_count: int
    coupling: float
    predicted_order: float
    measured_order: float
    antiferro_fraction: float


def effective_coupling(theta: float, g: CavityGeometry, magnitude: float = 1.0):
    """Map the coupling-path phase ``theta`` onto a signed two-site coupling.

    ``theta = 2 pi (L - L0) / lambda_M``, measured from an even-parity
    resonance ``L0`` next to ``g.path_length``. Odd loop counts give
    antiferromagnetic ``+|J|`` and even ones ferromagnetic ``-|J|``.
    Returns ``(J_eff, path_length, selection)``.
    """
    base = resonant_length(g.path_length, g, parity=0)
    length = base + theta * g.wavelength / (2 * math.pi)
    sel = select_frequency(length, g)
    j = abs(magnitude) if sel.loop_count % 2 else -abs(magnitude)
    return j, length, sel


def theta_for_length(length: float, g: CavityGeometry) -> float:
    """Inverse of the length mapping used by :func:`effective_coupling`."""
    base = resonant_length(g.path_length, g, parity=0)
    return 2 * math.pi * (length - base) / g.wavelength


def coupling_phase_sweep(spec: ExperimentSpec, thetas: Sequence[float] | None = None,
                         geometry: CavityGeometry = CavityGeometry(),
                         workers: int = 1) -> list[OrderPoint]:
    """Ferro/antiferromagnetic order along the coupling-path phase.

    Each ``theta`` fixes the sign of ``J_01`` through the standing-wave
    parity. A sub-ensemble then reports the measured order: 0 when most
    trials end with plateau ``|dphi| < pi/2``, pi otherwise.
    """
    if spec.problem.site_count != 2:
        raise ValueError("the coupling-phase sweep is a two-site experiment")
    magnitude = abs(spec.problem.coupling(0, 1)) or 1.0
    if thetas is None:
        thetas = spec.sweep_values()
        if spec.sweep_axis == "path_length":
            thetas = [theta_for_length(float(L), geometry) for L in thetas]
    thetas = np.asarray(thetas, dtype=float)
    rows = []
    for p, theta in enumerate(thetas):
        j, length, sel = effective_coupling(float(theta), geometry, magnitude)
        problem = IsingProblem(2, {(0, 1): j}, spec.problem.zeeman)
        sub = replace(spec, problem=problem, master_seed=point_seed(spec.master_seed, p),
                      sweep_axis="none", pair=(0, 1))
        res = run_ensemble(sub, workers=workers)
        dphis = [t.plateau_dphi for t in res.completed]
        af = sum(d > math.pi / 2 for d in dphis) / len(dphis) if dphis else math.nan
        rows.append(OrderPoint(float(theta), length, sel.loop_count, j, sel.phase_order,
                               math.pi if af > 0.5 else 0.0, af))
    return rows


def order_transitions(points: Sequence[OrderPoint]) -> int:
    """Number of 0 <-> pi changes in the measured order along a sweep."""
    orders = [p.measured_order for p in points]
    return sum(a != b for a, b in zip(orders, orders[1:]))


def sweep_table_csv(rows: Sequence[SweepPoint | OrderPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows and isinstance(rows[0], OrderPoint):
        w.writerow(["theta_rad", "path_length_m", "loop_count", "j_eff", "predicted_order",
                    "measured_order", "antiferro_fraction"])
        for r in rows:
            w.writerow([_fmt(r.theta), _fmt(r.path_length), r.loop_count, _fmt(r.coupling),
                        _fmt(r.predicted_order), _fmt(r.measured_order),
                        _fmt(r.antiferro_fraction)])
    else:
        w.writerow(["value", "regime", "success_fraction", "mean_dphi", "pinned",
                    "intermediate", "bifurcated", "unbounded_phase"])
        for r in rows:
            c = r.regime_counts
            w.writerow([_fmt(r.value), r.regime, _fmt(r.success_fraction), _fmt(r.mean_dphi),
                        c[PINNED], c[INTERMEDIATE], c[BIFURCATED], int(r.unbounded_phase)])
    return buf.getvalue()


def spec_to_dict(spec: ExperimentSpec) -> dict:
    """JSON-ready echo of a spec with every default resolved."""
    d = {f.name: getattr(spec, f.name) for f in fields(spec)}
    for name in ("params", "noise", "thresholds"):
        d[name] = asdict(d[name])
    d["pair"] = list(spec.pair) if spec.pair is not None else None
    d["problem"] = {
        "site_count": spec.problem.site_count,
        "couplings": [[i, j, v] for (i, j), v in spec.problem.couplings.items()],
        "zeeman": list(spec.problem.zeeman),
    }
    return d


def manifest(spec: ExperimentSpec, extra: dict | None = None) -> str:
    """Run manifest: spec echo, master seed and package version, as JSON text."""
    doc = {"artifact_version": __version__, "master_seed": spec.master_seed,
           "spec": spec_to_dict(spec)}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def two_site_spec(eta: float, coupling: float = 1.0, trials: int = 100, master_seed: int = 0,
              noise: NoiseParams | None = None, **overrides) -> ExperimentSpec:
    """Two-site scenario with the reference parameters of the bifurcation study.

    ``w/Q = 1e12 /s``, ``tau_sp = 1 ns``, ``zeta = 0.005``, ``beta = 1e-4`` and
    ``lambda = 0``, 20 ns of simulated time. Noise defaults to the
    symmetry-breaking kick.
    """
    params = LaserParams(photon_decay_rate=1e12, tau_sp=1e-9, beta=1e-4, zeta=0.005, eta=eta)
    problem = IsingProblem(2, {(0, 1): coupling})
    return ExperimentSpec(problem=problem, params=params,
                          noise=noise if noise is not None else NoiseParams.kick(),
                          trials=trials, master_seed=master_seed, **overrides)
