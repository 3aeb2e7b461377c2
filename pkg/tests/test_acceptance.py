"""Acceptance criteria, one test each, at the frozen tolerances.

Every test records a PASS/FAIL line that is repeated in the terminal
summary under "acceptance criteria".
"""

import itertools
import math
import time

import numpy as np

from laserising.dynamics import (LaserParams, NetworkState, NoiseParams, initial_state,
                                 integrate)
from laserising.experiments import ExperimentSpec, run_ensemble, two_site_spec
from laserising.ising import IsingProblem, brute_force_ground_state, energy
from laserising.locking import (LockingParams, detuning_from_phase, locking_bandwidth,
                                locking_params_for_laser, locking_phase)
from laserising.standing_wave import (SPEED_OF_LIGHT, CavityGeometry, resonant_length,
                                      sweep_path_length)

PI = math.pi
SOLO = IsingProblem(1, {})


def _plateaus(result):
    done = result.completed
    return [(t.plateau_dphi, np.abs(t.plateau_phases), t.plateau_phases) for t in done]


def test_regime_triptych(report):
    t0 = time.perf_counter()
    results = {eta: run_ensemble(two_site_spec(eta, trials=100)) for eta in (0.04, 0.01, 0.005)}
    elapsed = time.perf_counter() - t0

    bif = np.mean([0.9 * PI <= d <= 1.1 * PI and t.regime == "bifurcated"
                   for (d, _, _), t in zip(_plateaus(results[0.04]), results[0.04].completed)])
    mid = np.mean([0.2 * PI < d < 0.9 * PI and t.regime == "intermediate"
                   for (d, _, _), t in zip(_plateaus(results[0.01]), results[0.01].completed)])
    pin = np.mean([d < 0.1 * PI and np.all(ph < 0.1 * PI)
                   for d, ph, _ in _plateaus(results[0.005])])
    ok = bif >= 0.8 and mid >= 0.8 and pin >= 0.9 and elapsed < 300
    report(1, ok, f"bifurcated {bif:.2f} (>=0.80), intermediate {mid:.2f} (>=0.80), "
                  f"pinned {pin:.2f} (>=0.90), 300 trials in {elapsed:.1f} s (<300 s)")
    assert ok


def test_ferromagnetic_counterpart(report):
    res = run_ensemble(two_site_spec(0.04, coupling=-1.0, trials=100))
    hits = [d < 0.1 * PI and np.all((ph >= 0.4 * PI) & (ph <= 0.6 * PI))
            and np.sign(raw[0]) == np.sign(raw[1])
            for d, ph, raw in _plateaus(res)]
    frac = float(np.mean(hits))
    mean_abs_phi = float(np.mean([ph.mean() for _, ph, _ in _plateaus(res)]))
    ok = frac >= 0.8
    report(2, ok, f"in-phase at |phi| in [0.4pi, 0.6pi]: {frac:.2f} (>=0.80); "
                  f"mean plateau |phi_i| = {mean_abs_phi / PI:.3f} pi")
    assert ok


def _naive_ground(problem):
    m = problem.site_count
    best, winners = None, set()
    for spins in itertools.product((1, -1), repeat=m):
        terms = [v * spins[i] * spins[j] for (i, j), v in problem.couplings.items()]
        terms += [h * s for h, s in zip(problem.zeeman, spins)]
        e = math.fsum(terms)
        if best is None or e < best:
            best, winners = e, {spins}
        elif e == best:
            winners.add(spins)
    return best, winners


def test_oracle_agreement(report):
    rng = np.random.default_rng(2024)
    successes = mismatched = 0
    for k in range(50):
        problem = IsingProblem.random(int(rng.choice([2, 3, 4])), rng)
        spec = ExperimentSpec(problem, noise=NoiseParams.kick(), trials=10, master_seed=k)
        res = run_ensemble(spec)
        for t in res.completed:
            if t.success:
                successes += 1
                mismatched += energy(problem, t.spins) != res.ground_state.minimum_energy
    cross = 0
    for _ in range(20):
        problem = IsingProblem.random(int(rng.integers(2, 11)), rng)
        gs = brute_force_ground_state(problem)
        best, winners = _naive_ground(problem)
        cross += gs.minimum_energy == best and set(gs.configurations) == winners
    ok = mismatched == 0 and successes > 0 and cross == 20
    report(3, ok, f"{successes} successes, {mismatched} off the oracle minimum; "
                  f"independent enumerator agrees on {cross}/20")
    assert ok


def test_locking_algebra(report):
    p = LockingParams(injection_amplitude=3e5, internal_amplitude=120.0,
                      external_decay_rate=1e12)
    xs = np.random.default_rng(3).uniform(-PI / 2, PI / 2, 100)
    trip = max(abs(locking_phase(detuning_from_phase(x, p), p) - x) for x in xs)
    dws = np.linspace(0, p.locking_half_width, 100)
    antisym = all(locking_phase(-d, p) == -locking_phase(d, p) for d in dws)

    w = 2 * PI * SPEED_OF_LIGHT / 1577.5e-9
    pin, pout, wq = 2.4e-5, 1.12e-3, 8e11
    q = LockingParams.from_powers(pin, pout, wq, w)
    closed = wq / (2 * PI) * math.sqrt(pin / pout)
    bw_err = abs(locking_bandwidth(q) / closed - 1)

    base = LaserParams(eta=0.0)
    half = locking_params_for_laser(base, base.steady_state()[0]).locking_half_width
    dyn = []
    for frac in (-0.8, -0.4, 0.0, 0.4, 0.8):
        lp = LaserParams(eta=0.0, self_detuning=frac * half)
        tr = integrate(initial_state(lp, 1), 3e-8, 1e-13, 1e-10, lp, SOLO, NoiseParams.off())
        target = locking_phase(frac * half, locking_params_for_laser(lp, tr.amplitude[-1, 0]))
        dyn.append(abs(tr.phase[-1, 0] - target))
    ok = trip < 1e-10 and antisym and bw_err < 1e-9 and max(dyn) < 1e-4
    report(4, ok, f"round trip {trip:.1e} rad, antisymmetric {antisym}, "
                  f"bandwidth rel. error {bw_err:.1e}, dynamics vs algebra {max(dyn):.1e} rad")
    assert ok


def test_standing_wave_numbers(report):
    g = CavityGeometry(path_length=1.550)
    edge = resonant_length(g.path_length, g, 0) + g.period / 2
    narrow = (edge - 1e-6 * g.period, edge + 1e-6 * g.period, 101)
    p2p = sweep_path_length(*narrow, g).peak_to_peak()
    fsr_err = abs(p2p / 96.8e6 - 1)

    mirror = sweep_path_length(0.0, 20 * g.wavelength / 4, 20 * 200 + 1, g, True)
    period = float(np.diff(mirror.coordinate[mirror.parity_flips()]).mean())
    mirror_err = abs(period / 394.4e-9 - 1)

    start = resonant_length(g.path_length, g, 0) + g.period / 4
    long = sweep_path_length(start, start + 21 * g.period, 21 * 400 + 1, g)
    cycles = len(long.resets())
    orders = long.phase_order[np.r_[0, long.parity_flips()]]
    alternating = bool(np.all(np.diff(orders) != 0))

    pulled = sweep_path_length(*narrow, CavityGeometry(path_length=1.550, pull_factor=0.31))
    pulled_err = abs(pulled.peak_to_peak() / 30e6 - 1)
    ok = fsr_err < 1e-3 and mirror_err < 1e-3 and cycles == 21 and alternating \
        and pulled_err < 0.05
    report(5, ok, f"excursion {p2p / 1e6:.3f} MHz ({fsr_err:.3%} from 96.8), "
                  f"mirror period {period * 1e9:.2f} nm, {cycles} cycles, "
                  f"alternating {alternating}, kappa=0.31 -> {pulled.peak_to_peak() / 1e6:.2f} MHz")
    assert ok


def test_determinism_and_numerics(report):
    spec = two_site_spec(0.04, trials=20, noise=NoiseParams(seed=0))
    first = run_ensemble(spec, keep_trajectories=True)
    second = run_ensemble(spec, keep_trajectories=True)
    same = first.summary_csv() == second.summary_csv() and all(
        a.trajectory.to_csv() == b.trajectory.to_csv()
        for a, b in zip(first.trials, second.trials))

    free = LaserParams(master_photon_number=0.0, eta=0.0, zeta=0.0)
    a_ss, n_ss = free.steady_state()
    s = NetworkState(0.0, [0.5 * a_ss], [0.0], [0.9 * n_ss])
    tr = integrate(s, 100 * free.tau_sp, 1e-13, 1e-10, free, SOLO, NoiseParams.off())
    ss_err = max(abs(tr.amplitude[-1, 0] / a_ss - 1), abs(tr.carriers[-1, 0] / n_ss - 1))

    ref = LaserParams()
    a, n = ref.steady_state()
    pair = IsingProblem(2, {(0, 1): 1.0})
    start = initial_state(ref, 2, phases=[0.3, -0.1])
    finals = []
    for dt in (1e-13, 5e-14, 2.5e-14):
        run = integrate(start, 2e-9, dt, 1e-11, ref, pair, NoiseParams.off())
        finals.append(np.concatenate([run.amplitude[-1] / a, run.phase[-1],
                                      run.carriers[-1] / n]))
    order = math.log2(np.abs(finals[0] - finals[1]).max() / np.abs(finals[1] - finals[2]).max())
    ok = same and ss_err < 1e-6 and order >= 1.0
    report(6, ok, f"byte-identical {same}, steady state rel. error {ss_err:.1e}, "
                  f"self-convergence order {order:.3f}")
    assert ok


def test_unbiased_orderings(report):
    res = run_ensemble(two_site_spec(0.04, trials=400))
    counts = res.outcome_counts()
    up, down = counts.get((1, -1), 0), counts.get((-1, 1), 0)
    n = up + down
    z = abs(up - n / 2) / math.sqrt(n / 4) if n else math.inf
    ok = n >= 0.9 * 400 and z <= 5
    report(7, ok, f"(+1,-1): {up}, (-1,+1): {down}, |z| = {z:.2f} (<=5)")
    assert ok

