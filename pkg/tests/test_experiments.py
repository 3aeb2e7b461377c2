import json
import math

import numpy as np
import pytest

from laserising.dynamics import LaserParams, NoiseParams
from laserising.experiments import (BIFURCATED, INTERMEDIATE, PINNED, ExperimentSpec,
                                    coupling_phase_sweep, effective_coupling, manifest,
                                    order_transitions, point_seed, regime_classify,
                                    run_ensemble, sweep_coupling_ratio, sweep_table_csv,
                                    two_site_spec)
from laserising.ising import IsingProblem, OracleInfeasibleError, energy
from laserising.standing_wave import CavityGeometry


def test_classification_examples():
    assert regime_classify(math.pi, (math.pi / 2, math.pi / 2)) == BIFURCATED
    assert regime_classify(0.03 * math.pi, (0.04 * math.pi, 0.01 * math.pi)) == PINNED
    assert regime_classify(0.5 * math.pi, (0.25 * math.pi, 0.25 * math.pi)) == INTERMEDIATE
    assert regime_classify(0.02, (1.5, 1.5)) == BIFURCATED
    assert regime_classify(None, (0.01,)) == PINNED


def test_single_laser_stays_at_reference():
    spec = ExperimentSpec(IsingProblem(1, {}), trials=5, noise=NoiseParams.kick(),
                          duration=5e-9)
    res = run_ensemble(spec)
    assert res.success_fraction is None
    assert res.regime == PINNED
    for t in res.trials:
        assert abs(t.final_phases[0]) < 1e-6 and t.final_dphi is None


def test_reference_ensembles():
    bif = run_ensemble(two_site_spec(0.04, trials=20))
    assert bif.success_fraction >= 0.8 and bif.regime == BIFURCATED
    pinned = run_ensemble(two_site_spec(0.005, trials=20))
    unresolved = sum(not any(t.resolved) for t in pinned.trials) / 20
    assert unresolved >= 0.9 and pinned.regime == PINNED


def test_every_success_is_a_ground_state():
    rng = np.random.default_rng(5)
    for _ in range(3):
        problem = IsingProblem.random(3, rng)
        spec = ExperimentSpec(problem, noise=NoiseParams.kick(), trials=8, duration=1e-8)
        res = run_ensemble(spec)
        for t in res.trials:
            if t.success:
                assert energy(problem, t.spins) == res.ground_state.minimum_energy


def test_reproducible_and_worker_independent():
    spec = two_site_spec(0.04, trials=8, noise=NoiseParams(), duration=5e-9)
    a = run_ensemble(spec).summary_csv()
    assert a == run_ensemble(spec).summary_csv()
    assert a == run_ensemble(spec, workers=4).summary_csv()
    other = run_ensemble(two_site_spec(0.04, trials=8, noise=NoiseParams(), duration=5e-9,
                                       master_seed=1)).summary_csv()
    assert other != a


def test_eta_sweep_is_monotone():
    spec = two_site_spec(0.04, trials=6)
    rows = sweep_coupling_ratio(spec, "eta", [0.04, 0.005, 0.01])
    assert [r.value for r in rows] == [0.005, 0.01, 0.04]
    assert [r.regime for r in rows] == [PINNED, INTERMEDIATE, BIFURCATED]
    header = sweep_table_csv(rows).splitlines()[0]
    assert header.startswith("value,regime,success_fraction")


def test_strong_master_injection_pins():
    rows = sweep_coupling_ratio(two_site_spec(0.04, trials=6), "zeta", [0.05])
    assert rows[0].regime == PINNED


def test_no_restoring_force_is_flagged():
    spec = ExperimentSpec(IsingProblem(2, {(0, 1): 1.0}), LaserParams(eta=0.0, zeta=0.0),
                          NoiseParams(), duration=2e-9, trials=4)
    res = run_ensemble(spec)
    assert res.unbounded_phase and res.regime == INTERMEDIATE
    assert res.summary()["unbounded_phase"] is True


def test_coupling_phase_mapping():
    g = CavityGeometry()
    assert effective_coupling(0.0, g)[0] < 0
    assert effective_coupling(math.pi, g)[0] > 0


def test_coupling_phase_sweep_two_periods():
    spec = two_site_spec(0.04, trials=4)
    thetas = np.linspace(0.25 * math.pi, 4.25 * math.pi, 8, endpoint=False)
    rows = coupling_phase_sweep(spec, thetas)
    assert rows[0].measured_order == 0.0
    assert order_transitions(rows) == 4
    assert [r.measured_order for r in rows] == [r.predicted_order for r in rows]


def test_point_seeds_are_distinct_and_stable():
    seeds = [point_seed(0, p) for p in range(50)]
    assert len(set(seeds)) == 50 and seeds == [point_seed(0, p) for p in range(50)]


def test_oracle_limit_applies_to_scoring():
    spec = ExperimentSpec(IsingProblem(25, {}), trials=1, duration=1e-11,
                          sample_interval=1e-11)
    with pytest.raises(OracleInfeasibleError):
        run_ensemble(spec)


def test_manifest_echoes_spec():
    doc = json.loads(manifest(two_site_spec(0.01, trials=3)))
    assert doc["master_seed"] == 0
    assert doc["spec"]["params"]["eta"] == 0.01
    assert doc["spec"]["params"]["pump_rate"] == pytest.approx(2e16)
    assert doc["spec"]["problem"]["couplings"] == [[0, 1, 1.0]]
