import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laserising.ising import (IsingProblem, OracleInfeasibleError, brute_force_ground_state,
                              energy, flip_all, readout_spins)


def enumerate_ground_states(J: dict, h: list[float], m: int):
    """Second, deliberately naive enumerator: plain loops, no numpy."""
    best, winners = None, []
    for spins in itertools.product((1, -1), repeat=m):
        e = 0.0
        for (i, j), v in J.items():
            e += v * spins[i] * spins[j]
        for i in range(m):
            e += h[i] * spins[i]
        if best is None or e < best - 1e-12:
            best, winners = e, [spins]
        elif abs(e - best) <= 1e-12:
            winners.append(spins)
    return best, set(winners)


def af_pair():
    return IsingProblem(2, {(0, 1): 1.0})


def test_energy_antiferro_pair():
    assert energy(af_pair(), (1, -1)) == -1
    assert energy(af_pair(), (1, 1)) == 1


def test_energy_three_sites_by_hand():
    p = IsingProblem(3, {(0, 1): 1.0, (0, 2): -1.0, (1, 2): 1.0}, (0.5, 0.0, 0.0))
    # -1 + 1 + 1 - 0.5
    assert energy(p, (-1, 1, 1)) == 0.5
    best, _ = enumerate_ground_states(dict(p.couplings), list(p.zeeman), 3)
    assert brute_force_ground_state(p).minimum_energy == best


def test_ground_state_pairs():
    gs = brute_force_ground_state(af_pair())
    assert gs.minimum_energy == -1
    assert set(gs.configurations) == {(1, -1), (-1, 1)}
    fm = brute_force_ground_state(IsingProblem(2, {(0, 1): -1.0}))
    assert set(fm.configurations) == {(1, 1), (-1, -1)}


@pytest.mark.parametrize("seed", range(20))
def test_oracle_matches_naive_enumerator(seed):
    rng = np.random.default_rng(seed)
    m = 5 if seed == 0 else int(rng.integers(2, 9))
    p = IsingProblem.random(m, rng, with_field=True)
    best, winners = enumerate_ground_states(dict(p.couplings), list(p.zeeman), m)
    gs = brute_force_ground_state(p)
    assert math.isclose(gs.minimum_energy, best, rel_tol=0, abs_tol=1e-12)
    assert set(gs.configurations) == winners


def test_oracle_refuses_large_problems():
    with pytest.raises(OracleInfeasibleError):
        brute_force_ground_state(IsingProblem(25, {}))


def test_readout_examples():
    r = readout_spins([math.pi / 2, -math.pi / 2])
    assert r.spins.tolist() == [1, -1] and r.all_resolved
    assert not readout_spins([0.0, 0.0]).resolved.any()
    r = readout_spins([1.2, -1.4])
    assert r.spins.tolist() == [1, -1] and r.all_resolved


def test_coupling_storage_order_is_irrelevant():
    a = IsingProblem(3, {(0, 1): 0.3, (1, 2): -0.7, (0, 2): 1.1})
    b = IsingProblem(3, {(2, 1): -0.7, (2, 0): 1.1, (1, 0): 0.3})
    for cfg in itertools.product((1, -1), repeat=3):
        assert energy(a, cfg) == energy(b, cfg)


def test_problem_validation():
    with pytest.raises(ValueError):
        IsingProblem(0, {})
    with pytest.raises(ValueError):
        IsingProblem(2, {(0, 0): 1.0})
    with pytest.raises(ValueError):
        IsingProblem(2, {(0, 2): 1.0})


problems = st.integers(2, 8).flatmap(lambda m: st.tuples(
    st.just(m),
    st.lists(st.floats(-1, 1), min_size=m * (m - 1) // 2, max_size=m * (m - 1) // 2),
    st.lists(st.sampled_from((1, -1)), min_size=m, max_size=m),
))


def _build(m, values, field=None):
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    return IsingProblem(m, dict(zip(pairs, values)), field)


@given(problems)
def test_global_flip_symmetry(data):
    m, values, cfg = data
    p = _build(m, values)
    assert energy(p, flip_all(cfg)) == energy(p, cfg)


@given(problems, st.integers(0, 7), st.integers(-3, 3))
def test_readout_ignores_whole_turns(data, site, turns):
    m, _, cfg = data
    phases = np.array(cfg, dtype=float) * 1.3
    shifted = phases.copy()
    shifted[site % m] += 2 * math.pi * turns
    a, b = readout_spins(phases), readout_spins(shifted)
    assert a.spins.tolist() == b.spins.tolist()
    assert a.resolved.tolist() == b.resolved.tolist()


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_minimum_bounds_random_configurations(m, seed):
    rng = np.random.default_rng(seed)
    p = IsingProblem.random(m, rng, with_field=True)
    floor = brute_force_ground_state(p).minimum_energy
    samples = rng.choice((-1, 1), size=(10_000, m))
    J, h = np.triu(p.matrix(), 1), p.field()
    energies = np.einsum("ki,ij,kj->k", samples, J, samples) + samples @ h
    assert energies.min() >= floor - 1e-9
