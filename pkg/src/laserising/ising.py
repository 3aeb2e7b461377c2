"""Ising problems with a Zeeman term, exact enumeration and phase readout.

The Hamiltonian is

    H(s) = sum_{i<j} J_ij s_i s_j + sum_i lambda_i s_i,   s_i in {+1, -1}

with every unordered pair counted once. Spins are encoded in slave-laser
phases relative to the master laser: +pi/2 reads as +1, -pi/2 as -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

#: Largest site count the exhaustive oracle accepts by default (2**24 states).
MAX_ORACLE_SITES = 24

_CHUNK_BITS = 16


class OracleInfeasibleError(ValueError):
    """Raised when exhaustive enumeration is refused for a too-large problem."""


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class IsingProblem:
    """Immutable Ising instance.

    Parameters
    ----------
    site_count : int
        Number of spins ``M``.
    couplings : mapping
        ``{(i, j): J_ij}``. Keys may be given in either order; they are
        normalised to ``i < j``. Supplying both ``(i, j)`` and ``(j, i)`` is
        an error, as is any self-coupling.
    zeeman : sequence of float, optional
        Local fields ``lambda_i``; zeros when omitted.
    """

    site_count: int
    couplings: Mapping[tuple[int, int], float] = field(default_factory=dict)
    zeeman: tuple[float, ...] | None = ()

    def __post_init__(self) -> None:
        m = int(self.site_count)
        if m < 1:
            raise ValueError(f"site_count must be positive, got {self.site_count}")
        pairs: dict[tuple[int, int], float] = {}
        for (i, j), value in dict(self.couplings).items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-coupling ({i}, {i}) is not allowed")
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"coupling ({i}, {j}) out of range for M={m}")
            key = _pair(i, j)
            if key in pairs:
                raise ValueError(f"coupling {key} given twice")
            pairs[key] = float(value)
        raw = () if self.zeeman is None else tuple(self.zeeman)
        zeeman = tuple(float(h) for h in raw) if raw else (0.0,) * m
        if len(zeeman) != m:
            raise ValueError(f"zeeman has length {len(zeeman)}, expected {m}")
        object.__setattr__(self, "site_count", m)
        object.__setattr__(self, "couplings", MappingProxyType(dict(sorted(pairs.items()))))
        object.__setattr__(self, "zeeman", zeeman)

    @classmethod
    def from_matrix(cls, J: np.ndarray, zeeman: Sequence[float] | None = None) -> "IsingProblem":
        """Build from a dense symmetric matrix; only the upper triangle is read."""
        J = np.asarray(J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ValueError("J must be square")
        if not np.allclose(J, J.T, rtol=0, atol=0):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("J must have a zero diagonal")
        m = J.shape[0]
        iu, ju = np.triu_indices(m, k=1)
        pairs = {(int(i), int(j)): float(J[i, j]) for i, j in zip(iu, ju) if J[i, j] != 0}
        return cls(m, pairs, tuple(zeeman) if zeeman is not None else ())

    @classmethod
    def random(cls, site_count: int, rng: np.random.Generator, low: float = -1.0,
               high: float = 1.0, with_field: bool = True) -> "IsingProblem":
        """Dense instance with J and lambda drawn uniformly from ``[low, high)``."""
        iu, ju = np.triu_indices(site_count, k=1)
        values = rng.uniform(low, high, size=iu.size)
        pairs = {(int(i), int(j)): float(v) for i, j, v in zip(iu, ju, values)}
        field_ = rng.uniform(low, high, size=site_count) if with_field else np.zeros(site_count)
        return cls(site_count, pairs, tuple(field_))

    @property
    def M(self) -> int:
        return self.site_count

    def coupling(self, i: int, j: int) -> float:
        """``J_ij``; symmetric in its arguments, 0.0 for absent pairs."""
        if i == j:
            return 0.0
        return self.couplings.get(_pair(i, j), 0.0)

    def matrix(self) -> np.ndarray:
        """Dense symmetric coupling matrix with zero diagonal."""
        J = np.zeros((self.site_count, self.site_count))
        for (i, j), v in self.couplings.items():
            J[i, j] = J[j, i] = v
        return J

    def field(self) -> np.ndarray:
        return np.array(self.zeeman, dtype=float)


class GroundStateResult(NamedTuple):
    minimum_energy: float
    configurations: list[tuple[int, ...]]


class Readout(NamedTuple):
    spins: np.ndarray
    resolved: np.ndarray

    @property
    def all_resolved(self) -> bool:
        return bool(np.all(self.resolved))


def as_spins(config: Iterable[int], site_count: int | None = None) -> np.ndarray:
    """Validate a spin configuration and return it as an int8 array."""
    s = np.asarray(list(config) if not isinstance(config, np.ndarray) else config)
    if s.ndim != 1:
        raise ValueError("spin configuration must be one-dimensional")
    if site_count is not None and s.size != site_count:
        raise ValueError(f"configuration has {s.size} spins, problem has {site_count}")
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("spins must be +1 or -1")
    return s.astype(np.int8)


def energy(problem: IsingProblem, config: Iterable[int]) -> float:
    """Ising energy of ``config``.

    Terms are accumulated with :func:`math.fsum`, so the result is the
    correctly rounded sum and does not depend on the order in which pairs
    were stored.
    """
    s = as_spins(config, problem.site_count)
    terms = [v * int(s[i]) * int(s[j]) for (i, j), v in problem.couplings.items()]
    terms.extend(h * int(si) for h, si in zip(problem.zeeman, s))
    return math.fsum(terms)


def _all_configs(m: int, start: int, stop: int) -> np.ndarray:
    # bit k of the index -> spin k, 0 -> +1 and 1 -> -1
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(m, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.float64)


def brute_force_ground_state(problem: IsingProblem,
                             max_sites: int = MAX_ORACLE_SITES) -> GroundStateResult:
    """Enumerate all ``2**M`` configurations and return every minimiser.

    Candidates are located with vectorised energies and then re-scored with
    :func:`energy`, so each returned configuration evaluates to
    ``minimum_energy`` exactly.

    Raises
    ------
    OracleInfeasibleError
        If ``problem.M`` exceeds ``max_sites``.
    """
    m = problem.site_count
    if m > max_sites:
        raise OracleInfeasibleError(
            f"exhaustive search over 2**{m} states refused (limit M <= {max_sites})")
    upper = np.triu(problem.matrix(), k=1)
    h = problem.field()
    scale = float(np.abs(upper).sum() + np.abs(h).sum()) or 1.0
    slack = 1e-9 * scale

    total = 1 << m
    chunk = 1 << _CHUNK_BITS
    best = math.inf
    candidates: list[np.ndarray] = []
    for start in range(0, total, chunk):
        s = _all_configs(m, start, min(start + chunk, total))
        e = np.einsum("ki,ij,kj->k", s, upper, s) + s @ h
        low = float(e.min())
        if low > best + slack:
            continue
        if low < best - slack:
            candidates = []
        best = min(best, low)
        candidates.append(s[e <= best + slack])
    pool = np.concatenate(candidates).astype(np.int8)
    scored = [(energy(problem, row), tuple(int(x) for x in row)) for row in pool]
    emin = min(e for e, _ in scored)
    configs = sorted({c for e, c in scored if e == emin}, reverse=True)
    return GroundStateResult(emin, configs)


def readout_spins(phases: Sequence[float], threshold: float = 0.5) -> Readout:
    """Map slave-laser phases to spins via the sign of ``sin(phi)``.

    A site whose ``|sin(phi)|`` is below ``threshold`` is still close to the
    master reference (0 or pi) and is flagged unresolved; its spin is
    reported as +1 when ``sin(phi)`` is exactly zero.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    s = np.sin(np.asarray(phases, dtype=float))
    spins = np.where(s < 0, -1, 1).astype(np.int8)
    return Readout(spins, np.abs(s) >= threshold)


def flip_all(config: Iterable[int]) -> np.ndarray:
    return -as_spins(config)
