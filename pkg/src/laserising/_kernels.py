"""Compiled inner loops for the slave-laser Langevin equations.

Everything here works on flat float64 arrays so numba can compile it once;
the public wrappers live in :mod:`laserising.dynamics`.
"""

import math

import numpy as np
from numba import njit

# status codes returned by advance()
OK = 0
NONFINITE = 1

# variable tags used in NONFINITE diagnostics
VAR_AMPLITUDE = 0
VAR_PHASE = 1
VAR_CARRIERS = 2


@njit(cache=True, nogil=True)
def wrap_phase(x):
    """Wrap to (-pi, pi]; values already in range are returned unchanged."""
    if -math.pi < x <= math.pi:
        return x
    return math.pi - (math.pi - x) % (2.0 * math.pi)


@njit(cache=True, nogil=True)
def drifts(A, phi, N, wq, tau_sp, beta, zeta, eta, pump, sqrt_nm, J, lam, detune,
           dA, dphi, dN):
    """Deterministic right-hand sides of the amplitude, phase and carrier equations."""
    m = A.shape[0]
    for i in range(m):
        e_cv = beta * N[i] / tau_sp
        s_i = math.sin(phi[i])
        c_i = math.cos(phi[i])
        amp = -0.5 * (wq - e_cv) * A[i] + wq * sqrt_nm * (zeta * c_i - eta * lam[i] * s_i)
        ph = wq * sqrt_nm * (-zeta * s_i - eta * lam[i] * c_i)
        for j in range(m):
            if j == i or J[i, j] == 0.0:
                continue
            k = wq * 0.5 * eta * J[i, j] * A[j]
            amp -= k * math.cos(phi[j] - phi[i])
            ph -= k * math.sin(phi[j] - phi[i])
        dA[i] = amp
        dphi[i] = ph / A[i] + detune[i]
        dN[i] = pump - N[i] / tau_sp * (1.0 + beta * (A[i] * A[i] + 1.0))


@njit(cache=True, nogil=True)
def diffusions(A, N, tau_sp, beta, pump, scales, out):
    """Variance rates of the Langevin forces, shape (3, M): amplitude, phase, carriers."""
    for i in range(A.shape[0]):
        e_cv = beta * N[i] / tau_sp
        out[0, i] = scales[0] * 0.5 * e_cv
        out[1, i] = scales[1] * e_cv / (2.0 * A[i] * A[i])
        out[2, i] = scales[2] * (N[i] / tau_sp + pump)


@njit(cache=True, nogil=True)
def advance(A, phi, N, n_samples, stride, dt, wq, tau_sp, beta, zeta, eta, pump, sqrt_nm,
            J, lam, detune, noise, scales, floor, out, diag):
    """Take ``n_samples * stride`` Euler-Maruyama steps in place.

    The state after every ``stride`` steps is written to ``out[k]`` as rows
    (A, phi, N). ``noise`` holds one standard normal per step, variable and
    laser, or has zero length for a noise-free run. ``diag`` collects the
    clamp count in slot 0 and, on failure, the step, laser and variable of
    the first non-finite value in slots 1..3.
    """
    m = A.shape[0]
    dA = np.empty(m)
    dphi = np.empty(m)
    dN = np.empty(m)
    var = np.zeros((3, m))
    noisy = noise.shape[0] > 0
    sqdt = math.sqrt(dt)
    step = 0
    for k in range(n_samples):
        for _ in range(stride):
            drifts(A, phi, N, wq, tau_sp, beta, zeta, eta, pump, sqrt_nm, J, lam, detune,
                   dA, dphi, dN)
            if noisy:
                diffusions(A, N, tau_sp, beta, pump, scales, var)
            for i in range(m):
                a = A[i] + dA[i] * dt
                p = phi[i] + dphi[i] * dt
                n = N[i] + dN[i] * dt
                if noisy:
                    a += sqdt * math.sqrt(var[0, i]) * noise[step, 0, i]
                    p += sqdt * math.sqrt(var[1, i]) * noise[step, 1, i]
                    n += sqdt * math.sqrt(var[2, i]) * noise[step, 2, i]
                if not math.isfinite(a) or not math.isfinite(p) or not math.isfinite(n):
                    diag[1] = step
                    diag[2] = i
                    if not math.isfinite(a):
                        diag[3] = VAR_AMPLITUDE
                    elif not math.isfinite(p):
                        diag[3] = VAR_PHASE
                    else:
                        diag[3] = VAR_CARRIERS
                    return NONFINITE
                if a < floor:
                    a = floor
                    diag[0] += 1
                A[i] = a
                phi[i] = wrap_phase(p)
                N[i] = n
            step += 1
        for i in range(m):
            out[k, 0, i] = A[i]
            out[k, 1, i] = phi[i]
            out[k, 2, i] = N[i]
    return OK
