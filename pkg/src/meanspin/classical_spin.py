"""Canonical classical spin: S = (sqrt(S^2-p^2) cos q, sqrt(S^2-p^2) sin q, p).

The chart is a single coordinate patch; flows that approach the poles
|p| -> S abort rather than switching charts.  Analytic partial derivatives
drive both the Poisson brackets and the Hamiltonian flow; finite differences
appear only as an independent oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import MagnetizationTrajectory

POLE_FRACTION = 0.99


class PoleError(ValueError):
    """Trajectory or state too close to |p| = S_mag for the chart."""


@dataclass
class CanonicalSpinState:
    q: float
    p: float
    S_mag: float = 1.0

    def __post_init__(self):
        if self.S_mag <= 0:
            raise ValueError("S_mag must be positive")
        if abs(self.p) > self.S_mag:
            raise ValueError("|p| must not exceed S_mag")


def spin_vector(state: CanonicalSpinState) -> np.ndarray:
    r = math.sqrt(state.S_mag ** 2 - state.p ** 2)
    return np.array([r * math.cos(state.q), r * math.sin(state.q), state.p])


def _partials(q: float, p: float, S: float):
    """dS_i/dq and dS_i/dp for the three components."""
    r = math.sqrt(S * S - p * p)
    dq = np.array([-r * math.sin(q), r * math.cos(q), 0.0])
    dp = np.array([-p / r * math.cos(q), -p / r * math.sin(q), 1.0])
    return dq, dp


def poisson_bracket_matrix(state: CanonicalSpinState) -> np.ndarray:
    """{S_i, S_j} = dS_i/dq dS_j/dp - dS_i/dp dS_j/dq, analytic (3x3)."""
    if abs(state.p) > POLE_FRACTION * state.S_mag:
        raise PoleError(f"|p| = {abs(state.p)} too close to the pole")
    dq, dp = _partials(state.q, state.p, state.S_mag)
    return np.outer(dq, dp) - np.outer(dp, dq)


def poisson_bracket_check(state: CanonicalSpinState, tol: float) -> dict:
    """Compare {S_i,S_j} with eps_ijk S_k componentwise."""
    br = poisson_bracket_matrix(state)
    S = spin_vector(state)
    target = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            k = 3 - i - j
            if i != j and 0 <= k <= 2:
                sign = 1.0 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0
                target[i, j] = sign * S[k]
    resid = np.abs(br - target).max()
    return {"max_residual": float(resid), "passed": resid < tol, "bracket": br}


def poisson_bracket_fd(state: CanonicalSpinState, step: float = 1e-6) -> np.ndarray:
    """Finite-difference oracle for the bracket matrix."""
    def S_at(q, p):
        r = math.sqrt(state.S_mag ** 2 - p * p)
        return np.array([r * math.cos(q), r * math.sin(q), p])

    q, p = state.q, state.p
    dSdq = (S_at(q + step, p) - S_at(q - step, p)) / (2 * step)
    dSdp = (S_at(q, p + step) - S_at(q, p - step)) / (2 * step)
    return np.outer(dSdq, dSdp) - np.outer(dSdp, dSdq)


def casimir_bracket_fd(state: CanonicalSpinState, step: float = 1e-6) -> np.ndarray:
    """Finite-difference {S_i, S^2}; vanishes identically on the chart."""
    def S2(q, p):
        return (state.S_mag ** 2) + 0.0 * q + 0.0 * p

    q, p = state.q, state.p
    dS2dq = (S2(q + step, p) - S2(q - step, p)) / (2 * step)
    dS2dp = (S2(q, p + step) - S2(q, p - step)) / (2 * step)
    def S_at(q_, p_):
        r = math.sqrt(state.S_mag ** 2 - p_ * p_)
        return np.array([r * math.cos(q_), r * math.sin(q_), p_])
    dSdq = (S_at(q + step, p) - S_at(q - step, p)) / (2 * step)
    dSdp = (S_at(q, p + step) - S_at(q, p - step)) / (2 * step)
    return dSdq * dS2dp - dSdp * dS2dq


def hamilton_flow(B, state0: CanonicalSpinState, t0: float, t1: float,
                  dt: float, store_every: int = 1) -> MagnetizationTrajectory:
    """Midpoint integration of q' = dH/dp, p' = -dH/dq for H = B.S(q,p).

    The resulting S(t) satisfies dS/dt = B x S up to integrator tolerance.
    """
    B = np.asarray(B, dtype=float)
    S = state0.S_mag

    def rhs(q, p):
        if abs(p) > POLE_FRACTION * S:
            raise PoleError(f"|p| = {abs(p):.6f} reached the pole region")
        dq, dp = _partials(q, p, S)
        return float(B @ dp), float(-(B @ dq))

    n_steps = int(round((t1 - t0) / dt))
    q, p = state0.q, state0.p
    times = [t0]
    vecs = [spin_vector(CanonicalSpinState(q, p, S))]
    for j in range(n_steps):
        kq, kp = rhs(q, p)
        qm, pm = q + 0.5 * dt * kq, p + 0.5 * dt * kp
        kq, kp = rhs(qm, pm)
        q, p = q + dt * kq, p + dt * kp
        if (j + 1) % store_every == 0:
            times.append(t0 + (j + 1) * dt)
            vecs.append(spin_vector(CanonicalSpinState(q, p, S)))
    return MagnetizationTrajectory(times=np.array(times), M=np.array(vecs))


def direct_bxs_reference(B, S0: np.ndarray, t0: float, t1: float,
                         dt: float, store_every: int = 1) -> MagnetizationTrajectory:
    """RK4 integration of dS/dt = B x S, the independent reference flow."""
    B = np.asarray(B, dtype=float)
    S = np.asarray(S0, dtype=float).copy()
    n_steps = int(round((t1 - t0) / dt))
    times = [t0]
    vecs = [S.copy()]
    f = lambda y: np.cross(B, y)
    for j in range(n_steps):
        k1 = f(S)
        k2 = f(S + 0.5 * dt * k1)
        k3 = f(S + 0.5 * dt * k2)
        k4 = f(S + dt * k3)
        S = S + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if (j + 1) % store_every == 0:
            times.append(t0 + (j + 1) * dt)
            vecs.append(S.copy())
    return MagnetizationTrajectory(times=np.array(times), M=np.array(vecs))
