"""Classical magnetization dynamics: raw equation of motion, polarizable-medium
closure, and the Landau-Lifshitz-Gilbert form, integrated by exact rotations.

Sign conventions (single source of truth):

    gamma   = -e/m          (> 0 for the electron, e < 0)
    alpha_G = |e| M_s / (4 m^2 c^2 chi_m)

The raw equation  dM/dt = (e/m) M x B - (e/4m^2c^2) M x dtB
                          + (e/2mc^2) M x (E x v)
with the medium closure dtB = (1/chi_m) dM/dt is algebraically identical to
the LLG form with B_eff = B - (1/2c^2) v x E:  the E-term matches through
v x E = -(E x v) and gamma = -e/m, and solving the implicit Gilbert term for
dM/dt gives the explicit Landau-Lifshitz right-hand side used below.

Stepping: midpoint rotation.  The right-hand side is converted to an
instantaneous rotation axis; a half-step rotation predicts the midpoint and
the full step rotates the original vector, so |M| is preserved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .fields import FieldConfig, PhysicalParams
from .trajectory import (ComparisonMetrics, MagnetizationTrajectory,
                         compare_trajectories)

__all__ = [
    "LLGParams", "effective_field", "gilbert_constant", "llg_integrate",
    "raw_eom_integrate", "compare_trajectories", "ComparisonMetrics",
]


@dataclass
class LLGParams:
    field: FieldConfig
    params: PhysicalParams
    alpha_g: float = 0.0
    chi_m: float = 1.0
    M_s: float = 1.0
    v: tuple = (0.0, 0.0, 0.0)
    x_point: float = 0.0     # spatial point where fields are evaluated

    def __post_init__(self):
        if self.M_s <= 0:
            raise ValueError("M_s must be positive")
        if self.alpha_g < 0:
            raise ValueError("alpha_g must be non-negative")
        if self.gamma <= 0:
            raise ValueError("gamma = -e/m must be positive (e < 0)")

    @property
    def gamma(self) -> float:
        return -self.params.e / self.params.m


def gilbert_constant(params: PhysicalParams, M_s: float, chi_m: float) -> float:
    """alpha_G = |e| M_s / (4 m^2 c^2 chi_m), the dimensionless damping constant.

    The magnitude convention |e| is used so that alpha_G > 0 damps; with the
    signed electron charge the bare product e*M_s would be negative.
    """
    if chi_m == 0:
        raise ValueError("chi_m must be nonzero")
    return abs(params.e) * M_s / (4.0 * params.m ** 2 * params.c ** 2 * chi_m)


def effective_field(field: FieldConfig, v, t: float, params: PhysicalParams,
                    x_point: float = 0.0) -> np.ndarray:
    """B_eff = B - (1/2c^2) v x E at the configured spatial point."""
    B = field.B(np.array([x_point]), t)[:, 0]
    E = field.E(np.array([x_point]), t)[:, 0]
    return B - np.cross(np.asarray(v, dtype=float), E) / (2.0 * params.c ** 2)


def _rotate(m, axis, angle):
    """Rodrigues rotation of 3-tuple m about unit-normalized axis*angle."""
    ax, ay, az = axis
    norm = math.sqrt(ax * ax + ay * ay + az * az)
    if norm * abs(angle) < 1e-300:
        return m
    ux, uy, uz = ax / norm, ay / norm, az / norm
    th = angle * norm
    c, s = math.cos(th), math.sin(th)
    mx, my, mz = m
    dot = ux * mx + uy * my + uz * mz
    cx = uy * mz - uz * my
    cy = uz * mx - ux * mz
    cz = ux * my - uy * mx
    return (mx * c + cx * s + ux * dot * (1 - c),
            my * c + cy * s + uy * dot * (1 - c),
            mz * c + cz * s + uz * dot * (1 - c))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _llg_axis(M, Beff, gamma, alpha, Ms):
    """Rotation axis Omega with dM/dt = Omega x M for the explicit LL form."""
    pref = gamma / (1.0 + alpha * alpha)
    # dM/dt = -pref M x Beff - pref*alpha/Ms M x (M x Beff)
    mxb = _cross(M, Beff)
    mxmxb = _cross(M, mxb)
    D = (-pref * mxb[0] - pref * alpha / Ms * mxmxb[0],
         -pref * mxb[1] - pref * alpha / Ms * mxmxb[1],
         -pref * mxb[2] - pref * alpha / Ms * mxmxb[2])
    Ms2 = Ms * Ms
    mxd = _cross(M, D)
    return (mxd[0] / Ms2, mxd[1] / Ms2, mxd[2] / Ms2)


def _raw_axis(M, B, dtB, ExV, e, m, c, eta, Ms):
    """Axis for the raw equation; eta = -e/(4 m^2 c^2 chi) or 0."""
    K0 = (e / m)
    K2 = e / (2.0 * m * c * c)
    mxb = _cross(M, B)
    mxe = _cross(M, ExV)
    K = (K0 * mxb[0] + K2 * mxe[0],
         K0 * mxb[1] + K2 * mxe[1],
         K0 * mxb[2] + K2 * mxe[2])
    if dtB is not None:
        K3 = -e / (4.0 * m * m * c * c)
        mxdb = _cross(M, dtB)
        K = (K[0] + K3 * mxdb[0], K[1] + K3 * mxdb[1], K[2] + K3 * mxdb[2])
    if eta != 0.0:
        # solve D = K + eta M x D  =>  D = (K + eta M x K)/(1 + eta^2 Ms^2)
        mxk = _cross(M, K)
        den = 1.0 + eta * eta * Ms * Ms
        D = ((K[0] + eta * mxk[0]) / den,
             (K[1] + eta * mxk[1]) / den,
             (K[2] + eta * mxk[2]) / den)
    else:
        D = K
    Ms2 = Ms * Ms
    mxd = _cross(M, D)
    return (mxd[0] / Ms2, mxd[1] / Ms2, mxd[2] / Ms2)


def _run_rotation_steps(M0, axis_fn, t0, t1, dt, store_every=1):
    n_steps = int(round((t1 - t0) / dt))
    M = tuple(float(v) for v in M0)
    times = [t0]
    out = [M]
    for j in range(n_steps):
        t_mid = t0 + (j + 0.5) * dt
        ax0 = axis_fn(M, t_mid)
        M_half = _rotate(M, ax0, 0.5 * dt)
        ax1 = axis_fn(M_half, t_mid)
        M = _rotate(M, ax1, dt)
        if (j + 1) % store_every == 0:
            times.append(t0 + (j + 1) * dt)
            out.append(M)
    return np.array(times), np.array(out)


def llg_integrate(M0, p: LLGParams, t0: float, t1: float, dt: float,
                  store_every: int = 1) -> MagnetizationTrajectory:
    """Integrate dM/dt = -gamma M x B_eff - (alpha_G/M_s) M x dM/dt."""
    M0 = np.asarray(M0, dtype=float)
    if abs(np.linalg.norm(M0) - p.M_s) > 1e-12 * p.M_s:
        raise ValueError("|M0| must equal M_s")
    gamma, alpha, Ms = p.gamma, p.alpha_g, p.M_s
    static = p.field.static
    if static:
        Beff = tuple(effective_field(p.field, p.v, t0, p.params, p.x_point))

        def axis_fn(M, t):
            return _llg_axis(M, Beff, gamma, alpha, Ms)
    else:
        def axis_fn(M, t):
            Beff = tuple(effective_field(p.field, p.v, t, p.params, p.x_point))
            return _llg_axis(M, Beff, gamma, alpha, Ms)

    times, M = _run_rotation_steps(tuple(M0), axis_fn, t0, t1, dt, store_every)
    return MagnetizationTrajectory(times=times, M=M)


def raw_eom_integrate(M0, p: LLGParams, t0: float, t1: float, dt: float,
                      closure: str = "external_field",
                      store_every: int = 1) -> MagnetizationTrajectory:
    """Integrate the raw magnetization equation of motion.

    external_field:     dtB comes from the field model.
    polarizable_medium: dtB = (1/chi_m) dM/dt, solved per step explicitly.
    """
    if closure not in ("external_field", "polarizable_medium"):
        raise ValueError(f"unknown closure {closure!r}")
    M0 = np.asarray(M0, dtype=float)
    if abs(np.linalg.norm(M0) - p.M_s) > 1e-12 * p.M_s:
        raise ValueError("|M0| must equal M_s")
    e, m, c = p.params.e, p.params.m, p.params.c
    Ms = p.M_s
    eta = -e / (4.0 * m ** 2 * c ** 2 * p.chi_m) if closure == "polarizable_medium" else 0.0
    v = np.asarray(p.v, dtype=float)
    static = p.field.static

    def fields_at(t):
        xp = np.array([p.x_point])
        B = tuple(p.field.B(xp, t)[:, 0])
        E = p.field.E(xp, t)[:, 0]
        ExV = tuple(np.cross(E, v))
        dtB = tuple(p.field.dtB(xp, t)[:, 0]) if closure == "external_field" else None
        return B, ExV, dtB

    if static:
        B0, ExV0, dtB0 = fields_at(t0)

        def axis_fn(M, t):
            return _raw_axis(M, B0, dtB0, ExV0, e, m, c, eta, Ms)
    else:
        def axis_fn(M, t):
            B, ExV, dtB = fields_at(t)
            return _raw_axis(M, B, dtB, ExV, e, m, c, eta, Ms)

    times, M = _run_rotation_steps(tuple(M0), axis_fn, t0, t1, dt, store_every)
    return MagnetizationTrajectory(times=times, M=M)


def damped_polar_reference(theta0: float, gamma: float, alpha: float,
                           B0: float, times: np.ndarray) -> np.ndarray:
    """Polar angle law for B along z: tan(theta/2) decays exponentially at
    rate gamma*alpha*B0/(1+alpha^2)."""
    rate = gamma * alpha * B0 / (1.0 + alpha ** 2)
    return 2.0 * np.arctan(np.tan(theta0 / 2.0) * np.exp(-rate * times))
