"""Time evolution of spinor states and mean-spin trajectory extraction.

One step is psi <- exp(-(i/hbar) dt H(t + dt/2)) psi with a dense matrix
exponential (exponential midpoint).  For static Hamiltonians the step matrix
is built once, so long runs are matrix-vector products.

The pseudo-PT Hamiltonians have +-iE spectral pairs, so components grow and
decay exponentially; by default each step rescales the state by its
conventional norm to keep numbers finite.  Pseudo expectations are ratios of
PT pairings and are invariant under that rescaling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.linalg import expm

from .algebra import build_matrix_set
from .fields import FieldConfig, PhysicalParams
from .fw import _comm, field_operators, mean_spin_closed
from .grids import DiscreteOperator, Grid, HBAR, spinor_grid
from .ptsym import (SpinorField, pseudo_expectation, pt_inner, pt_normalize,
                    sigma_operators)
from .trajectory import MagnetizationTrajectory

_MATS = build_matrix_set()

DIVERGENCE_GUARD = 1e6


class DivergenceError(RuntimeError):
    """Conventional norm exceeded the divergence guard (blow-up regime)."""


def rest_shifted(H, params: PhysicalParams) -> np.ndarray:
    """H - i m c^2 * identity.

    Subtracting a multiple of the identity changes every solution by one
    overall scalar factor exp(m c^2 t / hbar), so pseudo expectations are
    untouched; it removes the uniform rest-mass gain of the pseudo-PT
    Hamiltonians that would otherwise overflow long runs.
    """
    mat = H.matrix if isinstance(H, DiscreteOperator) else H
    return mat - 1j * params.m * params.c ** 2 * np.eye(mat.shape[0])


@dataclass
class QuantumTrajectory:
    times: np.ndarray
    states: List[SpinorField]
    dt: float
    method: str = "exp_midpoint"
    renorm_log: Optional[np.ndarray] = None   # accumulated log of removed scale

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times/states length mismatch")


@dataclass
class SeparableState:
    """Scalar profile times a fixed 4-spinor; tensor product held exactly."""

    profile: np.ndarray       # (n,) complex
    spin_part: np.ndarray     # (4,) complex
    grid: Grid

    def to_field(self) -> SpinorField:
        return SpinorField(values=np.outer(self.spin_part, self.profile),
                           grid=self.grid)


def spin_half_vector(direction) -> np.ndarray:
    """2-spinor chi with <sigma> pointing along the given unit 3-vector."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    theta = np.arccos(np.clip(u[2], -1.0, 1.0))
    phi = np.arctan2(u[1], u[0])
    return np.array([np.cos(theta / 2.0),
                     np.exp(1j * phi) * np.sin(theta / 2.0)], dtype=complex)


def gaussian_packet(grid: Grid, width: Optional[float] = None, k0: float = 0.0,
                    center: float = 0.0) -> np.ndarray:
    if width is None:
        width = grid.length / 10.0
    prof = np.exp(-((grid.x - center) ** 2) / (2.0 * width ** 2)
                  + 1j * k0 * grid.x)
    return prof / np.sqrt(np.sum(np.abs(prof) ** 2) * grid.spacing)


def positive_energy_projector(grid: Grid, params: PhysicalParams) -> np.ndarray:
    """Projector onto the free +E branch, assembled per wavenumber."""
    n = grid.n
    F = np.fft.fft(np.eye(n), axis=0)
    Finv = np.fft.ifft(np.eye(n), axis=0)
    proj = np.zeros((4 * n, 4 * n), dtype=complex)
    blocks = []
    for k in grid.k_derivative:
        p = HBAR * k
        K = params.c * _MATS.alpha[0] * p + params.m * params.c ** 2 * _MATS.beta
        E = np.sqrt((params.m * params.c ** 2) ** 2 + (params.c * p) ** 2)
        blocks.append((np.eye(4) + K / E) / 2.0)
    # assemble kron-structured projector: spinor blocks act per k-mode
    for a in range(4):
        for b in range(4):
            diag_ab = np.diag([blk[a, b] for blk in blocks])
            proj[a * n:(a + 1) * n, b * n:(b + 1) * n] = Finv @ diag_ab @ F
    return proj


def separable_positive_packet(grid: Grid, params: PhysicalParams,
                              spin_direction=(0.0, 0.0, 1.0),
                              width: Optional[float] = None, k0: float = 0.0,
                              project: bool = True) -> SpinorField:
    """Default initial state: PT-normalized Gaussian packet, upper spinor
    along spin_direction, optionally projected on the free +E branch."""
    chi2 = spin_half_vector(spin_direction)
    spinor = np.array([chi2[0], chi2[1], 0.0, 0.0], dtype=complex)
    prof = gaussian_packet(grid, width=width, k0=k0)
    psi = SpinorField(values=np.outer(spinor, prof), grid=grid)
    if project:
        vec = positive_energy_projector(grid, params) @ psi.flat()
        psi = SpinorField.from_flat(vec, grid)
    return pt_normalize(psi)


def band_limit_projector(grid: Grid, k_cut: float) -> np.ndarray:
    """Projector onto the |k| <= k_cut subspace of the full spinor-grid space.

    The pseudo-PT Hamiltonians amplify every mode at its own real rate, so
    roundoff seeded at high wavenumbers eventually outgrows a smooth packet.
    Restricting long runs to the band actually carrying the packet removes
    that channel without touching the resolved dynamics.
    """
    n = grid.n
    F = np.fft.fft(np.eye(n), axis=0)
    Finv = np.fft.ifft(np.eye(n), axis=0)
    mask = (np.abs(grid.k_derivative) <= k_cut).astype(float)
    proj_n = np.real(Finv @ np.diag(mask) @ F)
    return np.kron(np.eye(4), proj_n)


def propagate(H_provider: Callable[[float], np.ndarray], psi0: SpinorField,
              t0: float, t1: float, dt: float, store_every: int = 1,
              renormalize: bool = True, static: bool = False,
              guard: float = DIVERGENCE_GUARD,
              k_filter: Optional[float] = None) -> QuantumTrajectory:
    """Exponential-midpoint propagation storing every `store_every`-th state."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round((t1 - t0) / dt))
    if abs(n_steps * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError("(t1 - t0)/dt must be an integer")

    filt = band_limit_projector(psi0.grid, k_filter) if k_filter else None

    def H_at(t):
        H = H_provider(t)
        return H.matrix if isinstance(H, DiscreteOperator) else H

    step_matrix = None
    if static:
        step_matrix = expm(-1j * dt / HBAR * H_at(t0))
        if filt is not None:
            step_matrix = filt @ step_matrix @ filt

    grid = psi0.grid
    vec = psi0.flat().copy()
    norm0 = np.linalg.norm(vec)
    logscale = 0.0
    times = [t0]
    states = [SpinorField.from_flat(vec.copy(), grid)]
    logs = [0.0]
    for j in range(n_steps):
        t = t0 + j * dt
        if step_matrix is not None:
            U = step_matrix
        else:
            U = expm(-1j * dt / HBAR * H_at(t + dt / 2.0))
            if filt is not None:
                U = filt @ U @ filt
        vec = U @ vec
        nrm = np.linalg.norm(vec)
        if not np.isfinite(nrm) or nrm > guard * norm0:
            raise DivergenceError(
                f"conventional norm grew by {nrm / norm0:.2e} at t={t + dt:.4g}")
        if renormalize:
            logscale += np.log(nrm / norm0)
            vec = vec * (norm0 / nrm)
        if (j + 1) % store_every == 0:
            times.append(t + dt)
            states.append(SpinorField.from_flat(vec.copy(), grid))
            logs.append(logscale)
    return QuantumTrajectory(times=np.array(times), states=states, dt=dt,
                             renorm_log=np.array(logs))


def spin_trajectory(traj: QuantumTrajectory,
                    O_provider: Callable[[float], List[np.ndarray]],
                    mu_b: float = 1.0) -> MagnetizationTrajectory:
    """Per-time 3-vector of pseudo expectations of the provided spin
    operators, scaled by mu_b; imaginary parts kept as diagnostics."""
    nt = len(traj.times)
    M = np.zeros((nt, 3))
    Mi = np.zeros((nt, 3))
    ptre = np.zeros(nt)
    ptim = np.zeros(nt)
    conv = np.zeros(nt)
    for j, (t, psi) in enumerate(zip(traj.times, traj.states)):
        ops = O_provider(t)
        q = pt_inner(psi, psi)
        ptre[j], ptim[j] = q.real, q.imag
        conv[j] = psi.conventional_norm()
        for i in range(3):
            val = mu_b * pseudo_expectation(psi, ops[i])
            M[j, i], Mi[j, i] = val.real, val.imag
    return MagnetizationTrajectory(
        times=traj.times, M=M, M_imag=Mi,
        norms=np.linalg.norm(M, axis=1),
        extra={"pt_norm_re": ptre, "pt_norm_im": ptim, "conv_norm": conv})


def zitterbewegung_check(psi: SpinorField, grid: Grid, field: FieldConfig,
                         t: float, params: PhysicalParams) -> float:
    """Magnitude of the pseudo expectation of the odd commutator block

        (1/4 hbar m^2 c) ( [(a.pi) Sigma (a.pi), (a.pi)] - [(a.pi)^3, Sigma] )

    which cancels on separable single-branch states."""
    ops = field_operators(grid, field, t, params)
    alpha = [spinor_grid(a, grid.n) for a in _MATS.alpha]
    sigma = sigma_operators(grid)
    a_pi = sum(alpha[i] @ ops.pi[i] for i in range(3))
    a_pi3 = a_pi @ a_pi @ a_pi
    vals = []
    for i in range(3):
        block = (_comm(a_pi @ sigma[i] @ a_pi, a_pi) - _comm(a_pi3, sigma[i]))
        block = block / (4.0 * HBAR * params.m ** 2 * params.c)
        vals.append(pseudo_expectation(psi, block))
    return float(np.linalg.norm(np.abs(np.array(vals))))


def precession_term_magnitude(psi: SpinorField, grid: Grid, field: FieldConfig,
                              t: float, params: PhysicalParams) -> float:
    """|(e/m) <beta Sigma> x B| evaluated with the packet-averaged field."""
    sigma = sigma_operators(grid)
    beta = spinor_grid(_MATS.beta, grid.n)
    s = np.array([pseudo_expectation(psi, beta @ sigma[i]) for i in range(3)])
    Bbar = packet_averaged_field(psi, grid, field, t, "B")
    return float(np.linalg.norm(np.cross(s.real, Bbar)) * abs(params.e) / params.m)


def packet_averaged_field(psi: SpinorField, grid: Grid, field: FieldConfig,
                          t: float, which: str) -> np.ndarray:
    """|psi|^2-weighted average of a sampled grid field (3-vector)."""
    from .fields import sample_gauge
    g = sample_gauge(field, grid, t)
    arr = getattr(g, which)
    dens = np.sum(np.abs(psi.values) ** 2, axis=0)
    dens = dens / dens.sum()
    return np.array([float(np.real(np.sum(arr[i] * dens))) for i in range(3)])


def mean_spin_eom_residual(traj: QuantumTrajectory, grid: Grid,
                           field: FieldConfig, params: PhysicalParams,
                           order: int = 3,
                           include_dtB_term: bool = True) -> dict:
    """Residual of the mean-spin equation of motion along a trajectory.

    Left side: centered difference of <Sigma-bar>_PT.  Right side:

        (e/m) <beta Sigma> x B - (e hbar / 4 m^2 c^2) <Sigma> x dtB
        - (e / 2 m c^2) <Sigma> x (E x <(i/m) pi>)

    with B, dtB, E packet-averaged sampled fields.  Returns the residual
    3-vectors, the toggled term magnitudes, and the raw sides.
    """
    if len(traj.times) < 3:
        raise ValueError("need at least 3 stored times")
    sigma = sigma_operators(grid)
    beta = spinor_grid(_MATS.beta, grid.n)
    m, c, e = params.m, params.c, params.e

    meanspin_cache = {}

    def meanspin_ops(t):
        if t not in meanspin_cache:
            terms = mean_spin_closed(grid, field, t, params, order=order)
            meanspin_cache[t] = terms.assemble(m, order)
        return meanspin_cache[t]

    nt = len(traj.times)
    sbar = np.zeros((nt, 3), dtype=complex)
    for j, (t, psi) in enumerate(zip(traj.times, traj.states)):
        ops = meanspin_ops(t if not field.static else traj.times[0])
        for i in range(3):
            sbar[j, i] = pseudo_expectation(psi, ops[i])

    dt = traj.times[1] - traj.times[0]
    residuals = []
    dtB_terms = []
    lhs_list, rhs_list = [], []
    pi_ops = None
    for j in range(1, nt - 1):
        t = traj.times[j]
        psi = traj.states[j]
        lhs = (sbar[j + 1] - sbar[j - 1]) / (2.0 * dt)
        if pi_ops is None or not field.static:
            pi_ops = field_operators(grid, field, t, params).pi
        s_beta = np.array([pseudo_expectation(psi, beta @ sigma[i]) for i in range(3)])
        s_plain = np.array([pseudo_expectation(psi, sigma[i]) for i in range(3)])
        pi_exp = np.array([pseudo_expectation(psi, pi_ops[i]) for i in range(3)])
        Bbar = packet_averaged_field(psi, grid, field, t, "B")
        dtBbar = packet_averaged_field(psi, grid, field, t, "dtB")
        Ebar = packet_averaged_field(psi, grid, field, t, "E")
        vel = (1j / m) * pi_exp
        rhs = (e / m) * np.cross(s_beta, Bbar)
        term_dtB = -(e * HBAR / (4.0 * m ** 2 * c ** 2)) * np.cross(s_plain, dtBbar)
        if include_dtB_term:
            rhs = rhs + term_dtB
        rhs = rhs - (e / (2.0 * m * c ** 2)) * np.cross(s_plain, np.cross(Ebar, vel))
        residuals.append(np.abs(lhs - rhs))
        dtB_terms.append(np.abs(term_dtB))
        lhs_list.append(lhs)
        rhs_list.append(rhs)
    return dict(
        times=traj.times[1:-1],
        residual=np.array(residuals),
        dtB_term=np.array(dtB_terms),
        lhs=np.array(lhs_list),
        rhs=np.array(rhs_list),
    )


def fw_form_eom_residual(traj: QuantumTrajectory, grid: Grid,
                         field: FieldConfig, params: PhysicalParams) -> np.ndarray:
    """Residual of the FW-representation spin equation along an FW trajectory:

        d/dt <Sigma> = (e/m) <beta [Sigma x (B + (1/2c^2) E x (i beta/m) pi)]>
                       - (e hbar / 4 m^2 c^2) <Sigma x (curl E)>
    """
    if len(traj.times) < 3:
        raise ValueError("need at least 3 stored times")
    from .fw import cross_op
    sigma = sigma_operators(grid)
    beta = spinor_grid(_MATS.beta, grid.n)
    m, c, e = params.m, params.c, params.e
    nt = len(traj.times)
    svals = np.zeros((nt, 3), dtype=complex)
    for j, psi in enumerate(traj.states):
        for i in range(3):
            svals[j, i] = pseudo_expectation(psi, sigma[i])
    dt = traj.times[1] - traj.times[0]
    out = []
    for j in range(1, nt - 1):
        t = traj.times[j]
        psi = traj.states[j]
        ops = field_operators(grid, field, t, params)
        eff = [ops.B[i] + (1.0 / (2.0 * c ** 2)) *
               cross_op(ops.E, [(1j / m) * beta @ p for p in ops.pi])[i]
               for i in range(3)]
        s_x_eff = cross_op(sigma, eff)
        s_x_curl = cross_op(sigma, ops.curl_E)
        lhs = (svals[j + 1] - svals[j - 1]) / (2.0 * dt)
        rhs = np.array([
            (e / m) * pseudo_expectation(psi, beta @ s_x_eff[i])
            - (e * HBAR / (4.0 * m ** 2 * c ** 2)) * pseudo_expectation(psi, s_x_curl[i])
            for i in range(3)])
        out.append(np.abs(lhs - rhs))
    return np.array(out)
