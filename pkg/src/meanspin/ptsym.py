"""Antilinear PT machinery on discretized spinor fields.

Three related objects live here and are deliberately kept distinct:

* `PTOperator` / `pt_apply`: the full spinorial parity-time map
  psi -> gamma^0 (i gamma^1 gamma^3) conj(psi(-x)).  This is the
  state-level transformation (antilinearity, (PT)^2 sign, plane waves).

* `pt_inner`: the indefinite pairing used for all expectation values,
  <phi|psi> = h * sum_x [gamma^0 conj(phi)(-x)]^T psi(x).  The metric keeps
  the parity spinor factor gamma^0 and the scalar part of time reversal
  (conjugation + reflection).  This is the pairing under which the free
  eigenvector quartet carries both norm signs and positive-energy states
  are not self-orthogonal.

* `pseudo_pt_symmetry_residual`: the operator-level check
  ||U conj(H) U^-1 - H^dagger|| / ||H|| with U the scalar reflection
  (spinor identity), matching the metric form of the pseudo-Hermiticity
  relation that the shipped field gauges satisfy exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import build_matrix_set
from .grids import DiscreteOperator, Grid, HBAR, spinor_grid

_MATS = build_matrix_set()

SELF_ORTHOGONAL_TOL = 1e-10


class SelfOrthogonalStateError(ValueError):
    """PT norm is numerically zero; pseudo expectation values are undefined."""


@dataclass
class SpinorField:
    """4-component wavefunction sampled on the grid, shape (4, n)."""

    values: np.ndarray
    grid: Grid
    pt_norm: Optional[complex] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (4, self.grid.n):
            raise ValueError(f"spinor field shape {self.values.shape} does not "
                             f"match grid with n={self.grid.n}")

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @classmethod
    def from_flat(cls, vec: np.ndarray, grid: Grid) -> "SpinorField":
        return cls(values=np.asarray(vec, dtype=complex).reshape(4, grid.n), grid=grid)

    def conventional_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.spacing))


class PTOperator:
    """Antilinear PT: spinor matrix = parity_spinor @ timerev_spinor, plus
    spatial reflection and complex conjugation."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.spinor_matrix = _MATS.parity_spinor @ _MATS.timerev_spinor
        self.reflection = grid.reflection
        self.antilinear = True

    def __call__(self, psi: SpinorField) -> SpinorField:
        reflected = np.conj(psi.values[:, self.reflection])
        return SpinorField(values=self.spinor_matrix @ reflected, grid=psi.grid)

    def square_sign(self) -> complex:
        u = self.spinor_matrix
        sq = u @ np.conj(u)
        return complex(sq[0, 0])


def pt_apply(psi: SpinorField) -> SpinorField:
    return PTOperator(psi.grid)(psi)


def _metric_image(phi: SpinorField) -> np.ndarray:
    """gamma^0 conj(phi) with reflected grid argument (the pairing metric)."""
    reflected = np.conj(phi.values[:, phi.grid.reflection])
    return _MATS.parity_spinor @ reflected


def pt_inner(phi: SpinorField, psi: SpinorField) -> complex:
    """Quadrature pairing h * sum [metric phi]^T psi; linear in psi."""
    if phi.grid is not psi.grid and phi.grid.n != psi.grid.n:
        raise ValueError("grid mismatch in pt_inner")
    return complex(np.sum(_metric_image(phi) * psi.values) * phi.grid.spacing)


def pt_normalize(psi: SpinorField) -> SpinorField:
    """Scale so |<psi|psi>_PT| = 1 (phase of a positive-norm state removed)."""
    q = pt_inner(psi, psi)
    if abs(q) < SELF_ORTHOGONAL_TOL:
        raise SelfOrthogonalStateError(f"pt norm {q} too close to zero")
    scale = 1.0 / np.sqrt(abs(q))
    out = SpinorField(values=psi.values * scale, grid=psi.grid)
    out.pt_norm = pt_inner(out, out)
    return out


def pseudo_expectation(psi: SpinorField, op) -> complex:
    """<psi| O |psi>_PT / <psi|psi>_PT."""
    mat = op.matrix if isinstance(op, DiscreteOperator) else op
    denom = psi.pt_norm if psi.pt_norm is not None else pt_inner(psi, psi)
    if abs(denom) < SELF_ORTHOGONAL_TOL:
        raise SelfOrthogonalStateError(f"pt norm {denom} too close to zero")
    opsi = SpinorField.from_flat(mat @ psi.flat(), psi.grid)
    return pt_inner(psi, opsi) / denom


def pt_conjugation_matrix(grid: Grid, spinor_part: Optional[np.ndarray] = None) -> np.ndarray:
    """Unitary factor U of the antilinear map U * K used in operator
    conjugation; default spinor part is the identity (scalar reflection)."""
    refl = grid.reflection_matrix()
    if spinor_part is None:
        spinor_part = np.eye(4)
    return np.kron(spinor_part, refl)


def pseudo_pt_symmetry_residual(H, grid: Grid,
                                spinor_part: Optional[np.ndarray] = None) -> float:
    """|| U conj(H) U^-1 - H^dagger || / ||H|| (2-norms)."""
    mat = H.matrix if isinstance(H, DiscreteOperator) else H
    U = pt_conjugation_matrix(grid, spinor_part)
    lhs = U @ np.conj(mat) @ U.T   # reflection is an involution: U^-1 = U^T = U
    return float(np.linalg.norm(lhs - mat.conj().T, 2) / np.linalg.norm(mat, 2))


def hermiticity_defect(H) -> float:
    mat = H.matrix if isinstance(H, DiscreteOperator) else H
    return float(np.linalg.norm(mat - mat.conj().T, 2) / np.linalg.norm(mat, 2))


def spectrum_classification(H, tol: float = 1e-9) -> str:
    """Classify eigenvalues: 'imaginary_pairs' (all on the imaginary axis,
    paired +-iE), 'real', or 'complex_quartets'."""
    mat = H.matrix if isinstance(H, DiscreteOperator) else H
    ev = np.linalg.eigvals(mat)
    scale = np.abs(ev).max() or 1.0
    if np.abs(ev.imag).max() < tol * scale:
        return "real"
    if np.abs(ev.real).max() < tol * scale:
        return "imaginary_pairs"
    return "complex_quartets"


def ehrenfest_residual(times: Sequence[float], states: Sequence[SpinorField],
                       O_provider: Callable[[float], np.ndarray],
                       H_provider: Callable[[float], np.ndarray],
                       dt_op: float = 1e-4) -> np.ndarray:
    """|d/dt <O> - <(i/hbar)[H,O] + dtO>| at interior stored times.

    The time derivative of <O> uses centered differences of the stored
    expectations; dtO uses centered differences of O_provider.
    """
    if len(times) < 3:
        raise ValueError("need at least 3 stored times")
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    expl = []
    for t, psi in zip(times, states):
        expl.append(pseudo_expectation(psi, O_provider(t)))
    expl = np.array(expl)
    out = []
    for j in range(1, len(times) - 1):
        t = times[j]
        psi = states[j]
        lhs = (expl[j + 1] - expl[j - 1]) / (2.0 * dt)
        O = O_provider(t)
        H = H_provider(t)
        Hm = H.matrix if isinstance(H, DiscreteOperator) else H
        dO = (O_provider(t + dt_op) - O_provider(t - dt_op)) / (2.0 * dt_op)
        rhs_op = (1j / HBAR) * (Hm @ O - O @ Hm) + dO
        rhs = pseudo_expectation(psi, rhs_op)
        out.append(abs(lhs - rhs))
    return np.array(out)


def sigma_operators(grid: Grid) -> list:
    """The three 4n x 4n spin components Sigma_i (x) I_grid."""
    return [spinor_grid(s, grid.n) for s in _MATS.sigma]
