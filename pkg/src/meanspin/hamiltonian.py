"""Dense Dirac Hamiltonians on the spinor-grid space.

Two variants are built from the same sampled gauge:

  pseudo_pt   H = i (c alpha.(p + i e A) - e Phi + m c^2 beta)
  hermitian   H = c alpha.(p - e A) + e Phi + m c^2 beta
"""

from __future__ import annotations

import numpy as np

from .algebra import SpinorMatrixSet, build_matrix_set
from .fields import FieldConfig, PhysicalParams, sample_gauge
from .grids import (DiscreteOperator, Grid, HBAR, grid_op, momentum_operator,
                    multiplication_operator, spinor_grid)

_MATS = build_matrix_set()


def kinetic_momentum_operators(grid: Grid, field: FieldConfig, t: float,
                               params: PhysicalParams,
                               coupling: str = "pseudo_pt") -> list:
    """pi_i = p_i + i e A_i (pseudo_pt) or p_i - e A_i (hermitian), full space.

    Only p_x is a differential operator; transverse momenta are zero.
    """
    g = sample_gauge(field, grid, t)
    p_x = momentum_operator(grid).matrix
    factor = 1j * params.e if coupling == "pseudo_pt" else -params.e
    ops = []
    for i in range(3):
        mat = factor * multiplication_operator(g.A[i])
        if i == 0:
            mat = mat + p_x
        ops.append(grid_op(mat))
    return ops


def build_dirac_hamiltonian(grid: Grid, field: FieldConfig, t: float,
                            params: PhysicalParams,
                            variant: str = "pseudo_pt") -> DiscreteOperator:
    if variant not in ("pseudo_pt", "hermitian"):
        raise ValueError(f"unknown variant {variant!r}")
    mats = _MATS
    g = sample_gauge(field, grid, t)
    pi = kinetic_momentum_operators(grid, field, t, params, coupling=variant)
    alpha = [spinor_grid(a, grid.n) for a in mats.alpha]
    beta = spinor_grid(mats.beta, grid.n)
    phi_op = grid_op(multiplication_operator(g.Phi))
    kinetic = sum(alpha[i] @ pi[i] for i in range(3))
    if variant == "pseudo_pt":
        H = 1j * (params.c * kinetic - params.e * phi_op
                  + params.m * params.c ** 2 * beta)
        return DiscreteOperator(matrix=H, hermitian_flag=False,
                                label=f"H_dirac_pseudo_pt[{field.kind}]")
    H = params.c * kinetic + params.e * phi_op + params.m * params.c ** 2 * beta
    return DiscreteOperator(matrix=H, hermitian_flag=True,
                            label=f"H_dirac_hermitian[{field.kind}]")


def maxwell_faraday_residual(field: FieldConfig, grid: Grid, t: float,
                             params: PhysicalParams) -> float:
    """max over the interior window of |curl E + dtB| with curl E evaluated
    through the momentum commutator acting on the sampled field.

    For x-only fields the only contributing commutator is [p_x, E_j]; applied
    to the unit grid function it returns the spectral derivative of E_j.
    """
    g = sample_gauge(field, grid, t)
    p_x = momentum_operator(grid).matrix
    ones = np.ones(grid.n, dtype=complex)
    # [p_x, E_j] 1 = p_x(E_j) - E_j p_x(1) ; divide by -i hbar for d/dx E_j
    dE = np.array([
        (p_x @ (g.E[j] * ones) - g.E[j] * (p_x @ ones)) / (-1j * HBAR)
        for j in range(3)
    ])
    curl_E = np.stack([np.zeros(grid.n, dtype=complex), -dE[2], dE[1]])
    res = curl_E + g.dtB
    mask = grid.interior_mask()
    return float(np.abs(res[:, mask]).max())
