"""4x4 Dirac matrix algebra, spin operator, and parity/time-reversal spinor parts.

Everything here is fixed in the Dirac representation: beta diagonal with
(+1,+1,-1,-1), alpha with off-diagonal Pauli blocks.  The time-reversal
spinor matrix i*gamma^1*gamma^3 must always be applied together with
complex conjugation (antilinearity); `apply_antilinear` does that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

# Levi-Civita symbol as a dict of nonzero entries
EPSILON = {
    (0, 1, 2): 1.0, (1, 2, 0): 1.0, (2, 0, 1): 1.0,
    (0, 2, 1): -1.0, (2, 1, 0): -1.0, (1, 0, 2): -1.0,
}


def _block(a, b, c, d):
    return np.block([[a, b], [c, d]])


@dataclass(frozen=True)
class SpinorMatrixSet:
    """The standard Dirac-representation matrices plus P/T spinor parts."""

    alpha: tuple      # (alpha_x, alpha_y, alpha_z)
    beta: np.ndarray
    gamma: tuple      # (gamma^0, gamma^1, gamma^2, gamma^3)
    gamma5: np.ndarray
    sigma: tuple      # (Sigma_x, Sigma_y, Sigma_z), the 4x4 spin operator
    parity_spinor: np.ndarray    # gamma^0
    timerev_spinor: np.ndarray   # i gamma^1 gamma^3, applied with conjugation


@dataclass
class AlgebraReport:
    residuals: dict = field(default_factory=dict)
    tol: float = 0.0

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def build_matrix_set() -> SpinorMatrixSet:
    """Construct the Dirac-representation matrices from integer Pauli blocks."""
    beta = _block(_I2, _Z2, _Z2, -_I2)
    alpha = tuple(_block(_Z2, PAULI[a], PAULI[a], _Z2) for a in "xyz")
    gamma = (beta,) + tuple(beta @ a for a in alpha)
    gamma5 = _block(_Z2, _I2, _I2, _Z2)
    sigma = tuple(_block(PAULI[a], _Z2, _Z2, PAULI[a]) for a in "xyz")
    return SpinorMatrixSet(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        gamma5=gamma5,
        sigma=sigma,
        parity_spinor=gamma[0],
        timerev_spinor=1j * gamma[1] @ gamma[3],
    )


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def alpha_wedge_alpha(mats: SpinorMatrixSet) -> list:
    """(alpha ^ alpha)_i = eps_ijk alpha_j alpha_k; Sigma = (1/2i) alpha ^ alpha."""
    out = []
    for i in range(3):
        acc = np.zeros((4, 4), dtype=complex)
        for (a, b, c), s in EPSILON.items():
            if a == i:
                acc = acc + s * mats.alpha[b] @ mats.alpha[c]
        out.append(acc)
    return out


def verify_clifford_relations(mats: SpinorMatrixSet, tol: float) -> AlgebraReport:
    """Residuals of {a_i,a_j}=2 delta_ij, {a_i,beta}=0, beta^2=1, Sigma=(1/2i) a^a."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = AlgebraReport(tol=tol)
    I4 = np.eye(4)
    for i in range(3):
        for j in range(3):
            target = 2.0 * I4 if i == j else 0.0 * I4
            r = np.abs(anticommutator(mats.alpha[i], mats.alpha[j]) - target).max()
            rep.residuals[f"{{alpha_{i},alpha_{j}}}"] = r
    for i in range(3):
        rep.residuals[f"{{alpha_{i},beta}}"] = np.abs(
            anticommutator(mats.alpha[i], mats.beta)).max()
    rep.residuals["beta^2-1"] = np.abs(mats.beta @ mats.beta - I4).max()
    wedge = alpha_wedge_alpha(mats)
    for i in range(3):
        rep.residuals[f"sigma_{i}-wedge"] = np.abs(
            mats.sigma[i] - wedge[i] / (2j)).max()
        rep.residuals[f"sigma_{i}^2-1"] = np.abs(
            mats.sigma[i] @ mats.sigma[i] - I4).max()
    for mu in range(4):
        rep.residuals[f"{{gamma5,gamma^{mu}}}"] = np.abs(
            anticommutator(mats.gamma5, mats.gamma[mu])).max()
    return rep


def su2_commutator_report(mats: SpinorMatrixSet, tol: float) -> AlgebraReport:
    """[Sigma_i, Sigma_j] = 2i eps_ijk Sigma_k."""
    rep = AlgebraReport(tol=tol)
    for i in range(3):
        for j in range(3):
            target = np.zeros((4, 4), dtype=complex)
            for k in range(3):
                target += 2j * EPSILON.get((i, j, k), 0.0) * mats.sigma[k]
            rep.residuals[f"[sigma_{i},sigma_{j}]"] = np.abs(
                commutator(mats.sigma[i], mats.sigma[j]) - target).max()
    return rep


def apply_antilinear(matrix: np.ndarray, operand: np.ndarray) -> np.ndarray:
    """Apply an antilinear operator (matrix, K): conjugate first, then multiply."""
    return matrix @ np.conj(operand)


def conjugate_by_antilinear(matrix: np.ndarray, op: np.ndarray) -> np.ndarray:
    """(M K) O (M K)^-1 = M conj(O) M^-1 for an antilinear M*K."""
    return matrix @ np.conj(op) @ np.linalg.inv(matrix)


def verify_pt_conjugation(mats: SpinorMatrixSet, tol: float) -> AlgebraReport:
    """Check P gamma^0 P^-1 = gamma^0, P gamma^i P^-1 = -gamma^i,
    T gamma^0 T^-1 = gamma^0 and T alpha T^-1 = -alpha with antilinear T."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = AlgebraReport(tol=tol)
    P = mats.parity_spinor
    Pinv = np.linalg.inv(P)
    rep.residuals["P g0 P^-1 - g0"] = np.abs(P @ mats.gamma[0] @ Pinv - mats.gamma[0]).max()
    for i in (1, 2, 3):
        rep.residuals[f"P g{i} P^-1 + g{i}"] = np.abs(
            P @ mats.gamma[i] @ Pinv + mats.gamma[i]).max()
    T = mats.timerev_spinor
    rep.residuals["T g0 T^-1 - g0"] = np.abs(
        conjugate_by_antilinear(T, mats.gamma[0]) - mats.gamma[0]).max()
    for i in range(3):
        rep.residuals[f"T a{i} T^-1 + a{i}"] = np.abs(
            conjugate_by_antilinear(T, mats.alpha[i]) + mats.alpha[i]).max()
    return rep


def pt_square_sign(mats: SpinorMatrixSet) -> complex:
    """Global sign s with (PT)^2 = s * identity at the spinor level.

    PT psi = (P @ T) conj(psi) up to the grid reflection, so
    (PT)^2 = U conj(U) with U the combined spinor matrix.
    """
    U = mats.parity_spinor @ mats.timerev_spinor
    sq = U @ np.conj(U)
    s = sq[0, 0]
    if np.abs(sq - s * np.eye(4)).max() > 1e-13:
        raise RuntimeError("(PT)^2 is not proportional to the identity")
    return complex(s)
