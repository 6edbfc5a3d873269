"""Periodic 1D spectral grid and dense discrete operators.

All operators act on the spinor-tensor-grid space as dense complex
(4n x 4n) matrices, ordered so that a state is a flattened (4, n) array:
spinor operators enter as kron(M4, I_n), grid operators as kron(I_4, M_n).

The unpaired Nyquist mode is dropped from the first-derivative wavenumbers
so that the momentum operator stays Hermitian and reflection-odd exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HBAR = 1.0


@dataclass
class DiscreteOperator:
    matrix: np.ndarray
    hermitian_flag: bool
    label: str = ""

    def __post_init__(self):
        if self.hermitian_flag:
            dev = np.linalg.norm(self.matrix - self.matrix.conj().T)
            if dev > 1e-12 * max(1.0, np.linalg.norm(self.matrix)):
                raise ValueError(
                    f"operator {self.label!r} flagged hermitian but ||M-M+|| = {dev:.2e}")

    @property
    def n_dim(self) -> int:
        return self.matrix.shape[0]


class Grid:
    """Even-n periodic grid centered so x -> -x is an exact index permutation."""

    def __init__(self, n_points: int, length: float):
        if n_points % 2 != 0 or n_points < 8:
            raise ValueError("n_points must be even and >= 8")
        if length <= 0:
            raise ValueError("length must be positive")
        self.n = n_points
        self.length = float(length)
        self.spacing = self.length / self.n
        self.x = (np.arange(self.n) - self.n // 2) * self.spacing
        # index permutation realizing x -> -x (j=0 maps to itself via periodic wrap)
        self.reflection = np.array([(self.n - j) % self.n for j in range(self.n)])
        self.wavenumbers = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        self.k_derivative = self.wavenumbers.copy()
        self.k_derivative[self.n // 2] = 0.0

    def reflection_matrix(self) -> np.ndarray:
        R = np.zeros((self.n, self.n))
        R[np.arange(self.n), self.reflection] = 1.0
        return R

    def spectral_derivative(self, samples: np.ndarray) -> np.ndarray:
        """Derivative of the trigonometric interpolant of real or complex samples."""
        out = np.fft.ifft(1j * self.k_derivative * np.fft.fft(samples))
        if np.isrealobj(samples):
            return np.real(out)
        return out

    def interior_mask(self, fraction: float = 0.5) -> np.ndarray:
        """Boolean mask for the centered interior covering `fraction` of the box."""
        return np.abs(self.x) <= 0.5 * fraction * self.length

    def derivative_matrix(self) -> np.ndarray:
        D = np.zeros((self.n, self.n), dtype=complex)
        for j in range(self.n):
            e = np.zeros(self.n, dtype=complex)
            e[j] = 1.0
            D[:, j] = np.fft.ifft(1j * self.k_derivative * np.fft.fft(e))
        return D


def momentum_operator(grid: Grid) -> DiscreteOperator:
    """Spectral p = -i hbar d/dx on the grid (n x n block, not spinor-expanded)."""
    mat = -1j * HBAR * grid.derivative_matrix()
    return DiscreteOperator(matrix=mat, hermitian_flag=True, label="p_x")


def spinor_grid(op4: np.ndarray, n: int) -> np.ndarray:
    """Embed a 4x4 spinor matrix on the full spinor-grid space."""
    return np.kron(op4, np.eye(n))


def grid_op(mat_n: np.ndarray) -> np.ndarray:
    """Embed an n x n grid operator on the full spinor-grid space."""
    return np.kron(np.eye(4), mat_n)


def multiplication_operator(samples: np.ndarray) -> np.ndarray:
    return np.diag(samples.astype(complex))


def operator_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat, 2))


def interior_projected_norm(mat: np.ndarray, grid: Grid, fraction: float = 0.5) -> float:
    """Operator norm of Pi M Pi with Pi the interior spatial projector."""
    mask = grid.interior_mask(fraction).astype(float)
    pi = np.kron(np.eye(4), np.diag(mask))
    return operator_norm(pi @ mat @ pi)
