"""Analytic electromagnetic field families and their grid sampling.

Each FieldConfig provides analytic accessors A, Phi, E, B and their time
derivatives as functions of (x, t), with x-only spatial dependence and all
vector quantities kept as full 3-vectors.

Grid sampling applies a smooth even window to the gauge profiles so that the
linear-in-x gauges become periodic, and *derives* the derivative fields
(B, dtB, grad Phi) spectrally from the sampled gauge.  That keeps the
discrete identities E = -grad Phi - dtA and B = curl A exact on the grid.

Fixed gauges:
  zero        A = 0, Phi = 0
  uniform_B   A = (0, B0 x, 0)                       B along z
  uniform_E   A = (-E0 t, 0, 0), Phi = 0             E along x (time gauge)
  harmonic_B  A = (0, B0 x cos(omega t), 0)
  custom_1d   user-supplied callables

uniform_E uses the time gauge rather than Phi = -E0 x: the scalar-potential
gauge is parity-odd, which breaks the pseudo-PT relation that the
verification suite checks, while the time gauge satisfies it at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .grids import Grid, HBAR

FIELD_KINDS = ("zero", "uniform_B", "uniform_E", "harmonic_B", "custom_1d")


@dataclass(frozen=True)
class PhysicalParams:
    """Reduced units: hbar = 1, m and c free, e signed (electron: e < 0)."""

    m: float = 32.0
    c: float = 4.0
    e: float = -1.0

    def __post_init__(self):
        if self.m <= 0 or self.c <= 0:
            raise ValueError("m and c must be positive")
        if self.e == 0:
            raise ValueError("e must be nonzero")

    @property
    def hbar(self) -> float:
        return HBAR

    @property
    def mu_bohr(self) -> float:
        return self.e * HBAR / (2.0 * self.m)

    @property
    def compton_wavelength(self) -> float:
        return 2.0 * np.pi * HBAR / (self.m * self.c)


def _zeros3(x):
    x = np.atleast_1d(x)
    return np.zeros((3,) + x.shape)


@dataclass
class FieldConfig:
    """Analytic field family; amplitudes in reduced units."""

    kind: str = "zero"
    B0: float = 0.0
    E0: float = 0.0
    omega: float = 0.0
    # custom_1d hooks: callables (x, t) -> (3, len(x)) resp. (len(x),)
    custom_A: Optional[Callable] = None
    custom_Phi: Optional[Callable] = None
    custom_dtA: Optional[Callable] = None
    custom_dttA: Optional[Callable] = None
    custom_dtPhi: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "custom_1d" and self.custom_A is None and self.custom_Phi is None:
            raise ValueError("custom_1d requires custom_A and/or custom_Phi")

    # ---- analytic gauge ----
    def A(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = _zeros3(x)
        if self.kind == "uniform_B":
            out[1] = self.B0 * x
        elif self.kind == "uniform_E":
            out[0] = -self.E0 * t
        elif self.kind == "harmonic_B":
            out[1] = self.B0 * x * np.cos(self.omega * t)
        elif self.kind == "custom_1d" and self.custom_A is not None:
            out = np.asarray(self.custom_A(x, t), dtype=float)
        return out

    def Phi(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "custom_1d" and self.custom_Phi is not None:
            return np.asarray(self.custom_Phi(x, t), dtype=float)
        return np.zeros_like(x)

    def dtA(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = _zeros3(x)
        if self.kind == "uniform_E":
            out[0] = -self.E0
        elif self.kind == "harmonic_B":
            out[1] = -self.B0 * self.omega * x * np.sin(self.omega * t)
        elif self.kind == "custom_1d":
            if self.custom_dtA is not None:
                out = np.asarray(self.custom_dtA(x, t), dtype=float)
            elif self.custom_A is not None:
                h = 1e-6
                out = (np.asarray(self.custom_A(x, t + h)) -
                       np.asarray(self.custom_A(x, t - h))) / (2 * h)
        return out

    def dttA(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = _zeros3(x)
        if self.kind == "harmonic_B":
            out[1] = -self.B0 * self.omega ** 2 * x * np.cos(self.omega * t)
        elif self.kind == "custom_1d":
            if self.custom_dttA is not None:
                out = np.asarray(self.custom_dttA(x, t), dtype=float)
            elif self.custom_A is not None:
                h = 1e-4
                out = (np.asarray(self.custom_A(x, t + h)) - 2 * np.asarray(self.custom_A(x, t))
                       + np.asarray(self.custom_A(x, t - h))) / h ** 2
        return out

    def dtPhi(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "custom_1d":
            if self.custom_dtPhi is not None:
                return np.asarray(self.custom_dtPhi(x, t), dtype=float)
            if self.custom_Phi is not None:
                h = 1e-6
                return (np.asarray(self.custom_Phi(x, t + h)) -
                        np.asarray(self.custom_Phi(x, t - h))) / (2 * h)
        return np.zeros_like(x)

    # ---- analytic fields (x-only spatial dependence) ----
    def _ddx(self, f, x, t, h=1e-6):
        return (np.asarray(f(x + h, t), dtype=float) - np.asarray(f(x - h, t), dtype=float)) / (2 * h)

    def E(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        grad_phi = _zeros3(x)
        grad_phi[0] = self._ddx(self.Phi, x, t)
        return -grad_phi - self.dtA(x, t)

    def B(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        dA = self._ddx(self.A, x, t)   # (3, n): d/dx of each component
        out = _zeros3(x)
        out[1] = -dA[2]
        out[2] = dA[1]
        return out

    def dtE(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        grad_dtphi = _zeros3(x)
        grad_dtphi[0] = self._ddx(self.dtPhi, x, t)
        return -grad_dtphi - self.dttA(x, t)

    def dtB(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        dA = self._ddx(self.dtA, x, t)
        out = _zeros3(x)
        out[1] = -dA[2]
        out[2] = dA[1]
        return out

    @property
    def static(self) -> bool:
        return self.kind in ("zero", "uniform_B") or (
            self.kind == "harmonic_B" and self.omega == 0.0)

    @property
    def time_even(self) -> bool:
        """Whether the gauge at t=0 is invariant under t -> -t."""
        return self.kind in ("zero", "uniform_B", "harmonic_B")


def smooth_window(grid: Grid, plateau: float = 0.30, zero_at: float = 0.48) -> np.ndarray:
    """Even C^inf bump: exactly 1 on |x| <= plateau*L, 0 beyond zero_at*L."""
    a = plateau * grid.length
    b = zero_at * grid.length
    w = np.ones_like(grid.x)
    s = (np.abs(grid.x) - a) / (b - a)
    rising = (s > 0) & (s < 1)
    t = s[rising]
    w[rising] = np.exp(1.0 - 1.0 / (1.0 - t ** 2))
    w[s >= 1] = 0.0
    return w


@dataclass
class SampledGauge:
    """Windowed gauge samples and spectrally-derived fields on a grid.

    B, dtB and grad(Phi) are derivatives of the sampled (windowed) gauge,
    computed spectrally, so the discrete Maxwell structure is exact.
    """

    A: np.ndarray      # (3, n)
    Phi: np.ndarray    # (n,)
    E: np.ndarray      # (3, n)
    B: np.ndarray      # (3, n)
    dtE: np.ndarray    # (3, n)
    dtB: np.ndarray    # (3, n)


def sample_gauge(field: FieldConfig, grid: Grid, t: float) -> SampledGauge:
    w = smooth_window(grid)
    x = grid.x
    A = field.A(x, t) * w
    Phi = field.Phi(x, t) * w
    dtA = field.dtA(x, t) * w
    dttA = field.dttA(x, t) * w
    dtPhi = field.dtPhi(x, t) * w
    D = grid.spectral_derivative
    grad_phi = np.stack([D(Phi), np.zeros_like(x), np.zeros_like(x)])
    grad_dtphi = np.stack([D(dtPhi), np.zeros_like(x), np.zeros_like(x)])
    E = -grad_phi - dtA
    dtE = -grad_dtphi - dttA
    B = np.stack([np.zeros_like(x), -D(A[2]), D(A[1])])
    dtB = np.stack([np.zeros_like(x), -D(dtA[2]), D(dtA[1])])
    return SampledGauge(A=A, Phi=Phi, E=E, B=B, dtE=dtE, dtB=dtB)
