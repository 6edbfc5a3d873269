"""Shared magnetization time-series container, CSV export, comparison metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np


@dataclass
class MagnetizationTrajectory:
    times: np.ndarray                 # (nt,)
    M: np.ndarray                     # (nt, 3) real part
    M_imag: Optional[np.ndarray] = None   # (nt, 3) imaginary diagnostics
    norms: Optional[np.ndarray] = None    # (nt,) |M| or norm diagnostics
    extra: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.M = np.asarray(self.M, dtype=float)
        if self.times.ndim != 1 or self.M.shape != (len(self.times), 3):
            raise ValueError("inconsistent trajectory shapes")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.norms is None:
            self.norms = np.linalg.norm(self.M, axis=1)

    def write_csv(self, path, quantum_schema: bool = False) -> None:
        if quantum_schema:
            header = ("t,Re Mx,Re My,Re Mz,Im Mx,Im My,Im Mz,"
                      "pt_norm_re,pt_norm_im,conv_norm")
            mi = self.M_imag if self.M_imag is not None else np.zeros_like(self.M)
            ptre = self.extra.get("pt_norm_re", np.zeros_like(self.times))
            ptim = self.extra.get("pt_norm_im", np.zeros_like(self.times))
            conv = self.extra.get("conv_norm", np.zeros_like(self.times))
            cols = np.column_stack([self.times, self.M, mi, ptre, ptim, conv])
        else:
            header = "t,Mx,My,Mz,|M|"
            cols = np.column_stack([self.times, self.M, self.norms])
        np.savetxt(path, cols, delimiter=",", header=header, comments="",
                   fmt="%.17g")


@dataclass
class ComparisonMetrics:
    max_pointwise_deviation: float
    freq_zero_crossing: Dict[str, float]
    freq_spectral: Dict[str, float]
    damping_rate: Dict[str, float]
    norm_drift: Dict[str, float]

    def as_flat_dict(self) -> Dict[str, float]:
        out = {"max_pointwise_deviation": self.max_pointwise_deviation}
        for tag, d in (("freq_zc", self.freq_zero_crossing),
                       ("freq_fft", self.freq_spectral),
                       ("damping", self.damping_rate),
                       ("norm_drift", self.norm_drift)):
            for k, v in d.items():
                out[f"{tag}_{k}"] = v
        return out


def zero_crossing_frequency(times: np.ndarray, signal: np.ndarray) -> float:
    """Angular frequency from linearly-interpolated zero crossings."""
    s = signal - signal.mean()
    idx = np.where(np.sign(s[:-1]) * np.sign(s[1:]) < 0)[0]
    if len(idx) < 2:
        return 0.0
    crossings = []
    for j in idx:
        t0, t1 = times[j], times[j + 1]
        y0, y1 = s[j], s[j + 1]
        crossings.append(t0 - y0 * (t1 - t0) / (y1 - y0))
    crossings = np.asarray(crossings)
    half_periods = np.diff(crossings)
    return float(np.pi / half_periods.mean())


def spectral_peak_frequency(times: np.ndarray, signal: np.ndarray) -> float:
    """Angular frequency of the dominant FFT peak, quadratically refined."""
    s = signal - signal.mean()
    n = len(s)
    dt = times[1] - times[0]
    spec = np.abs(np.fft.rfft(s * np.hanning(n)))
    freqs = np.fft.rfftfreq(n, d=dt)
    j = int(np.argmax(spec[1:]) + 1)
    if 1 <= j < len(spec) - 1:
        y0, y1, y2 = spec[j - 1], spec[j], spec[j + 1]
        denom = (y0 - 2 * y1 + y2)
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    return float(2.0 * np.pi * (freqs[j] + shift * (freqs[1] - freqs[0])))


def phase_slope_frequency(times: np.ndarray, mx: np.ndarray,
                          my: np.ndarray) -> float:
    """Angular frequency from the unwrapped phase of a planar rotation;
    robust for runs shorter than a precession period."""
    phase = np.unwrap(np.arctan2(my, mx))
    return float(abs(np.polyfit(times, phase, 1)[0]))


def exponential_decay_rate(times: np.ndarray, magnitude: np.ndarray) -> float:
    """Least-squares rate lambda of |y| ~ exp(-lambda t); 0 if y hits zero."""
    mag = np.abs(magnitude)
    if np.any(mag <= 0):
        return 0.0
    slope = np.polyfit(times, np.log(mag), 1)[0]
    return float(-slope)


def _resample(traj: MagnetizationTrajectory, times: np.ndarray) -> np.ndarray:
    out = np.empty((len(times), 3))
    for i in range(3):
        out[:, i] = np.interp(times, traj.times, traj.M[:, i])
    return out


def compare_trajectories(a: MagnetizationTrajectory,
                         b: MagnetizationTrajectory) -> ComparisonMetrics:
    t0 = max(a.times[0], b.times[0])
    t1 = min(a.times[-1], b.times[-1])
    if t1 <= t0:
        raise ValueError("disjoint time ranges")
    n = min(len(a.times), len(b.times))
    common = np.linspace(t0, t1, n)
    Ma = _resample(a, common)
    Mb = _resample(b, common)
    dev = float(np.max(np.linalg.norm(Ma - Mb, axis=1)))

    def freq_pair(M):
        # transverse component with largest variance carries the precession
        j = int(np.argmax(M.var(axis=0)))
        return (zero_crossing_frequency(common, M[:, j]),
                spectral_peak_frequency(common, M[:, j]))

    fa_zc, fa_sp = freq_pair(Ma)
    fb_zc, fb_sp = freq_pair(Mb)

    def damping(M):
        trans = np.linalg.norm(M - M.mean(axis=0), axis=1)
        return exponential_decay_rate(common, np.maximum(trans, 1e-300))

    def drift(traj):
        return float(np.abs(traj.norms - traj.norms[0]).max())

    return ComparisonMetrics(
        max_pointwise_deviation=dev,
        freq_zero_crossing={"a": fa_zc, "b": fb_zc},
        freq_spectral={"a": fa_sp, "b": fb_sp},
        damping_rate={"a": damping(Ma), "b": damping(Mb)},
        norm_drift={"a": drift(a), "b": drift(b)},
    )
