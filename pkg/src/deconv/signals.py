"""Uniformly sampled signals, discrete kernels, convolution, spectra.

Discrete convolution follows the zero-pad-and-crop policy: the signal is
extended with zeros by the kernel half-width on both sides, linearly
convolved, and cropped back to the original window, so the output carries
the same (t0, dt, N) as the input.  Samples within a half-width of either
boundary are edge-distorted by construction; error metrics exclude them via
an interior mask.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fft as _fft
from .errors import InputError, ParameterError, ResolutionError
from .kernels import Kernel

DIRECT_CONV_MAX_TAPS = 64  # direct convolution below, FFT at or above
MIN_TAPS_PER_LOBE = 8


@dataclass(frozen=True)
class GridSignal:
    """Real samples on a uniform grid: values[i] at t0 + i * dt."""

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise InputError("a signal needs a 1-D value array with at least 2 samples")
        if not (self.dt > 0 and math.isfinite(self.dt) and math.isfinite(self.t0)):
            raise InputError(f"bad grid metadata: t0={self.t0}, dt={self.dt}")
        if not np.all(np.isfinite(vals)):
            raise InputError("signal values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def same_grid(self, other: "GridSignal") -> bool:
        return self.t0 == other.t0 and self.dt == other.dt and self.n == other.n

    def require_same_grid(self, other: "GridSignal") -> None:
        if not self.same_grid(other):
            raise ParameterError(
                "signals are only combinable on identical grids: "
                f"({self.t0}, {self.dt}, {self.n}) vs ({other.t0}, {other.dt}, {other.n})"
            )

    def with_values(self, values: np.ndarray) -> "GridSignal":
        return GridSignal(self.t0, self.dt, values)

    def interior_mask(self, margin: float) -> np.ndarray:
        """Boolean mask excluding a fraction ``margin`` of samples per side."""
        if not (0.0 <= margin < 0.5):
            raise ParameterError(f"margin must lie in [0, 0.5), got {margin}")
        k = int(round(margin * self.n))
        mask = np.zeros(self.n, dtype=bool)
        mask[k : self.n - k] = True
        return mask

    def __add__(self, other: "GridSignal") -> "GridSignal":
        self.require_same_grid(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridSignal") -> "GridSignal":
        self.require_same_grid(other)
        return self.with_values(self.values - other.values)


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins, DC first; bin k sits at physical frequency k * df
    (equivalently (k - N) * df for the upper half)."""

    df: float
    bins: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bins, dtype=np.complex128)
        if b.ndim != 1 or b.size < 2:
            raise InputError("a spectrum needs a 1-D bin array with at least 2 bins")
        if not (self.df > 0 and math.isfinite(self.df)):
            raise InputError(f"bad frequency spacing {self.df}")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "bins", b)

    @property
    def n(self) -> int:
        return self.bins.size

    @property
    def frequencies(self) -> np.ndarray:
        """Signed physical frequencies per bin (DC first, standard order)."""
        n = self.n
        k = np.arange(n)
        k = np.where(k <= n // 2, k, k - n)
        return k * self.df


@dataclass(frozen=True)
class KernelTaps:
    """Odd-length symmetric discrete kernel on spacing dt (center index = half)."""

    weights: np.ndarray
    dt: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size % 2 != 1:
            raise InputError("taps must be a 1-D odd-length array")
        if not np.all(np.isfinite(w)):
            raise InputError("taps must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def half_width(self) -> int:
        return (self.weights.size - 1) // 2


def sample_function(
    f: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, n: int
) -> GridSignal:
    """Sample f on n uniformly spaced points spanning [t0, t1]."""
    if not t1 > t0:
        raise ParameterError(f"need t1 > t0, got [{t0}, {t1}]")
    if n < 2:
        raise ParameterError(f"need at least 2 samples, got {n}")
    dt = (t1 - t0) / (n - 1)
    ts = t0 + dt * np.arange(n)
    vals = np.asarray(f(ts), dtype=float)
    if vals.shape != ts.shape:
        vals = np.broadcast_to(vals, ts.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise InputError("sampled function produced non-finite values")
    return GridSignal(t0, dt, vals)


def discretize_kernel(kernel: Kernel, epsilon: float, dt: float) -> KernelTaps:
    """Sample phi_eps on a symmetric grid and renormalise to unit sum.

    The taps cover the effective support (odd count), are scaled by dt so the
    sum approximates the unit integral, then renormalised so the discrete
    kernel conserves mass exactly (bias versus pure sampling is O(dt^2)).
    Requires at least MIN_TAPS_PER_LOBE samples across the kernel's central
    lobe.
    """
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive, got {dt}")
    lobe = epsilon * kernel.lobe_width
    if lobe / dt < MIN_TAPS_PER_LOBE:
        raise ResolutionError(
            f"dt={dt} under-resolves the kernel: {lobe / dt:.2f} taps across the "
            f"central lobe (width {lobe:.4g}), need >= {MIN_TAPS_PER_LOBE}"
        )
    radius = epsilon * kernel.support_radius
    if not math.isfinite(radius):
        raise ParameterError("kernel has no finite effective support to discretise")
    half = int(math.ceil(radius / dt))
    offsets = dt * np.arange(-half, half + 1)
    w = kernel.eval(epsilon, offsets) * dt
    total = float(w.sum())
    if total <= 0:
        raise InputError("discretised kernel has non-positive mass")
    return KernelTaps(w / total, dt)


class TapsConvolver:
    """Reusable zero-pad-and-crop convolution for one (taps, length) pair.

    Precomputes the padded tap transform so that repeated applications (the
    deconvolution iteration) pay one forward and one inverse transform each.
    """

    def __init__(self, taps: KernelTaps, n: int, method: str = "auto"):
        if n < 2:
            raise ParameterError("signal length must be at least 2")
        self.taps = taps
        self.n = int(n)
        w = taps.weights
        if method == "auto":
            method = "direct" if w.size < DIRECT_CONV_MAX_TAPS else "fft"
        if method not in ("direct", "fft"):
            raise ParameterError(f"unknown convolution method {method!r}")
        self.method = method
        if method == "fft":
            self._m = _fft.next_pow2(self.n + w.size - 1)
            self._tap_spectrum = _fft.fft(np.concatenate([w, np.zeros(self._m - w.size)]))

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Convolve a raw value array (no finiteness validation)."""
        w = self.taps.weights
        h = self.taps.half_width
        if self.method == "direct":
            full = np.convolve(values, w)
        else:
            fa = _fft.fft(np.concatenate([values, np.zeros(self._m - self.n)]))
            full = _fft.ifft(fa * self._tap_spectrum).real[: self.n + w.size - 1]
        return full[h : h + self.n]


def convolve_signal(s: GridSignal, taps: KernelTaps, method: str = "auto") -> GridSignal:
    """Zero-pad, linearly convolve with the taps, crop back to s's window."""
    if taps.dt != s.dt:
        raise ParameterError(f"tap spacing {taps.dt} does not match signal dt {s.dt}")
    return s.with_values(TapsConvolver(taps, s.n, method=method).apply(s.values))


def dft(s: GridSignal) -> Spectrum:
    """Forward DFT (unnormalised); df = 1 / (N dt)."""
    return Spectrum(df=1.0 / (s.n * s.dt), bins=_fft.fft(s.values))


def idft(sp: Spectrum, t0: float) -> GridSignal:
    """Inverse DFT with 1/N; returns the real part on the grid starting at t0."""
    vals = _fft.ifft(sp.bins)
    dt = 1.0 / (sp.n * sp.df)
    return GridSignal(t0, dt, vals.real)


# -- CSV interfaces ----------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def signal_to_csv(s: GridSignal, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, v in zip(s.times, s.values):
            writer.writerow([_fmt(t), _fmt(v)])


def signal_from_csv(path: str) -> GridSignal:
    ts, vs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["t", "value"]:
            raise InputError(f"{path}: expected header 't,value'")
        for row in reader:
            if not row:
                continue
            ts.append(float(row[0]))
            vs.append(float(row[1]))
    if len(ts) < 2:
        raise InputError(f"{path}: need at least 2 samples")
    t = np.asarray(ts)
    dt = float(t[1] - t[0])
    if dt <= 0 or np.abs(np.diff(t) - dt).max() > 1e-9 * max(abs(dt), 1.0):
        raise InputError(f"{path}: time column is not uniformly spaced")
    return GridSignal(float(t[0]), dt, np.asarray(vs))


def spectrum_to_csv(sp: Spectrum, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq", "re", "im", "abs"])
        for f, b in zip(sp.frequencies, sp.bins):
            writer.writerow([_fmt(f), _fmt(b.real), _fmt(b.imag), _fmt(abs(b))])


def interior_rel_l2(candidate: GridSignal, reference: GridSignal, margin: float) -> float:
    """Relative L2 distance on the interior mask."""
    candidate.require_same_grid(reference)
    mask = reference.interior_mask(margin)
    num = float(np.linalg.norm((candidate.values - reference.values)[mask]))
    den = float(np.linalg.norm(reference.values[mask]))
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den
