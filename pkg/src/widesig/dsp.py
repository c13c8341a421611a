"""Core numerics: complex buffers, chunked DFT, filter design, resampling, AWGN.

All frequencies inside the package are normalized cycles/sample in
[-0.5, 0.5); a sample rate in Hz is carried as metadata and only matters
at the SigMF boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import EmptyInputError, ParameterError

RESAMPLE_RATIO_MIN = 1.0 / 64.0
RESAMPLE_RATIO_MAX = 64.0

# Polyphase resampler geometry: kernel spans 32 taps at the slower of the
# two rates, tabulated at 128 fractional phases with linear interpolation.
_KERNEL_HALF_SPAN = 16
_PHASES = 128
_KAISER_BETA = 7.857  # ~80 dB design attenuation


@dataclass(frozen=True)
class ComplexBuffer:
    """Contiguous complex baseband samples plus a sample-rate tag.

    The tag is metadata only; internal math never consults it.
    """

    samples: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise ParameterError("samples must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr.view(np.float64))):
            raise ParameterError("samples must be finite")
        if not (self.sample_rate > 0):
            raise ParameterError("sample_rate must be positive")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class FilterTaps:
    """Real FIR coefficients with their group delay in samples."""

    taps: np.ndarray
    delay: int

    def __post_init__(self):
        arr = np.asarray(self.taps, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ParameterError("taps must be finite")
        if self.delay < 0:
            raise ParameterError("delay must be non-negative")
        object.__setattr__(self, "taps", arr)


@dataclass(frozen=True)
class Rng:
    """Seedable, splittable PRNG handle.

    Identical (seed, algorithm) produces identical draw sequences within this
    implementation. ``child`` derives statistically independent streams from a
    spawn key, so consumers can hand out per-burst/per-record seeds that do
    not depend on draw order.
    """

    seed: int
    algorithm: str = "pcg64"

    _ALGORITHMS = ("pcg64", "philox")

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must fit in 64 bits")
        if self.algorithm not in self._ALGORITHMS:
            raise ParameterError(f"unknown rng algorithm: {self.algorithm!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed)
        bitgen = np.random.PCG64(ss) if self.algorithm == "pcg64" else np.random.Philox(ss)
        return np.random.Generator(bitgen)

    def child(self, *key: int) -> "Rng":
        """Derive a child stream from an integer spawn key."""
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key))
        child_seed = int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])
        return Rng(child_seed, self.algorithm)


def dft(buf: ComplexBuffer, size: int) -> np.ndarray:
    """Non-overlapping chunked DFT, fftshifted so bin 0 is normalized -0.5.

    Returns an array of shape (frames, size) covering floor(len/size) chunks.
    """
    if size < 2:
        raise ParameterError("size must be >= 2")
    n_frames = len(buf) // size
    if n_frames == 0:
        raise EmptyInputError(f"buffer of {len(buf)} samples is shorter than one {size}-sample chunk")
    chunks = buf.samples[: n_frames * size].reshape(n_frames, size)
    return np.fft.fftshift(np.fft.fft(chunks, axis=1), axes=1)


def _rrc_impulse(t: np.ndarray, beta: float) -> np.ndarray:
    # t in symbol periods; removable singularities at t=0 and |t|=1/(4 beta)
    # are evaluated from the analytic limits so beta=0 cannot produce NaN.
    h = np.empty_like(t)
    if beta == 0.0:
        return np.sinc(t)
    near_zero = np.isclose(t, 0.0)
    singular = np.isclose(np.abs(4.0 * beta * t), 1.0)
    regular = ~(near_zero | singular)
    tr = t[regular]
    num = np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta))
    den = np.pi * tr * (1 - (4 * beta * tr) ** 2)
    h[regular] = num / den
    h[near_zero] = 1.0 - beta + 4.0 * beta / np.pi
    if np.any(singular):
        h[singular] = (beta / np.sqrt(2.0)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
        )
    return h


def design_rrc(beta: float, sps: int, span: int) -> FilterTaps:
    """Root-raised-cosine pulse shaping filter, odd length, unit energy."""
    if not 0.0 <= beta <= 1.0:
        raise ParameterError("beta must be in [0, 1]")
    if sps < 1:
        raise ParameterError("sps must be >= 1")
    if span < 4:
        raise ParameterError("span must be >= 4 symbols")
    half = (span * sps) // 2
    t = np.arange(-half, half + 1, dtype=np.float64) / sps
    taps = _rrc_impulse(t, beta)
    taps /= np.sqrt(np.sum(taps**2))
    return FilterTaps(taps=taps, delay=half)


def design_gaussian(bt: float, sps: int, span: int) -> FilterTaps:
    """Gaussian smoothing pulse (unit DC gain) for GMSK-style shaping."""
    if not 0.0 < bt <= 1.0:
        raise ParameterError("bt must be in (0, 1]")
    if sps < 1 or span < 1:
        raise ParameterError("sps and span must be >= 1")
    half = (span * sps) // 2
    t = np.arange(-half, half + 1, dtype=np.float64) / sps
    # std in symbol periods for a Gaussian with 3 dB bandwidth bt * symbol rate
    sigma = np.sqrt(np.log(2.0)) / (2.0 * np.pi * bt)
    taps = np.exp(-0.5 * (t / sigma) ** 2)
    taps /= np.sum(taps)
    return FilterTaps(taps=taps, delay=half)


@lru_cache(maxsize=1)
def _resample_prototype() -> np.ndarray:
    # Kaiser-windowed sinc, cutoff 0.5 cycles per kernel unit, sampled on the
    # phase grid; one trailing guard sample covers the interpolation upper edge.
    n = 2 * _KERNEL_HALF_SPAN * _PHASES + 1
    tau = np.arange(n, dtype=np.float64) / _PHASES - _KERNEL_HALF_SPAN
    window = np.kaiser(n, _KAISER_BETA)
    proto = np.sinc(tau) * window
    return np.concatenate([proto, [0.0]])


def resample(buf: ComplexBuffer, ratio: float) -> ComplexBuffer:
    """Arbitrary-ratio polyphase windowed-sinc resampling.

    Output length is round(len * ratio); passband content is preserved and
    images/aliases are suppressed by the Kaiser prototype. Each output row of
    taps is normalized to unit DC gain, which also makes ratio=1 an exact
    identity away from the edge transient.
    """
    if not RESAMPLE_RATIO_MIN <= ratio <= RESAMPLE_RATIO_MAX:
        raise ParameterError(f"ratio {ratio} outside [{RESAMPLE_RATIO_MIN}, {RESAMPLE_RATIO_MAX}]")
    n_in = len(buf)
    n_out = int(round(n_in * ratio))
    if n_in == 0 or n_out == 0:
        return ComplexBuffer(np.zeros(n_out, dtype=np.complex128), buf.sample_rate)

    # Kernel unit = one sample of the slower stream, so downsampling widens
    # the kernel (anti-aliasing) while upsampling keeps it at 32 input taps.
    unit = max(1.0, 1.0 / ratio)
    half_span = _KERNEL_HALF_SPAN * unit
    k_width = int(np.ceil(2 * half_span)) + 1
    proto = _resample_prototype()
    pad = k_width + 2
    x = np.concatenate([np.zeros(pad, np.complex128), buf.samples, np.zeros(pad, np.complex128)])

    out = np.empty(n_out, dtype=np.complex128)
    chunk = max(1, (1 << 21) // k_width)
    offsets = np.arange(k_width, dtype=np.float64)
    for lo in range(0, n_out, chunk):
        hi = min(lo + chunk, n_out)
        t = np.arange(lo, hi, dtype=np.float64) / ratio
        first = np.ceil(t - half_span)
        tau = (first[:, None] + offsets[None, :] - t[:, None]) / unit
        pos = (tau + _KERNEL_HALF_SPAN) * _PHASES
        pos = np.clip(pos, 0.0, 2 * _KERNEL_HALF_SPAN * _PHASES)
        idx = pos.astype(np.int64)
        frac = pos - idx
        taps = proto[idx] * (1.0 - frac) + proto[idx + 1] * frac
        taps /= np.sum(taps, axis=1, keepdims=True)
        rows = first.astype(np.int64)[:, None] + offsets.astype(np.int64)[None, :] + pad
        out[lo:hi] = np.einsum("ij,ij->i", taps, x[rows])
    return ComplexBuffer(out, buf.sample_rate)


def add_awgn(buf: ComplexBuffer, sigma: float, rng: Rng) -> ComplexBuffer:
    """Add complex white Gaussian noise with total per-sample variance sigma^2."""
    if not np.isfinite(sigma) or sigma < 0:
        raise ParameterError("sigma must be finite and non-negative")
    if sigma == 0.0:
        return ComplexBuffer(buf.samples.copy(), buf.sample_rate)
    gen = rng.generator()
    n = len(buf)
    scale = sigma / np.sqrt(2.0)
    noise = gen.standard_normal(n) * scale + 1j * gen.standard_normal(n) * scale
    return ComplexBuffer(buf.samples + noise, buf.sample_rate)
