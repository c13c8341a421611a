"""Normalized log-magnitude spectrogram grid and time-frequency geometry.

The grid is the shared coordinate system for truth boxes, detector masks,
and externally produced masks: frames of ``fft_size`` samples with no
overlap, bins fftshift-ordered so bin 0 is normalized frequency -0.5.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .dsp import ComplexBuffer
from .errors import GeometryMismatchError, ParameterError

LOG_EPS = 1e-12
MASK_MAGIC = b"WBMASK01"


@dataclass(frozen=True)
class TimeFreqBox:
    """Axis-aligned rectangle: samples on the time axis, normalized frequency
    on the other."""

    t_start: float
    t_end: float
    f_low: float
    f_high: float

    def __post_init__(self):
        for name in ("t_start", "t_end", "f_low", "f_high"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.t_start < self.t_end and self.f_low < self.f_high):
            raise ParameterError("box bounds must be ordered with positive area")

    @property
    def area(self) -> float:
        return (self.t_end - self.t_start) * (self.f_high - self.f_low)


@dataclass(frozen=True)
class GridGeometry:
    """Frames x bins layout; hop is pinned to fft_size (no overlap)."""

    fft_size: int = 512
    frames: int = 0

    def __post_init__(self):
        if self.fft_size < 2:
            raise ParameterError("fft_size must be >= 2")
        if self.frames < 0:
            raise ParameterError("frames must be >= 0")

    @property
    def bins(self) -> int:
        return self.fft_size

    @property
    def hop(self) -> int:
        return self.fft_size

    @classmethod
    def for_samples(cls, n_samples: int, fft_size: int = 512) -> "GridGeometry":
        return cls(fft_size=fft_size, frames=n_samples // fft_size)


@dataclass(frozen=True)
class SpectralGrid:
    """Normalized log-magnitude values plus the statistics used to normalize."""

    values: np.ndarray
    geometry: GridGeometry
    norm_mean: float
    norm_std: float

    def __post_init__(self):
        if self.values.shape != (self.geometry.frames, self.geometry.bins):
            raise GeometryMismatchError("grid values do not match geometry")


@dataclass(frozen=True)
class BinaryMask:
    values: np.ndarray
    geometry: GridGeometry

    def __post_init__(self):
        if self.values.dtype != np.bool_:
            object.__setattr__(self, "values", self.values.astype(bool))
        if self.values.shape != (self.geometry.frames, self.geometry.bins):
            raise GeometryMismatchError("mask values do not match geometry")


def power_grid(buf: ComplexBuffer, fft_size: int = 512) -> np.ndarray:
    """Per-cell linear power |DFT|^2, frames x bins, fftshift-ordered.

    Computed in frame chunks so long records never materialize the full
    complex spectrogram.
    """
    n_frames = len(buf) // fft_size
    out = np.empty((n_frames, fft_size), dtype=np.float64)
    chunk = max(1, (1 << 22) // fft_size)
    for lo in range(0, n_frames, chunk):
        hi = min(lo + chunk, n_frames)
        block = buf.samples[lo * fft_size : hi * fft_size].reshape(hi - lo, fft_size)
        spectra = np.fft.fftshift(np.fft.fft(block, axis=1), axes=1)
        out[lo:hi] = np.abs(spectra) ** 2
    return out


def spectrogram(buf: ComplexBuffer, geometry: GridGeometry | None = None, fft_size: int = 512) -> SpectralGrid:
    """Normalized log-magnitude spectrogram: (log|X| - mean) / std per block."""
    if geometry is not None:
        fft_size = geometry.fft_size
    if len(buf) < fft_size:
        raise ParameterError(f"buffer of {len(buf)} samples is shorter than one {fft_size}-sample frame")
    power = power_grid(buf, fft_size)
    logmag = np.log(np.sqrt(power) + LOG_EPS)
    mean = float(np.mean(logmag))
    std = float(np.std(logmag))
    values = (logmag - mean) / (std + LOG_EPS)
    geo = GridGeometry(fft_size=fft_size, frames=power.shape[0])
    if geometry is not None and geometry.frames and geometry.frames != geo.frames:
        raise GeometryMismatchError(f"expected {geometry.frames} frames, buffer yields {geo.frames}")
    return SpectralGrid(values=values, geometry=geo, norm_mean=mean, norm_std=std + LOG_EPS)


def cell_to_box(frame: int, bin_index: int, geometry: GridGeometry) -> TimeFreqBox:
    """Continuous extent of one grid cell."""
    if not (0 <= frame < geometry.frames and 0 <= bin_index < geometry.bins):
        raise ParameterError(f"cell ({frame}, {bin_index}) outside {geometry.frames}x{geometry.bins} grid")
    n = geometry.fft_size
    return TimeFreqBox(
        t_start=frame * n,
        t_end=(frame + 1) * n,
        f_low=-0.5 + bin_index / n,
        f_high=-0.5 + (bin_index + 1) / n,
    )


def rasterize(boxes: list[TimeFreqBox], geometry: GridGeometry) -> BinaryMask:
    """Mask with a cell true iff its center lies inside any box.

    Cell centers use half-open box membership (start <= center < end) so the
    mapping is the exact inverse of ``cell_to_box`` for isolated cells.
    """
    mask = np.zeros((geometry.frames, geometry.bins), dtype=bool)
    n = geometry.fft_size
    t_centers = (np.arange(geometry.frames) + 0.5) * n
    f_centers = -0.5 + (np.arange(geometry.bins) + 0.5) / n
    for box in boxes:
        t_sel = (t_centers >= box.t_start) & (t_centers < box.t_end)
        f_sel = (f_centers >= box.f_low) & (f_centers < box.f_high)
        mask[np.ix_(t_sel, f_sel)] = True
    return BinaryMask(values=mask, geometry=geometry)


def write_mask(mask: BinaryMask, path, provenance: dict | None = None) -> None:
    """Mask interchange file: 16-byte header, bit-packed rows, JSON trailer.

    Header is the magic ``WBMASK01`` followed by frames and bins as 32-bit
    little-endian unsigned. Cells are packed row-major, 8 per byte, most
    significant bit first, final byte zero-padded.
    """
    geo = mask.geometry
    header = MASK_MAGIC + struct.pack("<II", geo.frames, geo.bins)
    packed = np.packbits(mask.values.ravel()).tobytes()
    trailer = {
        "fft_size": geo.fft_size,
        "frames": geo.frames,
        "bins": geo.bins,
    }
    if provenance:
        trailer["provenance"] = provenance
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed)
        fh.write(json.dumps(trailer, sort_keys=True).encode("utf-8"))


def read_mask(path) -> tuple[BinaryMask, dict]:
    """Read a mask interchange file; returns the mask and its JSON trailer."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16 or blob[:8] != MASK_MAGIC:
        raise ParameterError("not a mask interchange file (bad magic)")
    frames, bins = struct.unpack("<II", blob[8:16])
    n_cells = frames * bins
    n_bytes = (n_cells + 7) // 8
    if len(blob) < 16 + n_bytes:
        raise ParameterError("mask file truncated")
    bits = np.unpackbits(np.frombuffer(blob[16 : 16 + n_bytes], dtype=np.uint8))[:n_cells]
    trailer_raw = blob[16 + n_bytes :]
    trailer = json.loads(trailer_raw.decode("utf-8")) if trailer_raw else {}
    fft_size = int(trailer.get("fft_size", bins))
    geometry = GridGeometry(fft_size=fft_size, frames=frames)
    if geometry.bins != bins:
        raise GeometryMismatchError("trailer fft_size disagrees with header bins")
    mask = BinaryMask(values=bits.astype(bool).reshape(frames, bins), geometry=geometry)
    return mask, trailer
