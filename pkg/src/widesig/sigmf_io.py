"""SigMF record I/O: interleaved complex int16 data plus JSON metadata.

Records use the baseband convention: the capture center is 0 Hz, so
annotation edges are normalized frequency times the sample rate. A per-record
scale factor is stored in an extension field so float samples reconstruct
exactly up to quantization, and unknown metadata fields are preserved
verbatim on rewrite.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dsp import ComplexBuffer
from .errors import DatatypeError, MetadataError, TruncatedDataError
from .grid import TimeFreqBox
from .scene import Scene, burst_to_box

DATATYPE = "ci16_le"
SIGMF_VERSION = "1.0.0"
DEFAULT_SAMPLE_RATE_HZ = 100e6
QUANT_PEAK = 32000.0

EXT_SCALE = "widesig:scale_factor"
EXT_SEED = "widesig:master_seed"
EXT_PROFILE = "widesig:profile"
EXT_BETA = "widesig:rrc_beta"
EXT_AMPLITUDE = "widesig:amplitude"


@dataclass(frozen=True)
class SigmfRecord:
    """Paths plus the full metadata dict of one record."""

    data_path: Path
    meta_path: Path
    meta: dict


@dataclass(frozen=True)
class LoadedRecord:
    """Decoded record: float samples and truth boxes in normalized units."""

    samples: ComplexBuffer
    boxes: list[tuple[TimeFreqBox, str]]
    scale: float
    meta: dict

    @property
    def sample_rate(self) -> float:
        return float(self.meta["global"]["core:sample_rate"])


def record_paths(stem) -> tuple[Path, Path]:
    stem = Path(stem)
    return stem.with_suffix(".sigmf-data"), stem.with_suffix(".sigmf-meta")


def quantize(samples: np.ndarray, scale: float) -> np.ndarray:
    """Round half away from zero to interleaved little-endian int16."""
    scaled = samples * scale
    i = np.copysign(np.floor(np.abs(scaled.real) + 0.5), scaled.real)
    q = np.copysign(np.floor(np.abs(scaled.imag) + 0.5), scaled.imag)
    out = np.empty(2 * len(samples), dtype="<i2")
    out[0::2] = np.clip(i, -32767, 32767)
    out[1::2] = np.clip(q, -32767, 32767)
    return out


def write_record(
    scene: Scene,
    stem,
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ,
    description: str = "",
    extra_global: dict | None = None,
) -> SigmfRecord:
    """Write a scene as a <stem>.sigmf-data / <stem>.sigmf-meta pair."""
    data_path, meta_path = record_paths(stem)
    samples = scene.samples.samples
    peak = float(np.max(np.abs(samples.view(np.float64)))) if len(samples) else 0.0
    scale = QUANT_PEAK / peak if peak > 0 else 1.0
    data_path.write_bytes(quantize(samples, scale).tobytes())

    annotations = []
    for burst in sorted(scene.bursts, key=lambda b: (b.start_sample, b.center_freq)):
        box = burst_to_box(burst)
        ann = {
            "core:sample_start": int(box.t_start),
            "core:sample_count": int(burst.duration_samples),
            "core:freq_lower_edge": box.f_low * sample_rate_hz,
            "core:freq_upper_edge": box.f_high * sample_rate_hz,
            "core:label": burst.label.value,
            EXT_AMPLITUDE: burst.amplitude,
        }
        if burst.rrc_beta is not None:
            ann[EXT_BETA] = burst.rrc_beta
        annotations.append(ann)

    meta = {
        "global": {
            "core:datatype": DATATYPE,
            "core:version": SIGMF_VERSION,
            "core:sample_rate": float(sample_rate_hz),
            "core:description": description or f"widesig scene ({scene.profile_name or 'ad hoc'})",
            "core:extensions": [{"name": "widesig", "version": "0.1.0", "optional": True}],
            EXT_SCALE: scale,
            EXT_SEED: int(scene.master_seed),
            EXT_PROFILE: scene.profile_name,
            **(extra_global or {}),
        },
        "captures": [{"core:sample_start": 0}],
        "annotations": annotations,
    }
    write_meta(meta, meta_path)
    return SigmfRecord(data_path=data_path, meta_path=meta_path, meta=meta)


def write_meta(meta: dict, meta_path) -> None:
    Path(meta_path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def read_record(stem) -> LoadedRecord:
    """Read a record pair; returns float samples and normalized truth boxes."""
    data_path, meta_path = record_paths(stem)
    try:
        meta = json.loads(Path(meta_path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise MetadataError(f"missing metadata file: {meta_path}") from None
    except json.JSONDecodeError as exc:
        raise MetadataError(f"malformed metadata in {meta_path}: {exc}") from None
    if "global" not in meta:
        raise MetadataError(f"{meta_path} has no global object")

    datatype = meta["global"].get("core:datatype")
    if datatype != DATATYPE:
        raise DatatypeError(f"unsupported datatype {datatype!r}; expected {DATATYPE!r}")
    sample_rate = float(meta["global"].get("core:sample_rate", DEFAULT_SAMPLE_RATE_HZ))
    scale = float(meta["global"].get(EXT_SCALE, 1.0))

    raw = Path(data_path).read_bytes()
    if len(raw) % 4 != 0:
        offset = len(raw) - (len(raw) % 4)
        raise TruncatedDataError(f"data file length {len(raw)} is not a multiple of 4 bytes; trailing bytes start at offset {offset}")
    ints = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    samples = (ints[0::2] + 1j * ints[1::2]) / scale
    total = len(samples)

    boxes: list[tuple[TimeFreqBox, str]] = []
    half_bw = sample_rate / 2.0
    for ann in meta.get("annotations", []):
        start = int(ann["core:sample_start"])
        count = int(ann["core:sample_count"])
        f_lo = float(ann["core:freq_lower_edge"])
        f_hi = float(ann["core:freq_upper_edge"])
        if f_lo < -half_bw or f_hi > half_bw:
            warnings.warn(
                f"annotation at sample {start} has edges outside +-sample_rate/2; clamping",
                stacklevel=2,
            )
            f_lo = max(f_lo, -half_bw)
            f_hi = min(f_hi, half_bw)
        if start + count > total:
            warnings.warn(f"annotation at sample {start} extends past the data; clamping", stacklevel=2)
            count = max(1, total - start)
        box = TimeFreqBox(
            t_start=start,
            t_end=start + count,
            f_low=f_lo / sample_rate,
            f_high=f_hi / sample_rate,
        )
        boxes.append((box, str(ann.get("core:label", ""))))

    return LoadedRecord(samples=ComplexBuffer(samples, sample_rate), boxes=boxes, scale=scale, meta=meta)
