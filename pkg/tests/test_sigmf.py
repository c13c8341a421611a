import json

import numpy as np
import pytest

from widesig.dsp import ComplexBuffer, Rng
from widesig.errors import DatatypeError, MetadataError, TruncatedDataError
from widesig.modems import ModulationClass
from widesig.scene import Scene, SignalBurst, assemble_scene
from widesig.sigmf_io import quantize, read_record, record_paths, write_meta, write_record


def demo_scene(n=10**5, seed=77):
    duration = min(1 << 14, n - 1024)
    bandwidth = max(0.08, 520.0 / duration)
    burst = SignalBurst(
        label=ModulationClass.PSK4, center_freq=0.1, bandwidth=bandwidth,
        start_sample=1000, duration_samples=duration, amplitude=0.7,
        burst_seed=3, rrc_beta=0.3,
    )
    return assemble_scene([burst], n, "demo", seed)


def test_int16_byte_layout_fixture():
    # (1.0, -1.0) at scale 32000 -> 32000, -32000 little-endian
    out = quantize(np.array([1.0 - 1.0j]), 32000.0)
    assert out.tobytes() == bytes([0x00, 0x7D, 0x00, 0x83])


def test_round_half_away_from_zero():
    out = quantize(np.array([0.5 + 0j, -0.5 + 0j, 1.5 + 0j]), 1.0)
    assert list(out[0::2]) == [1, -1, 2]


def test_write_read_round_trip(tmp_path):
    scene = demo_scene()
    rec = write_record(scene, tmp_path / "r", sample_rate_hz=100e6)
    loaded = read_record(tmp_path / "r")
    assert len(loaded.samples) == len(scene.samples)
    # samples identical within 1 LSB * scale
    err = np.max(np.abs(loaded.samples.samples - scene.samples.samples))
    assert err <= 1.0 / loaded.scale
    # annotations identical field for field
    (box, label), = loaded.boxes
    assert label == "PSK4"
    assert box.t_start == 1000 and box.t_end == 1000 + (1 << 14)
    assert box.f_low == pytest.approx(0.1 - 0.04)
    assert box.f_high == pytest.approx(0.1 + 0.04)
    assert rec.meta["annotations"][0]["core:freq_lower_edge"] == pytest.approx(0.06 * 100e6)


def test_write_read_write_is_byte_exact(tmp_path):
    scene = demo_scene()
    write_record(scene, tmp_path / "a")
    loaded = read_record(tmp_path / "a")
    # re-quantize the dequantized floats with the recorded scale
    requant = quantize(loaded.samples.samples, loaded.scale)
    assert requant.tobytes() == (tmp_path / "a.sigmf-data").read_bytes()


def test_quantization_snr_full_scale(tmp_path):
    scene = demo_scene()
    write_record(scene, tmp_path / "q")
    loaded = read_record(tmp_path / "q")
    err = loaded.samples.samples - scene.samples.samples
    snr = 10 * np.log10(np.mean(np.abs(scene.samples.samples) ** 2) / np.mean(np.abs(err) ** 2))
    assert snr >= 60.0


def test_empty_scene(tmp_path):
    scene = Scene(record_length=0, bursts=(), samples=ComplexBuffer(np.zeros(0, complex)), profile_name="", master_seed=0)
    write_record(scene, tmp_path / "e")
    assert (tmp_path / "e.sigmf-data").read_bytes() == b""
    loaded = read_record(tmp_path / "e")
    assert loaded.boxes == [] and len(loaded.samples) == 0


def test_all_zero_scene_uses_scale_one(tmp_path):
    scene = Scene(record_length=64, bursts=(), samples=ComplexBuffer(np.zeros(64, complex)), profile_name="", master_seed=0)
    rec = write_record(scene, tmp_path / "z")
    assert rec.meta["global"]["widesig:scale_factor"] == 1.0


def test_truncated_data_error_names_offset(tmp_path):
    scene = demo_scene(n=16384)
    write_record(scene, tmp_path / "t")
    data, _meta = record_paths(tmp_path / "t")
    blob = data.read_bytes()
    data.write_bytes(blob + b"\x01")
    with pytest.raises(TruncatedDataError, match=str(len(blob))):
        read_record(tmp_path / "t")


def test_datatype_mismatch(tmp_path):
    scene = demo_scene(n=16384)
    rec = write_record(scene, tmp_path / "d")
    meta = dict(rec.meta)
    meta["global"] = dict(meta["global"], **{"core:datatype": "cf32_le"})
    write_meta(meta, rec.meta_path)
    with pytest.raises(DatatypeError):
        read_record(tmp_path / "d")


def test_malformed_metadata(tmp_path):
    scene = demo_scene(n=16384)
    rec = write_record(scene, tmp_path / "m")
    rec.meta_path.write_text("{not json")
    with pytest.raises(MetadataError):
        read_record(tmp_path / "m")


def test_missing_metadata(tmp_path):
    with pytest.raises(MetadataError):
        read_record(tmp_path / "nothing")


def test_out_of_band_annotation_clamped_with_warning(tmp_path):
    scene = demo_scene(n=16384)
    rec = write_record(scene, tmp_path / "c", sample_rate_hz=1e6)
    meta = json.loads(rec.meta_path.read_text())
    meta["annotations"][0]["core:freq_upper_edge"] = 2e6  # beyond +fs/2
    write_meta(meta, rec.meta_path)
    with pytest.warns(UserWarning, match="clamping"):
        loaded = read_record(tmp_path / "c")
    (box, _), = loaded.boxes
    assert box.f_high == pytest.approx(0.5)


def test_unknown_fields_survive_rewrite(tmp_path):
    scene = demo_scene(n=16384)
    rec = write_record(scene, tmp_path / "u")
    meta = json.loads(rec.meta_path.read_text())
    meta["global"]["someorg:custom"] = {"nested": [1, 2, 3]}
    meta["annotations"][0]["someorg:note"] = "keep me"
    write_meta(meta, rec.meta_path)
    loaded = read_record(tmp_path / "u")
    write_meta(loaded.meta, tmp_path / "u2.sigmf-meta")
    again = json.loads((tmp_path / "u2.sigmf-meta").read_text())
    assert again["global"]["someorg:custom"] == {"nested": [1, 2, 3]}
    assert again["annotations"][0]["someorg:note"] == "keep me"


def test_annotations_sorted_by_start(tmp_path):
    bursts = [
        SignalBurst(label=ModulationClass.GMSK, center_freq=-0.2, bandwidth=0.05,
                    start_sample=50000, duration_samples=1 << 14, amplitude=0.5, burst_seed=1),
        SignalBurst(label=ModulationClass.FSK2, center_freq=0.2, bandwidth=0.05,
                    start_sample=100, duration_samples=1 << 14, amplitude=0.5, burst_seed=2),
    ]
    scene = assemble_scene(bursts, 1 << 17, "s", 0)
    rec = write_record(scene, tmp_path / "s")
    starts = [a["core:sample_start"] for a in rec.meta["annotations"]]
    assert starts == sorted(starts)
