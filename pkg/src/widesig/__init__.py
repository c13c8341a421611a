"""Wideband signal-recognition benchmark: scene synthesis, SigMF records,
baseline detectors, and IoU-based scoring."""

from .detect import (
    DetectorConfig,
    Detection,
    channelized_radiometer,
    clusters_to_detections,
    connected_components,
    detections_from_mask,
    estimate_noise_floor,
    post_filter,
    read_detections,
    threshold_mask,
    write_detections,
)
from .dsp import ComplexBuffer, FilterTaps, Rng, add_awgn, design_gaussian, design_rrc, dft, resample
from .grid import (
    BinaryMask,
    GridGeometry,
    SpectralGrid,
    TimeFreqBox,
    cell_to_box,
    rasterize,
    read_mask,
    spectrogram,
    write_mask,
)
from .metrics import MatchResult, ScoreReport, iou, match, score, sweep_score
from .modems import AudioSource, BurstSpec, ModulationClass, modulate, modulate_analog
from .scene import (
    BandLayoutProfile,
    Scene,
    SignalBurst,
    assemble_scene,
    builtin_profile,
    builtin_profile_names,
    burst_to_box,
    draw_layout,
    load_profile,
    make_scene,
    render_scene,
)
from .sigmf_io import LoadedRecord, SigmfRecord, read_record, write_record

__version__ = "0.1.0"
