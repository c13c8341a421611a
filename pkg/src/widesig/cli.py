"""Command-line harness: dataset generation, detection, scoring, SNR sweeps.

SNR is defined in-band: 10*log10(A^2 / (sigma^2 * B)) for a burst of
amplitude A and normalized bandwidth B under total-variance-sigma^2 complex
AWGN. The sweep harness parameterizes by this quantity directly and reports
the sigma used for each point.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from .detect import DetectorConfig, channelized_radiometer, detections_from_mask, read_detections, write_detections
from .dsp import Rng, add_awgn
from .errors import GeometryMismatchError, WidesigError
from .grid import GridGeometry, read_mask, spectrogram
from .metrics import DEFAULT_SWEEP_THRESHOLDS, ScoreReport, ThresholdScore, match, sweep_score
from .modems import ModulationClass
from .scene import (
    SignalBurst,
    assemble_scene,
    builtin_profile,
    builtin_profile_names,
    burst_to_box,
    load_profile,
    make_scene,
)
from .sigmf_io import read_record, write_record

WORKERS_ENV = "WIDESIG_WORKERS"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV, "")
    if value.isdigit() and int(value) > 0:
        return int(value)
    return 1


def sigma_for_inband_snr(snr_db: float, bandwidth: float, amplitude: float = 1.0) -> float:
    """Noise amplitude giving the requested in-band SNR for one burst."""
    return amplitude / np.sqrt(bandwidth * 10.0 ** (snr_db / 10.0))


def inband_snr_db(amplitude: float, bandwidth: float, sigma: float) -> float:
    return 10.0 * np.log10(amplitude**2 / (sigma**2 * bandwidth))


@dataclass(frozen=True)
class SweepSpec:
    """Desk-scale single-modulation sweep: same scene per SNR point, fresh
    noise per repeat, bursts laid out on disjoint slots so every truth box is
    independently detectable."""

    snr_points_db: tuple[float, ...] = tuple(range(-20, 31, 5))
    repeats: int = 5
    oversampling: float = 5.0
    modulation: ModulationClass = ModulationClass.PSK4
    record_length: int = 1 << 21
    seed: int = 0
    rrc_beta: float = 0.35
    burst_duration: int = 1 << 15
    fft_size: int = 512
    iou_thresholds: tuple[float, ...] = DEFAULT_SWEEP_THRESHOLDS

    def __post_init__(self):
        if self.record_length < 10 * self.fft_size:
            raise WidesigError("record_length must be at least 10 * fft_size")
        if self.repeats < 1:
            raise WidesigError("repeats must be >= 1")
        if self.oversampling <= 1.0:
            raise WidesigError("oversampling must exceed 1")

    @property
    def bandwidth(self) -> float:
        return (1.0 + self.rrc_beta) / self.oversampling

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        if "snr_points_db" in d:
            d["snr_points_db"] = tuple(float(s) for s in d["snr_points_db"])
        if "modulation" in d:
            d["modulation"] = ModulationClass(d["modulation"])
        if "iou_thresholds" in d:
            d["iou_thresholds"] = tuple(float(t) for t in d["iou_thresholds"])
        return cls(**d)


def sweep_layout(spec: SweepSpec, rng: Rng) -> list[SignalBurst]:
    """One burst per time slot at band center, starts jittered inside the
    slot, generous guard frames between slots. Low occupancy keeps the
    radiometer's median floor estimate honest at every SNR point."""
    bw = spec.bandwidth
    if bw / 2.0 + 0.05 > 0.5:
        raise WidesigError("sweep bandwidth too wide; raise oversampling")
    frames = spec.record_length // spec.fft_size
    dur_frames = spec.burst_duration // spec.fft_size
    stride = dur_frames + 32
    n_time = frames // stride
    gen = rng.child(0).generator()
    bursts = []
    for ti in range(n_time):
        jitter = int(gen.integers(0, 8 * spec.fft_size))
        start = ti * stride * spec.fft_size + jitter
        bursts.append(
            SignalBurst(
                label=spec.modulation,
                center_freq=0.0,
                bandwidth=bw,
                start_sample=start,
                duration_samples=spec.burst_duration,
                amplitude=1.0,
                burst_seed=rng.child(1, ti).seed,
                rrc_beta=spec.rrc_beta,
            )
        )
    return bursts


def _sweep_point(args) -> tuple[float, float, dict[float, tuple[int, int, int]]]:
    spec, point_index, snr_db, detector = args
    rng = Rng(spec.seed).child(3, point_index)
    bursts = sweep_layout(spec, rng)
    scene = assemble_scene(bursts, spec.record_length, profile_name="sweep", master_seed=rng.seed)
    truths = [(burst_to_box(b), "") for b in scene.bursts]
    sigma = float(sigma_for_inband_snr(snr_db, spec.bandwidth))
    counts = {thr: [0, 0, 0] for thr in spec.iou_thresholds}
    for r in range(spec.repeats):
        noisy = add_awgn(scene.samples, sigma, rng.child(4, r))
        dets = channelized_radiometer(noisy, config=detector)
        for thr in spec.iou_thresholds:
            result = match(dets, truths, thr)
            tp = len(result.pairs)
            counts[thr][0] += tp
            counts[thr][1] += len(dets) - tp
            counts[thr][2] += len(truths) - tp
    return snr_db, sigma, {thr: tuple(c) for thr, c in counts.items()}


def run_sweep(spec: SweepSpec, detector: DetectorConfig | None = None, workers: int | None = None) -> ScoreReport:
    """Full sweep; returns a report with a per-SNR breakdown."""
    detector = detector or DetectorConfig()
    workers = workers or default_workers()
    jobs = [(spec, i, snr, detector) for i, snr in enumerate(spec.snr_points_db)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    per_snr: dict[float, tuple[ThresholdScore, ...]] = {}
    for snr_db, _sigma, counts in sorted(results, key=lambda r: r[0]):
        rows = tuple(
            ThresholdScore.from_counts(thr, *counts[thr]) for thr in spec.iou_thresholds
        )
        per_snr[snr_db] = rows
    total = {
        thr: (
            sum(per_snr[s][i].tp for s in per_snr),
            sum(per_snr[s][i].fp for s in per_snr),
            sum(per_snr[s][i].fn for s in per_snr),
        )
        for i, thr in enumerate(spec.iou_thresholds)
    }
    overall = tuple(ThresholdScore.from_counts(thr, *total[thr]) for thr in spec.iou_thresholds)
    return ScoreReport(per_threshold=overall, per_snr=per_snr)


def _resolve_profile(name_or_path: str):
    path = Path(name_or_path)
    if path.suffix == ".json" or path.exists():
        return load_profile(path)
    return builtin_profile(name_or_path)


def _record_stem(path: str) -> Path:
    p = Path(path)
    if p.suffix in (".sigmf-data", ".sigmf-meta"):
        return p.with_suffix("")
    return p


@click.group()
def main():
    """Wideband signal-recognition benchmark tools."""


@main.command()
@click.option("--profile", "profile_name", default=None, help="Profile name or JSON path; default round-robins the built-ins.")
@click.option("--count", type=int, required=True, help="Number of records to generate.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--record-length", type=int, default=1 << 20, show_default=True)
@click.option("--sample-rate", type=float, default=100e6, show_default=True, help="Metadata sample rate in Hz.")
def generate(profile_name, count, out_dir, seed, record_length, sample_rate):
    """Generate SigMF records plus a manifest of per-record seeds."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if profile_name is None:
        profiles = [builtin_profile(n) for n in builtin_profile_names()]
    else:
        profiles = [_resolve_profile(profile_name)]
    run_rng = Rng(seed)
    manifest = {
        "seed": seed,
        "record_length": record_length,
        "sample_rate": sample_rate,
        "records": [],
    }
    for i in range(count):
        profile = profiles[i % len(profiles)]
        master_seed = run_rng.child(2, i).seed
        scene = make_scene(profile, record_length, master_seed)
        stem = out / f"record_{i:04d}"
        write_record(scene, stem, sample_rate_hz=sample_rate)
        manifest["records"].append(
            {
                "name": stem.name,
                "profile": profile.name,
                "master_seed": master_seed,
                "bursts": len(scene.bursts),
            }
        )
        click.echo(f"wrote {stem.name} ({profile.name}, {len(scene.bursts)} bursts)")
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


@main.command()
@click.argument("record", type=click.Path(exists=False))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="Detector config JSON.")
@click.option("--mask", "mask_path", type=click.Path(exists=True), default=None, help="External mask interchange file to cluster instead of thresholding.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--fft-size", type=int, default=512, show_default=True)
def detect(record, config_path, mask_path, out_path, fft_size):
    """Run the channelized radiometer (or cluster an external mask)."""
    config = DetectorConfig()
    if config_path:
        config = DetectorConfig.from_dict(json.loads(Path(config_path).read_text()))
    try:
        loaded = read_record(_record_stem(record))
    except FileNotFoundError as exc:
        raise click.ClickException(str(exc))
    except WidesigError as exc:
        raise click.ClickException(str(exc))
    if mask_path:
        mask, _trailer = read_mask(mask_path)
        grid = spectrogram(loaded.samples, fft_size=mask.geometry.fft_size)
        if mask.geometry != grid.geometry:
            raise click.ClickException(
                f"mask geometry {mask.geometry.frames}x{mask.geometry.bins} does not match "
                f"record geometry {grid.geometry.frames}x{grid.geometry.bins}"
            )
        dets = detections_from_mask(mask, grid, config)
    else:
        dets = channelized_radiometer(loaded.samples, geometry=GridGeometry(fft_size=fft_size), config=config)
    write_detections(dets, out_path)
    click.echo(f"{len(dets)} detections -> {out_path}")


@main.command()
@click.option("--detections", "det_path", type=click.Path(exists=True), required=True)
@click.option("--record", "record_path", type=click.Path(), required=True, help="Record whose annotations are the ground truth.")
@click.option("--thresholds", default="coco", show_default=True, help='"coco", a single value, or comma-separated values.')
@click.option("--class-aware", is_flag=True, default=False)
@click.option("--out-json", type=click.Path(), default=None)
@click.option("--out-csv", type=click.Path(), default=None)
def score(det_path, record_path, thresholds, class_aware, out_json, out_csv):
    """Score a detections file against a record's ground truth."""
    dets = read_detections(det_path)
    try:
        loaded = read_record(_record_stem(record_path))
    except FileNotFoundError as exc:
        raise click.ClickException(str(exc))
    if thresholds == "coco":
        thr = DEFAULT_SWEEP_THRESHOLDS
    else:
        thr = tuple(float(t) for t in thresholds.split(","))
    report = sweep_score(dets, loaded.boxes, thr, class_aware=class_aware)
    if out_json:
        report.to_json(out_json)
    if out_csv:
        report.to_csv(out_csv)
    click.echo(
        f"iou={report.headline.iou_threshold}: precision={report.precision:.4f} "
        f"recall={report.recall:.4f} f1={report.f1:.4f} "
        f"(tp={report.tp} fp={report.fp} fn={report.fn})"
    )


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None, help="SweepSpec JSON; defaults are desk scale.")
@click.option("--out", "out_path", type=click.Path(), required=True, help="CSV output.")
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
@click.option("--repeats", type=int, default=None, help="Override the spec repeats.")
@click.option("--workers", type=int, default=None, help=f"Worker processes (default ${WORKERS_ENV} or 1).")
def sweep(spec_path, out_path, seed, repeats, workers):
    """Run the single-modulation SNR sweep and write the per-SNR CSV."""
    spec = SweepSpec.from_dict(json.loads(Path(spec_path).read_text())) if spec_path else SweepSpec()
    if seed is not None or repeats is not None:
        d = {k: v for k, v in vars(spec).items()}
        if seed is not None:
            d["seed"] = seed
        if repeats is not None:
            d["repeats"] = repeats
        spec = SweepSpec(**d)
    report = run_sweep(spec, workers=workers)
    report.to_csv(out_path)
    for snr in sorted(report.per_snr):
        row = report.per_snr[snr][0]
        click.echo(f"snr={snr:+.1f} dB iou={row.iou_threshold}: p={row.precision:.3f} r={row.recall:.3f} f1={row.f1:.3f}")
    click.echo(f"rows -> {out_path}")


@main.group()
def profiles():
    """Inspect the built-in band layout profiles."""


@profiles.command("list")
def profiles_list():
    for name in builtin_profile_names():
        p = builtin_profile(name)
        grid = "gridded" if p.channel_grid else "free"
        click.echo(f"{name}: occupancy {p.occupancy:g}, {grid}, classes {[m.value for m, _ in p.modulation_pool]}")


if __name__ == "__main__":
    main()
