"""Band layout drawing and wideband scene rendering.

A scene is the noiseless sum of independently synthesized bursts, each
resampled to its target bandwidth, shifted to its center frequency, scaled,
and added at its start sample. Ground truth is exact by construction: the
truth box width equals the drawn bandwidth because the resample ratio is
calibrated against the burst's occupied bandwidth at the canonical rate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .dsp import RESAMPLE_RATIO_MAX, RESAMPLE_RATIO_MIN, ComplexBuffer, Rng, resample
from .errors import ParameterError, ProfileError
from .grid import TimeFreqBox
from .modems import ANALOG_CLASSES, LINEAR_CLASSES, BurstSpec, ModulationClass, modulate

MIN_TIME_BANDWIDTH = 512.0
OCCUPIED_ENERGY_FRACTION = 0.99
MAX_DRAW_ATTEMPTS = 100

# Rough canonical occupied bandwidths, used only to size the first synthesis
# pass; the exact value is measured (or computed analytically) per burst.
_NOMINAL_CANONICAL_BW = {
    ModulationClass.GMSK: 0.45,
    ModulationClass.FSK2: 0.45,
    ModulationClass.FSK4: 0.5,
    ModulationClass.OFDM512: 0.82,
    ModulationClass.AM_DSB: 0.2,
    ModulationClass.AM_SSB: 0.1,
    ModulationClass.FM: 0.3,
}

# rng spawn-key lanes within one record
_LANE_LAYOUT = 0
_LANE_BURST = 1


@dataclass(frozen=True)
class Dist:
    """Small parametric distribution: uniform, loguniform, or choice."""

    kind: str
    low: float = 0.0
    high: float = 0.0
    values: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.kind not in ("uniform", "loguniform", "choice"):
            raise ProfileError(f"unknown distribution kind: {self.kind!r}")
        if self.kind == "choice":
            if not self.values:
                raise ProfileError("choice distribution needs values")
            if self.weights and len(self.weights) != len(self.values):
                raise ProfileError("weights must match values")
            if self.weights and any(w <= 0 for w in self.weights):
                raise ProfileError("choice weights must be positive")
        else:
            if not self.low <= self.high:
                raise ProfileError("distribution needs low <= high")
            if self.kind == "loguniform" and self.low <= 0:
                raise ProfileError("loguniform support must be positive")

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "choice":
            return (min(self.values), max(self.values))
        return (self.low, self.high)

    def sample(self, gen: np.random.Generator) -> float:
        if self.kind == "uniform":
            return float(gen.uniform(self.low, self.high))
        if self.kind == "loguniform":
            return float(np.exp(gen.uniform(np.log(self.low), np.log(self.high))))
        if self.weights:
            w = np.asarray(self.weights, dtype=np.float64)
            return float(gen.choice(np.asarray(self.values, dtype=np.float64), p=w / w.sum()))
        return float(gen.choice(np.asarray(self.values, dtype=np.float64)))

    @classmethod
    def from_dict(cls, d: dict) -> "Dist":
        return cls(
            kind=d["kind"],
            low=float(d.get("low", 0.0)),
            high=float(d.get("high", 0.0)),
            values=tuple(d.get("values", ())),
            weights=tuple(d.get("weights", ())),
        )

    def to_dict(self) -> dict:
        if self.kind == "choice":
            out = {"kind": self.kind, "values": list(self.values)}
            if self.weights:
                out["weights"] = list(self.weights)
            return out
        return {"kind": self.kind, "low": self.low, "high": self.high}


@dataclass(frozen=True)
class BandLayoutProfile:
    """Parametric description of how bursts populate a record.

    ``start_time_dist`` is sampled as a fraction of the available start range;
    ``duration_dist`` is in samples; ``amplitude_db_dist`` in dBFS. Burst
    count per record is Poisson(occupancy) clipped to [occupancy/2,
    2*occupancy] so records are never degenerate.
    """

    name: str
    bandwidth_dist: Dist
    duration_dist: Dist
    start_time_dist: Dist
    amplitude_db_dist: Dist
    modulation_pool: tuple[tuple[ModulationClass, float], ...]
    occupancy: float
    channel_grid: tuple[float, float] | None = None  # (first_center, spacing)

    def __post_init__(self):
        bw_lo, bw_hi = self.bandwidth_dist.support
        if not (0 < bw_lo and bw_hi <= 0.5):
            raise ProfileError(f"{self.name}: bandwidth support must lie in (0, 0.5]")
        amp_lo, amp_hi = self.amplitude_db_dist.support
        if not (-50.0 <= amp_lo and amp_hi <= 0.0):
            raise ProfileError(f"{self.name}: amplitudes must lie in [-50, 0] dBFS")
        dur_lo, _ = self.duration_dist.support
        if dur_lo < 1:
            raise ProfileError(f"{self.name}: durations must be >= 1 sample")
        st_lo, st_hi = self.start_time_dist.support
        if st_lo < 0 or st_hi > 1:
            raise ProfileError(f"{self.name}: start fractions must lie in [0, 1]")
        if not self.modulation_pool:
            raise ProfileError(f"{self.name}: empty modulation pool")
        if any(w <= 0 for _, w in self.modulation_pool):
            raise ProfileError(f"{self.name}: modulation weights must be positive")
        if self.occupancy < 0:
            raise ProfileError(f"{self.name}: occupancy must be >= 0")
        if self.channel_grid is not None:
            first, spacing = self.channel_grid
            if spacing <= 0 or not -0.5 <= first < 0.5:
                raise ProfileError(f"{self.name}: bad channel grid")

    @classmethod
    def from_dict(cls, d: dict) -> "BandLayoutProfile":
        pool = tuple((ModulationClass(m), float(w)) for m, w in d["modulation_pool"])
        grid = tuple(d["channel_grid"]) if d.get("channel_grid") else None
        return cls(
            name=d["name"],
            bandwidth_dist=Dist.from_dict(d["bandwidth_dist"]),
            duration_dist=Dist.from_dict(d["duration_dist"]),
            start_time_dist=Dist.from_dict(d.get("start_time_dist", {"kind": "uniform", "low": 0.0, "high": 1.0})),
            amplitude_db_dist=Dist.from_dict(d.get("amplitude_db_dist", {"kind": "uniform", "low": -30.0, "high": 0.0})),
            modulation_pool=pool,
            occupancy=float(d["occupancy"]),
            channel_grid=grid,
        )

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "bandwidth_dist": self.bandwidth_dist.to_dict(),
            "duration_dist": self.duration_dist.to_dict(),
            "start_time_dist": self.start_time_dist.to_dict(),
            "amplitude_db_dist": self.amplitude_db_dist.to_dict(),
            "modulation_pool": [[m.value, w] for m, w in self.modulation_pool],
            "occupancy": self.occupancy,
        }
        if self.channel_grid is not None:
            out["channel_grid"] = list(self.channel_grid)
        return out


@dataclass(frozen=True)
class SignalBurst:
    """Ground truth for one emission; fully determines its rendering."""

    label: ModulationClass
    center_freq: float
    bandwidth: float
    start_sample: int
    duration_samples: int
    amplitude: float
    burst_seed: int
    rrc_beta: float | None = None

    def __post_init__(self):
        if not (0 < self.bandwidth <= 1.0):
            raise ParameterError("bandwidth must be in (0, 1]")
        half = self.bandwidth / 2.0
        if not (-0.5 <= self.center_freq - half and self.center_freq + half <= 0.5):
            raise ParameterError("burst band must lie inside [-0.5, 0.5]")
        if self.start_sample < 0 or self.duration_samples <= 0:
            raise ParameterError("burst must have non-negative start and positive duration")
        if self.amplitude <= 0:
            raise ParameterError("amplitude must be positive")
        if self.duration_samples * self.bandwidth < MIN_TIME_BANDWIDTH - 1e-9:
            raise ParameterError("time-bandwidth product below minimum")


@dataclass(frozen=True)
class Scene:
    """Noiseless wideband record plus its ground truth."""

    record_length: int
    bursts: tuple[SignalBurst, ...]
    samples: ComplexBuffer
    profile_name: str
    master_seed: int

    def __post_init__(self):
        if len(self.samples) != self.record_length:
            raise ParameterError("sample count does not match record_length")
        for b in self.bursts:
            if b.start_sample + b.duration_samples > self.record_length:
                raise ParameterError("burst extends past record end")


def burst_to_box(burst: SignalBurst) -> TimeFreqBox:
    """Truth box: full duration by declared occupied bandwidth."""
    half = burst.bandwidth / 2.0
    return TimeFreqBox(
        t_start=burst.start_sample,
        t_end=burst.start_sample + burst.duration_samples,
        f_low=burst.center_freq - half,
        f_high=burst.center_freq + half,
    )


def measure_occupied_band(x: np.ndarray, fraction: float = OCCUPIED_ENERGY_FRACTION) -> tuple[float, float]:
    """(f_low, f_high) of the central ``fraction`` of spectral energy."""
    spectrum = np.fft.fftshift(np.fft.fft(x))
    power = np.abs(spectrum) ** 2
    total = power.sum()
    if total == 0:
        return (-0.5, 0.5)
    cum = np.cumsum(power) / total
    tail = (1.0 - fraction) / 2.0
    lo = int(np.searchsorted(cum, tail))
    hi = int(np.searchsorted(cum, 1.0 - tail))
    n = len(x)
    freqs = (np.arange(n) - n // 2) / n
    return (float(freqs[min(lo, n - 1)]), float(freqs[min(hi, n - 1)] + 1.0 / n))


def draw_layout(profile: BandLayoutProfile, record_length: int, rng: Rng) -> list[SignalBurst]:
    """Draw one record's bursts from a profile.

    Bursts violating the minimum time-bandwidth product are redrawn up to
    MAX_DRAW_ATTEMPTS times, then clamped by extending duration (and, as a
    last resort against short records, widening bandwidth).
    """
    if record_length < 2 * MIN_TIME_BANDWIDTH:
        raise ProfileError(f"record of {record_length} samples cannot satisfy the minimum time-bandwidth product")
    gen = rng.child(_LANE_LAYOUT).generator()
    if profile.occupancy <= 0:
        return []
    lo_count = max(1, int(np.ceil(profile.occupancy / 2.0)))
    hi_count = max(1, int(np.floor(profile.occupancy * 2.0)))
    count = int(np.clip(gen.poisson(profile.occupancy), lo_count, hi_count))

    classes = [m for m, _ in profile.modulation_pool]
    weights = np.asarray([w for _, w in profile.modulation_pool], dtype=np.float64)
    weights /= weights.sum()

    bursts: list[SignalBurst] = []
    for i in range(count):
        mclass = classes[int(gen.choice(len(classes), p=weights))]
        bandwidth, duration = _draw_extent(profile, record_length, gen)
        center = _draw_center(profile, bandwidth, gen)
        max_start = record_length - duration
        start = int(profile.start_time_dist.sample(gen) * max_start) if max_start > 0 else 0
        amplitude = 10.0 ** (profile.amplitude_db_dist.sample(gen) / 20.0)
        beta = float(gen.uniform(0.05, 1.0)) if mclass in LINEAR_CLASSES else None
        bursts.append(
            SignalBurst(
                label=mclass,
                center_freq=center,
                bandwidth=bandwidth,
                start_sample=start,
                duration_samples=duration,
                amplitude=amplitude,
                burst_seed=rng.child(_LANE_BURST, i).seed,
                rrc_beta=beta,
            )
        )
    return bursts


def _draw_extent(profile: BandLayoutProfile, record_length: int, gen: np.random.Generator) -> tuple[float, int]:
    bandwidth = duration = None
    for _ in range(MAX_DRAW_ATTEMPTS):
        bandwidth = profile.bandwidth_dist.sample(gen)
        duration = min(int(profile.duration_dist.sample(gen)), record_length)
        if duration * bandwidth >= MIN_TIME_BANDWIDTH:
            return bandwidth, duration
    duration = min(int(np.ceil(MIN_TIME_BANDWIDTH / bandwidth)), record_length)
    if duration * bandwidth < MIN_TIME_BANDWIDTH:
        bandwidth = min(0.5, MIN_TIME_BANDWIDTH / duration)
    return bandwidth, duration


def _draw_center(profile: BandLayoutProfile, bandwidth: float, gen: np.random.Generator) -> float:
    half = bandwidth / 2.0
    if profile.channel_grid is not None:
        first, spacing = profile.channel_grid
        ks = np.arange(int(np.floor((0.5 - first) / spacing)) + 1)
        centers = first + ks * spacing
        legal = centers[(centers - half >= -0.5) & (centers + half <= 0.5)]
        if legal.size == 0:
            raise ProfileError(f"{profile.name}: no grid channel fits bandwidth {bandwidth}")
        return float(gen.choice(legal))
    if half > 0.5:
        raise ProfileError(f"{profile.name}: bandwidth {bandwidth} exceeds the band")
    return float(gen.uniform(-0.5 + half, 0.5 - half))


def _canonical_spec(burst: SignalBurst, canonical_len: int) -> BurstSpec:
    return BurstSpec(
        modulation=burst.label,
        rng=Rng(burst.burst_seed),
        duration_samples=canonical_len,
        rrc_beta=burst.rrc_beta if burst.rrc_beta is not None else 0.35,
    )


def _staged_resample(buf: ComplexBuffer, ratio: float) -> ComplexBuffer:
    """Apply an arbitrary total ratio as a cascade of in-range stages."""
    remaining = ratio
    out = buf
    while remaining > RESAMPLE_RATIO_MAX:
        out = resample(out, RESAMPLE_RATIO_MAX / 2.0)
        remaining /= RESAMPLE_RATIO_MAX / 2.0
    while remaining < RESAMPLE_RATIO_MIN:
        out = resample(out, RESAMPLE_RATIO_MIN * 2.0)
        remaining /= RESAMPLE_RATIO_MIN * 2.0
    return resample(out, remaining)


def _measure_canonical_band(label: ModulationClass, samples: np.ndarray) -> tuple[float, float]:
    # AM-DSB has a discrete carrier at DC that would collapse the 99% quantile
    # band; the annotation convention is the occupied band of the sidebands,
    # which always straddle the carrier.
    if label is ModulationClass.AM_DSB:
        return measure_occupied_band(samples - samples.mean())
    return measure_occupied_band(samples)


def render_burst(burst: SignalBurst) -> np.ndarray:
    """Unit-power samples for one burst at the record rate, exactly
    duration_samples long, occupying [center - bw/2, center + bw/2]."""
    if burst.label in LINEAR_CLASSES:
        beta = burst.rrc_beta if burst.rrc_beta is not None else 0.35
        canon_bw = (1.0 + beta) / 2.0
        canon_center = 0.0
        measured = False
    else:
        canon_bw = _NOMINAL_CANONICAL_BW[burst.label]
        canon_center = 0.0
        measured = True

    max_canonical = 64 * burst.duration_samples + (1 << 16)
    for _ in range(3):
        ratio = canon_bw / burst.bandwidth
        canonical_len = int(np.ceil(burst.duration_samples / ratio * 1.05)) + 256
        if canonical_len > max_canonical:
            raise ParameterError(
                f"{burst.label.value} burst needs an implausible canonical length "
                f"({canonical_len}); occupied-band calibration diverged"
            )
        x = modulate(_canonical_spec(burst, canonical_len))
        if measured:
            f_lo, f_hi = _measure_canonical_band(burst.label, x.samples)
            canon_bw = f_hi - f_lo
            canon_center = (f_lo + f_hi) / 2.0
        ratio = canon_bw / burst.bandwidth
        resampled = _staged_resample(x, ratio)
        if len(resampled) >= burst.duration_samples:
            break
    else:
        raise ParameterError("burst rendering failed to reach target duration")

    y = resampled.samples[: burst.duration_samples]
    shift = burst.center_freq - canon_center / ratio
    y = y * np.exp(2j * np.pi * shift * np.arange(len(y)))
    rms = np.sqrt(np.mean(np.abs(y) ** 2))
    return (burst.amplitude / rms) * y


def render_scene(bursts: list[SignalBurst], record_length: int, rng: Rng) -> Scene:
    """Mix all bursts into a noiseless record (profile name/seed unset)."""
    return assemble_scene(bursts, record_length, profile_name="", master_seed=rng.seed)


def assemble_scene(bursts, record_length: int, profile_name: str, master_seed: int) -> Scene:
    out = np.zeros(record_length, dtype=np.complex128)
    for burst in bursts:
        if burst.start_sample + burst.duration_samples > record_length:
            raise ParameterError("burst extends past record end")
        rendered = render_burst(burst)
        out[burst.start_sample : burst.start_sample + burst.duration_samples] += rendered
    return Scene(
        record_length=record_length,
        bursts=tuple(bursts),
        samples=ComplexBuffer(out),
        profile_name=profile_name,
        master_seed=master_seed,
    )


def make_scene(profile: BandLayoutProfile, record_length: int, master_seed: int) -> Scene:
    """Draw a layout and render it; bit-exact function of its arguments."""
    rng = Rng(master_seed)
    bursts = draw_layout(profile, record_length, rng)
    return assemble_scene(bursts, record_length, profile_name=profile.name, master_seed=master_seed)


def load_profile(path) -> BandLayoutProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return BandLayoutProfile.from_dict(json.load(fh))


def builtin_profile_names() -> list[str]:
    root = resources.files("widesig").joinpath("profiles")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def builtin_profile(name: str) -> BandLayoutProfile:
    ref = resources.files("widesig").joinpath("profiles").joinpath(f"{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ProfileError(f"no built-in profile named {name!r}") from None
    return BandLayoutProfile.from_dict(json.loads(text))
