"""Baseband burst synthesis for the 14 modulation classes.

Single-carrier classes come out at a canonical oversampling (2 samples per
symbol for the linear classes and GMSK; 4 or 8 for FSK so the h=1 tones stay
well inside Nyquist) and are later resampled by the scene generator to their
target bandwidth. Every burst is normalized to unit average power.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dsp import ComplexBuffer, Rng, design_gaussian, design_rrc
from .errors import ParameterError

GMSK_BT = 0.3
GMSK_MOD_INDEX = 0.5
FSK_MOD_INDEX = 1.0
OFDM_FFT = 640
OFDM_ACTIVE = 512
OFDM_CP = OFDM_FFT // 8
AM_MOD_INDEX = 0.5
FM_PEAK_DEVIATION = 0.05  # normalized cycles/sample at the canonical rate
AUDIO_BAND = (0.0125, 0.095)  # synthetic "voice" band, normalized
RRC_SPAN = 12


class ModulationClass(str, enum.Enum):
    PSK2 = "PSK2"
    PSK4 = "PSK4"
    PSK8 = "PSK8"
    QAM16 = "QAM16"
    QAM64 = "QAM64"
    QAM256 = "QAM256"
    OFDM512 = "OFDM512"
    FSK2 = "FSK2"
    FSK4 = "FSK4"
    GMSK = "GMSK"
    OOK = "OOK"
    AM_DSB = "AM_DSB"
    AM_SSB = "AM_SSB"
    FM = "FM"


LINEAR_CLASSES = frozenset(
    {
        ModulationClass.PSK2,
        ModulationClass.PSK4,
        ModulationClass.PSK8,
        ModulationClass.QAM16,
        ModulationClass.QAM64,
        ModulationClass.QAM256,
        ModulationClass.OOK,
    }
)
ANALOG_CLASSES = frozenset({ModulationClass.AM_DSB, ModulationClass.AM_SSB, ModulationClass.FM})


def canonical_sps(mclass: ModulationClass) -> int:
    """Samples per symbol at which a single-carrier class is synthesized."""
    if mclass is ModulationClass.FSK2:
        return 4
    if mclass is ModulationClass.FSK4:
        return 8
    return 2


@dataclass(frozen=True)
class BurstSpec:
    """One burst request: class, size (symbols or samples), shaping, seed.

    Exactly one of symbol_count / duration_samples must be given. The symbol
    stream is drawn from ``rng.child(0)`` and the audio stream (analog
    classes) from ``rng.child(1)``, so tests can regenerate either.
    """

    modulation: ModulationClass
    rng: Rng
    symbol_count: int | None = None
    duration_samples: int | None = None
    rrc_beta: float = 0.35

    def __post_init__(self):
        if (self.symbol_count is None) == (self.duration_samples is None):
            raise ParameterError("give exactly one of symbol_count or duration_samples")
        if self.symbol_count is not None and self.symbol_count < 1:
            raise ParameterError("symbol_count must be positive")
        if self.duration_samples is not None and self.duration_samples < 1:
            raise ParameterError("duration_samples must be positive")
        if not 0.05 <= self.rrc_beta <= 1.0:
            raise ParameterError("rrc_beta must be in [0.05, 1.0]")


@dataclass(frozen=True)
class AudioSource:
    """Synthetic modulating audio: tonal (music-like) or speech-like noise."""

    kind: str  # "tonal" | "speech"
    duration_samples: int
    rng: Rng

    def __post_init__(self):
        if self.kind not in ("tonal", "speech"):
            raise ParameterError(f"unknown audio kind: {self.kind!r}")
        if self.duration_samples < 16:
            raise ParameterError("audio too short")


def constellation(mclass: ModulationClass) -> np.ndarray:
    """Unit-average-energy constellation points for the linear classes."""
    if mclass in (ModulationClass.PSK2, ModulationClass.PSK4, ModulationClass.PSK8):
        m = {ModulationClass.PSK2: 2, ModulationClass.PSK4: 4, ModulationClass.PSK8: 8}[mclass]
        k = np.arange(m)
        return np.exp(1j * (2 * np.pi * k / m + np.pi / m))
    if mclass in (ModulationClass.QAM16, ModulationClass.QAM64, ModulationClass.QAM256):
        m = {ModulationClass.QAM16: 16, ModulationClass.QAM64: 64, ModulationClass.QAM256: 256}[mclass]
        side = int(np.sqrt(m))
        levels = 2 * np.arange(side) - (side - 1)
        pts = (levels[:, None] + 1j * levels[None, :]).ravel()
        return pts / np.sqrt(np.mean(np.abs(pts) ** 2))
    if mclass is ModulationClass.OOK:
        return np.array([0.0, np.sqrt(2.0)], dtype=np.complex128)
    raise ParameterError(f"{mclass.value} has no point constellation")


def draw_symbols(mclass: ModulationClass, count: int, gen: np.random.Generator) -> np.ndarray:
    """Whitened (iid uniform) symbol stream for a linear class."""
    pts = constellation(mclass)
    return pts[gen.integers(0, len(pts), size=count)]


def _shape_linear(symbols: np.ndarray, beta: float, sps: int) -> tuple[np.ndarray, int]:
    taps = design_rrc(beta, sps, RRC_SPAN)
    up = np.zeros(len(symbols) * sps, dtype=np.complex128)
    up[::sps] = symbols
    return np.convolve(up, taps.taps), taps.delay


def _normalize(x: np.ndarray) -> np.ndarray:
    rms = np.sqrt(np.mean(np.abs(x) ** 2))
    if rms == 0.0:
        return x
    return x / rms


def _nrz(levels: np.ndarray, sps: int) -> np.ndarray:
    return np.repeat(levels.astype(np.float64), sps)


def _pick_symbol_count(spec: BurstSpec, sps: int, extra: int) -> int:
    if spec.symbol_count is not None:
        return spec.symbol_count
    return int(np.ceil(spec.duration_samples / sps)) + extra


def _trim(x: np.ndarray, spec: BurstSpec, offset: int) -> np.ndarray:
    if spec.duration_samples is None:
        return x
    if offset + spec.duration_samples > len(x):
        raise ParameterError("internal sizing error: shaped burst too short")
    return x[offset : offset + spec.duration_samples]


def modulate(spec: BurstSpec) -> ComplexBuffer:
    """Synthesize one baseband burst at its canonical rate, unit power."""
    mclass = spec.modulation
    if mclass in ANALOG_CLASSES:
        duration = spec.duration_samples
        if duration is None:
            raise ParameterError("analog classes require duration_samples")
        kind = "tonal" if spec.rng.child(2).generator().random() < 0.5 else "speech"
        return modulate_analog(mclass, AudioSource(kind, duration, spec.rng.child(1)))

    gen = spec.rng.child(0).generator()
    sps = canonical_sps(mclass)

    if mclass in LINEAR_CLASSES:
        n = _pick_symbol_count(spec, sps, RRC_SPAN)
        syms = draw_symbols(mclass, n, gen)
        x, delay = _shape_linear(syms, spec.rrc_beta, sps)
        x = _trim(x, spec, delay)
    elif mclass is ModulationClass.GMSK:
        taps = design_gaussian(GMSK_BT, sps, span=4)
        n = _pick_symbol_count(spec, sps, 4)
        bits = gen.integers(0, 2, size=n) * 2.0 - 1.0
        freq = np.convolve(_nrz(bits, sps), taps.taps)
        phase = np.pi * GMSK_MOD_INDEX * np.cumsum(freq) / sps
        x = _trim(np.exp(1j * phase), spec, taps.delay)
    elif mclass in (ModulationClass.FSK2, ModulationClass.FSK4):
        n = _pick_symbol_count(spec, sps, 0)
        if mclass is ModulationClass.FSK2:
            levels = gen.integers(0, 2, size=n) * 2.0 - 1.0
        else:
            levels = gen.integers(0, 4, size=n) * 2.0 - 3.0
        phase = np.pi * FSK_MOD_INDEX * np.cumsum(_nrz(levels, sps)) / sps
        x = _trim(np.exp(1j * phase), spec, 0)
    elif mclass is ModulationClass.OFDM512:
        if spec.duration_samples is not None:
            n_sym = int(np.ceil(spec.duration_samples / (OFDM_FFT + OFDM_CP)))
        else:
            n_sym = spec.symbol_count
        x = _trim(_ofdm_body(n_sym, gen), spec, 0)
    else:  # pragma: no cover - closed enum; guards future additions
        raise ParameterError(f"unsupported modulation class: {mclass!r}")

    return ComplexBuffer(_normalize(x))


def _ofdm_body(n_sym: int, gen: np.random.Generator) -> np.ndarray:
    # 512 active subcarriers centered on a 640-point transform, DC unused,
    # QPSK payloads, cyclic prefix of 1/8.
    half = OFDM_ACTIVE // 2
    active = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    qpsk = constellation(ModulationClass.PSK4)
    payload = qpsk[gen.integers(0, 4, size=(n_sym, OFDM_ACTIVE))]
    spectrum = np.zeros((n_sym, OFDM_FFT), dtype=np.complex128)
    spectrum[:, active % OFDM_FFT] = payload
    body = np.fft.ifft(spectrum, axis=1)
    with_cp = np.concatenate([body[:, -OFDM_CP:], body], axis=1)
    return with_cp.ravel()


def synth_audio(source: AudioSource) -> np.ndarray:
    """Render the synthetic audio: real, bounded in [-1, 1], band <= 0.1."""
    gen = source.rng.generator()
    n = source.duration_samples
    t = np.arange(n, dtype=np.float64)
    if source.kind == "tonal":
        n_tones = int(gen.integers(3, 9))
        freqs = np.exp(gen.uniform(np.log(0.002), np.log(0.08), size=n_tones))
        amps = gen.uniform(0.3, 1.0, size=n_tones)
        phases = gen.uniform(0.0, 2 * np.pi, size=n_tones)
        env_rates = gen.uniform(1e-5, 2e-4, size=n_tones)
        env_phases = gen.uniform(0.0, 2 * np.pi, size=n_tones)
        audio = np.zeros(n)
        for f, a, p, er, ep in zip(freqs, amps, phases, env_rates, env_phases):
            env = 0.7 + 0.3 * np.sin(2 * np.pi * er * t + ep)
            audio += a * env * np.sin(2 * np.pi * f * t + p)
    else:
        audio = gen.standard_normal(n)
        spectrum = np.fft.fft(audio)
        f = np.fft.fftfreq(n)
        keep = (np.abs(f) >= AUDIO_BAND[0]) & (np.abs(f) <= AUDIO_BAND[1])
        audio = np.fft.ifft(np.where(keep, spectrum, 0.0)).real
        audio *= _talk_envelope(n, gen)
    peak = np.max(np.abs(audio))
    if peak > 0:
        audio /= peak * 1.02
    return audio


def _talk_envelope(n: int, gen: np.random.Generator) -> np.ndarray:
    # On/off speech cadence with raised-cosine ramps to keep spectral spread
    # well below the audio band edge.
    env = np.zeros(n)
    ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(256) / 256)
    pos = 0
    while pos < n:
        on = int(gen.integers(1500, 12000))
        off = int(gen.integers(300, 4000))
        seg = np.ones(on)
        seg[:256] = ramp
        seg[-256:] = ramp[::-1]
        end = min(pos + on, n)
        env[pos:end] = seg[: end - pos]
        pos += on + off
    return env


def modulate_analog(mclass: ModulationClass, audio: AudioSource | np.ndarray) -> ComplexBuffer:
    """AM-DSB / AM-SSB / FM burst from an audio source (or a raw real-valued
    message array), unit average power where the message has any energy."""
    if mclass not in ANALOG_CLASSES:
        raise ParameterError(f"{mclass.value} is not an analog class")
    a = synth_audio(audio) if isinstance(audio, AudioSource) else np.asarray(audio, dtype=np.float64)
    if mclass is ModulationClass.AM_DSB:
        x = (1.0 + AM_MOD_INDEX * a).astype(np.complex128)
    elif mclass is ModulationClass.AM_SSB:
        # Upper sideband by zeroing negative frequencies of the message.
        spectrum = np.fft.fft(a)
        n = len(a)
        gain = np.zeros(n)
        gain[0] = 1.0
        gain[1 : (n + 1) // 2] = 2.0
        if n % 2 == 0:
            gain[n // 2] = 1.0
        x = np.fft.ifft(spectrum * gain)
    else:
        phase = 2 * np.pi * FM_PEAK_DEVIATION * np.cumsum(a)
        x = np.exp(1j * phase)
    return ComplexBuffer(_normalize(x))
