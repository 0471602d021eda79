"""Built-in clip bank: deterministic placeholder synthesis for every clip kind.

Clip ids follow "<kind>[@<duration>][#<variant>]". The duration suffix
overrides the kind's default length in seconds; the variant suffix decorates
the id without changing synthesis parameters beyond the rng stream, so two
variants of one kind differ in noise detail but share their spectrum.

Each kind occupies its own band of the spectrum so a spectral-centroid
probe can tell any two kinds apart. Set MIXSCAPE_ASSETS to a directory of
<kind>.wav files to substitute recordings for the synthetic versions.
"""

from __future__ import annotations

import math
import os
import wave
from dataclasses import dataclass

import numpy as np

from .model import SAMPLE_RATE, AudioClip
from .dsp import apply_filter, design_highpass, design_lowpass

PEAK_NORM = 0.85
BED_NORM = 0.35
TAP_PERIOD = 0.5  # tap kinds tile one tap per half second


@dataclass(frozen=True)
class ClipSpec:
    kind: str
    default_duration: float
    is_bed: bool = False


CLIP_SPECS: dict[str, ClipSpec] = {
    spec.kind: spec
    for spec in (
        ClipSpec("knock", 0.6),
        ClipSpec("car_pass", 2.0),
        ClipSpec("tap_on_manhole", 0.5),
        ClipSpec("crowd_bed", 2.0, is_bed=True),
        ClipSpec("speech", 3.0),
        ClipSpec("tap", 0.1),
        ClipSpec("ringtone", 1.5),
        ClipSpec("sliding_door", 1.5),
        ClipSpec("drill", 2.0),
        ClipSpec("broadcast", 2.0),
        ClipSpec("earcon_a", 0.4),
        ClipSpec("dish_clink", 0.8),
        ClipSpec("earcon_b", 0.4),
    )
}


def parse_clip_id(clip_id: str) -> tuple[str, float | None, str | None]:
    """Split "<kind>[@<duration>][#<variant>]" into parts."""
    variant = None
    base = clip_id
    if "#" in base:
        base, variant = base.split("#", 1)
    duration = None
    if "@" in base:
        base, dur_str = base.split("@", 1)
        try:
            duration = float(dur_str)
        except ValueError:
            raise ValueError(f"clip id {clip_id!r}: bad duration suffix {dur_str!r}") from None
        if duration <= 0:
            raise ValueError(f"clip id {clip_id!r}: duration must be > 0")
    if base not in CLIP_SPECS:
        raise KeyError(f"unknown clip kind {base!r} in {clip_id!r}")
    return base, duration, variant


def _rng_for(clip_id: str, bank_seed: int) -> np.random.Generator:
    # Stable per-id stream: the id's bytes become extra seed words.
    words = [bank_seed] + list(clip_id.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(words))


def _env_attack_decay(n: int, attack: float, decay: float) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    env = np.minimum(t / max(attack, 1e-4), 1.0)
    total = n / SAMPLE_RATE
    tail = (total - t) / max(decay, 1e-4)
    return np.minimum(env, np.clip(tail, 0.0, 1.0))


def _exp_decay(n: int, time_constant: float) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    return np.exp(-t / time_constant)


def _band_noise(rng: np.random.Generator, n: int, low: float, high: float) -> np.ndarray:
    # Two passes per edge: steep enough that the band, not the leakage,
    # dominates the spectrum.
    x = rng.standard_normal(n)
    for _ in range(2):
        x = apply_filter(design_highpass(low), x)
        x = apply_filter(design_lowpass(high), x)
    return x


def _normalize(x: np.ndarray, peak: float) -> np.ndarray:
    m = np.max(np.abs(x))
    if m < 1e-12:
        return x
    return x * (peak / m)


def _tone(freq: float, n: int, phase: float = 0.0) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    return np.sin(2.0 * math.pi * freq * t + phase)


def _one_tap(rng: np.random.Generator, centre: float) -> np.ndarray:
    """A single short strike: damped tone burst plus a click transient
    band-limited around the strike pitch."""
    n = int(round(0.08 * SAMPLE_RATE))
    body = _tone(centre, n) * _exp_decay(n, 0.015)
    click = _band_noise(rng, n, centre * 0.6, min(centre * 1.8, 20000.0))
    return body + 0.25 * click * _exp_decay(n, 0.004)


def _tile_taps(rng: np.random.Generator, duration: float, centre: float) -> np.ndarray:
    """One tap at the start of every half-second slot across the duration."""
    n = int(round(duration * SAMPLE_RATE))
    out = np.zeros(n)
    count = max(1, int(math.ceil(duration / TAP_PERIOD - 1e-9)))
    for i in range(count):
        start = int(round(i * TAP_PERIOD * SAMPLE_RATE))
        tap = _one_tap(rng, centre)
        end = min(start + len(tap), n)
        if start < n:
            out[start:end] += tap[: end - start]
    return out


def _synth(kind: str, duration: float, rng: np.random.Generator) -> np.ndarray:
    n = int(round(duration * SAMPLE_RATE))
    t = np.arange(n) / SAMPLE_RATE

    if kind == "tap":
        return _tile_taps(rng, duration, 1700.0)

    if kind == "tap_on_manhole":
        # Hollow: lower strike pitch plus a ringing sub-mode.
        out = _tile_taps(rng, duration, 600.0)
        count = max(1, int(math.ceil(duration / TAP_PERIOD - 1e-9)))
        for i in range(count):
            start = int(round(i * TAP_PERIOD * SAMPLE_RATE))
            m = min(int(round(0.25 * SAMPLE_RATE)), n - start)
            if m > 0:
                ring = _tone(200.0, m) * _exp_decay(m, 0.08)
                out[start : start + m] += 0.6 * ring
        return out

    if kind == "knock":
        out = np.zeros(n)
        for i, at in enumerate((0.0, 0.22, 0.44)):
            start = int(round(at * SAMPLE_RATE))
            m = min(int(round(0.12 * SAMPLE_RATE)), n - start)
            if m <= 0:
                continue
            thump = _tone(170.0 + 8.0 * i, m) * _exp_decay(m, 0.03)
            out[start : start + m] += thump
        return out + 0.15 * _band_noise(rng, n, 80.0, 400.0) * _env_attack_decay(n, 0.005, 0.3)

    if kind == "car_pass":
        # Band noise with a slow level swell and a steady engine tone.
        noise = _band_noise(rng, n, 150.0, 1000.0)
        swell = np.sin(math.pi * np.clip(t / duration, 0.0, 1.0)) ** 2
        engine = _tone(520.0, n) * 0.3
        return (noise + engine) * swell

    if kind == "crowd_bed":
        murmur = _band_noise(rng, n, 300.0, 1800.0)
        flutter = 1.0 + 0.3 * np.sin(2.0 * math.pi * 0.7 * t + rng.uniform(0, 2 * math.pi))
        return murmur * flutter

    if kind == "speech":
        # Speech-band noise gated at a syllabic rate.
        carrier = _band_noise(rng, n, 300.0, 2600.0)
        gate = 0.5 * (1.0 + np.sign(np.sin(2.0 * math.pi * 4.0 * t + rng.uniform(0, 2 * math.pi))))
        gate = apply_filter(design_lowpass(30.0), gate)
        return carrier * np.clip(gate, 0.0, 1.0) * _env_attack_decay(n, 0.05, 0.2)

    if kind == "ringtone":
        # Alternating two-note trill with a 25 Hz warble.
        note = (np.floor(t / 0.25).astype(int) % 2).astype(float)
        freq = np.where(note > 0, 1760.0, 2093.0)
        phase = 2.0 * math.pi * np.cumsum(freq) / SAMPLE_RATE
        warble = 0.5 * (1.0 + np.sin(2.0 * math.pi * 25.0 * t))
        return np.sin(phase) * warble * _env_attack_decay(n, 0.01, 0.1)

    if kind == "sliding_door":
        # Rolling rumble that opens with a soft thunk at the end.
        roll = _band_noise(rng, n, 1800.0, 3200.0) * _env_attack_decay(n, 0.3, 0.25)
        thunk_len = min(int(round(0.1 * SAMPLE_RATE)), n)
        thunk = _tone(140.0, thunk_len) * _exp_decay(thunk_len, 0.03)
        roll[n - thunk_len :] += 0.8 * thunk
        return roll

    if kind == "drill":
        carrier = _band_noise(rng, n, 2400.0, 3800.0)
        pulse = 0.5 * (1.0 + np.sign(np.sin(2.0 * math.pi * 55.0 * t)))
        return carrier * (0.35 + 0.65 * pulse) * _env_attack_decay(n, 0.02, 0.1)

    if kind == "broadcast":
        # Band-limited chatter with the narrow, honky PA band.
        carrier = _band_noise(rng, n, 2800.0, 4200.0)
        gate = 0.5 * (1.0 + np.sign(np.sin(2.0 * math.pi * 3.0 * t + rng.uniform(0, 2 * math.pi))))
        gate = apply_filter(design_lowpass(25.0), gate)
        chime_len = min(int(round(0.3 * SAMPLE_RATE)), n)
        chime = _tone(3520.0, chime_len) * _exp_decay(chime_len, 0.1)
        out = carrier * np.clip(gate, 0.0, 1.0)
        out[:chime_len] += 0.7 * chime
        return out * _env_attack_decay(n, 0.02, 0.15)

    if kind == "earcon_a":
        # Rising two-note chime.
        half = n // 2
        a = _tone(3520.0, half) * _env_attack_decay(half, 0.01, 0.08)
        b = _tone(4699.0, n - half) * _env_attack_decay(n - half, 0.01, 0.12)
        return np.concatenate([a, b])

    if kind == "earcon_b":
        # Falling two-note chime, higher register than earcon_a.
        half = n // 2
        a = _tone(6200.0, half) * _env_attack_decay(half, 0.01, 0.08)
        b = _tone(5000.0, n - half) * _env_attack_decay(n - half, 0.01, 0.12)
        return np.concatenate([a, b])

    if kind == "dish_clink":
        out = np.zeros(n)
        for at, freq in ((0.0, 4600.0), (0.18, 5200.0)):
            start = int(round(at * SAMPLE_RATE))
            m = min(int(round(0.3 * SAMPLE_RATE)), n - start)
            if m <= 0:
                continue
            out[start : start + m] += _tone(freq, m) * _exp_decay(m, 0.04)
        return out

    raise KeyError(f"unknown clip kind {kind!r}")


def spectral_centroid(x: np.ndarray, sample_rate: int = SAMPLE_RATE) -> float:
    """Power-weighted mean frequency in Hz."""
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x), d=1.0 / sample_rate)
    total = power.sum()
    if total < 1e-24:
        return 0.0
    return float((freqs * power).sum() / total)


class ClipBank:
    """Resolves clip ids to audio, caching synthesized results.

    Resolution order: a loaded file matching the full id, a loaded file
    matching the kind (trimmed or padded to the requested duration), then
    deterministic synthesis from the bank seed.
    """

    def __init__(self, seed: int, assets_dir: str | None = None):
        self.seed = seed
        self._cache: dict[str, AudioClip] = {}
        self._files: dict[str, np.ndarray] = {}
        if assets_dir is None:
            assets_dir = os.environ.get("MIXSCAPE_ASSETS")
        if assets_dir:
            self._load_dir(assets_dir)

    def _load_dir(self, path: str) -> None:
        if not os.path.isdir(path):
            raise FileNotFoundError(f"assets directory {path!r} does not exist")
        for name in sorted(os.listdir(path)):
            if not name.endswith(".wav"):
                continue
            self._files[name[:-4]] = _read_wav_mono(os.path.join(path, name))

    def get(self, clip_id: str) -> AudioClip:
        if clip_id in self._cache:
            return self._cache[clip_id]
        kind, duration, _variant = parse_clip_id(clip_id)
        spec = CLIP_SPECS[kind]
        want = duration if duration is not None else spec.default_duration

        if clip_id in self._files:
            samples = self._files[clip_id]
        elif kind in self._files:
            samples = _fit_length(self._files[kind], int(round(want * SAMPLE_RATE)))
        else:
            rng = _rng_for(clip_id, self.seed)
            samples = _synth(kind, want, rng)
            samples = _normalize(samples, BED_NORM if spec.is_bed else PEAK_NORM)

        clip = AudioClip(id=clip_id, samples=samples, channels=1)
        self._cache[clip_id] = clip
        return clip


def _fit_length(x: np.ndarray, n: int) -> np.ndarray:
    if len(x) >= n:
        return x[:n].copy()
    return np.concatenate([x, np.zeros(n - len(x))])


def _read_wav_mono(path: str) -> np.ndarray:
    with wave.open(path, "rb") as wf:
        if wf.getsampwidth() != 2:
            raise ValueError(f"{path}: only 16-bit PCM supported")
        if wf.getframerate() != SAMPLE_RATE:
            raise ValueError(f"{path}: sample rate must be {SAMPLE_RATE}")
        raw = wf.readframes(wf.getnframes())
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32767.0
        channels = wf.getnchannels()
    if channels == 2:
        data = 0.5 * (data[0::2] + data[1::2])
    elif channels != 1:
        raise ValueError(f"{path}: expected mono or stereo")
    return data


def export_default_bank(out_dir: str, seed: int) -> list[str]:
    """Write every kind's default clip as a WAV; returns the paths."""
    from .render import write_wav_mono

    os.makedirs(out_dir, exist_ok=True)
    bank = ClipBank(seed)
    paths = []
    for kind in sorted(CLIP_SPECS):
        clip = bank.get(kind)
        path = os.path.join(out_dir, f"{kind}.wav")
        write_wav_mono(path, clip.samples)
        paths.append(path)
    return paths
