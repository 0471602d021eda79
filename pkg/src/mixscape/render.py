"""Mix compiled directives into a stereo 16-bit WAV at the engine rate.

Signal path per directive: clip lookup, optional pitch resample, the
transparency high-pass, the style filter chain, then level and placement.
Spatial placements get inverse-distance gain and equal-power panning from
the listener's pose at the directive onset; rear sources fold onto the
front arc with a fixed attenuation. Ear-channel placements use fixed
per-ear gains. Event duration is a scheduling concept: the clip decides
how many samples actually play.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

from .assets import ClipBank
from .dsp import (
    StereoBuffer,
    apply_chain,
    azimuth_from,
    design_highpass,
    design_lowpass,
    distance_gain,
    ear_gains,
    fold_rear,
    pan_equal_power,
    resample_ratio,
)
from .manipulate import CompileResult, RenderDirective, compile_directives
from .model import (
    SAMPLE_RATE,
    EarChannel,
    HighPass,
    LowPass,
    ManipulationPlan,
    Scene,
    Spatial,
    Telephone,
    Timeline,
)


@dataclass(frozen=True)
class RenderResult:
    pcm: np.ndarray  # int16, shape (n, 2)
    timeline: Timeline
    report: dict


def _filter_chain(directive: RenderDirective) -> list:
    chain = []
    if directive.transparency_cutoff is not None and directive.transparency_cutoff > 0:
        chain.append(design_highpass(directive.transparency_cutoff))
    style = directive.style
    if isinstance(style, LowPass):
        chain.append(design_lowpass(style.cutoff))
    elif isinstance(style, HighPass):
        chain.append(design_highpass(style.cutoff))
    elif isinstance(style, Telephone):
        chain.append(design_highpass(style.low))
        chain.append(design_lowpass(style.high))
    return chain


def mix_scene(
    scene: Scene, plan: ManipulationPlan, bank: ClipBank | None = None
) -> tuple[StereoBuffer, CompileResult, dict]:
    """Float accumulation stage: buffer, compiled result, per-label counts.

    Pure summation, so mixing any partition of the directives into separate
    buffers and adding those equals mixing everything at once.
    """
    if bank is None:
        bank = ClipBank(scene.seed)
    compiled = compile_directives(scene, plan)
    buffer = StereoBuffer.silence(int(round(scene.duration * SAMPLE_RATE)))

    counts = {"event": 0, "bed": 0, "earcon": 0}
    for d in compiled.directives:
        mono = bank.get(d.clip).mono()
        if d.pitch_ratio is not None:
            mono = resample_ratio(mono, d.pitch_ratio)
        chain = _filter_chain(d)
        if chain:
            mono = apply_chain(chain, mono)

        if isinstance(d.placement, Spatial):
            pos, yaw = scene.listener.at(d.onset)
            az = azimuth_from(pos, yaw, d.placement.position)
            az, rear_gain = fold_rear(az)
            gl, gr = pan_equal_power(az)
            dist = (d.placement.position - pos).norm()
            g = d.gain * rear_gain * distance_gain(dist)
        else:
            assert isinstance(d.placement, EarChannel)
            gl, gr = ear_gains(d.placement.channel)
            g = d.gain

        start = int(round(d.onset * SAMPLE_RATE))
        buffer.mix_into(start, mono, g * gl, g * gr)
        counts[d.label.split(":", 1)[0]] += 1
    return buffer, compiled, counts


def render(scene: Scene, plan: ManipulationPlan, bank: ClipBank | None = None) -> RenderResult:
    buffer, compiled, counts = mix_scene(scene, plan, bank)
    peak = float(max(np.max(np.abs(buffer.left)), np.max(np.abs(buffer.right)), 0.0))
    pcm, clipped = buffer.finalize()
    dropped = sum(1 for e in compiled.timeline.entries if e.dropped)
    report = {
        "scene_id": scene.id,
        "duration_seconds": scene.duration,
        "n_samples": int(len(pcm)),
        "sample_rate": SAMPLE_RATE,
        "events_rendered": counts["event"],
        "beds_rendered": counts["bed"],
        "earcons_rendered": counts["earcon"],
        "events_dropped": dropped,
        "clipped_samples": clipped,
        "peak_level": round(peak, 6),
    }
    return RenderResult(pcm=pcm, timeline=compiled.timeline, report=report)


def write_wav(path: str, pcm: np.ndarray) -> None:
    """Stereo interleaved int16 frames to a standard 16-bit PCM WAV."""
    if pcm.dtype != np.int16 or pcm.ndim != 2 or pcm.shape[1] != 2:
        raise ValueError("expected int16 frames of shape (n, 2)")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(2)
        wf.setsampwidth(2)
        wf.setframerate(SAMPLE_RATE)
        wf.writeframes(pcm.astype("<i2").tobytes())


def write_wav_mono(path: str, samples: np.ndarray) -> None:
    pcm = np.rint(np.clip(samples, -1.0, 1.0) * 32767).astype("<i2")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(SAMPLE_RATE)
        wf.writeframes(pcm.tobytes())


def read_wav(path: str) -> tuple[np.ndarray, int]:
    """Stereo or mono PCM back as float frames in [-1, 1]."""
    with wave.open(path, "rb") as wf:
        if wf.getsampwidth() != 2:
            raise ValueError(f"{path}: only 16-bit PCM supported")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32767.0
        if wf.getnchannels() == 2:
            data = data.reshape(-1, 2)
        else:
            data = data.reshape(-1, 1)
    return data, rate
