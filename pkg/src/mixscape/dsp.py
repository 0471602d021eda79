"""Audio primitives: panning, distance gain, biquad filters, resampling.

Filter coefficients follow the classic audio-EQ-cookbook formulas with
Q = 1/sqrt(2), i.e. second-order Butterworth: -3 dB at the cutoff and
about 12 dB/octave beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .model import SAMPLE_RATE, Ear

REAR_FOLD_GAIN = 0.7
MIN_DISTANCE = 1.0
PCM_FULL_SCALE = 32767


@dataclass(frozen=True)
class BiquadCoeffs:
    """Normalized (a0 == 1) second-order section."""

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float


def design_lowpass(cutoff: float, sample_rate: int = SAMPLE_RATE) -> BiquadCoeffs:
    if not 0 < cutoff < sample_rate / 2:
        raise ValueError(f"low-pass cutoff {cutoff} out of (0, {sample_rate / 2})")
    w0 = 2.0 * math.pi * cutoff / sample_rate
    q = 1.0 / math.sqrt(2.0)
    alpha = math.sin(w0) / (2.0 * q)
    cos_w0 = math.cos(w0)
    a0 = 1.0 + alpha
    return BiquadCoeffs(
        b0=(1.0 - cos_w0) / 2.0 / a0,
        b1=(1.0 - cos_w0) / a0,
        b2=(1.0 - cos_w0) / 2.0 / a0,
        a1=-2.0 * cos_w0 / a0,
        a2=(1.0 - alpha) / a0,
    )


def design_highpass(cutoff: float, sample_rate: int = SAMPLE_RATE) -> BiquadCoeffs:
    if not 0 < cutoff < sample_rate / 2:
        raise ValueError(f"high-pass cutoff {cutoff} out of (0, {sample_rate / 2})")
    w0 = 2.0 * math.pi * cutoff / sample_rate
    q = 1.0 / math.sqrt(2.0)
    alpha = math.sin(w0) / (2.0 * q)
    cos_w0 = math.cos(w0)
    a0 = 1.0 + alpha
    return BiquadCoeffs(
        b0=(1.0 + cos_w0) / 2.0 / a0,
        b1=-(1.0 + cos_w0) / a0,
        b2=(1.0 + cos_w0) / 2.0 / a0,
        a1=-2.0 * cos_w0 / a0,
        a2=(1.0 - alpha) / a0,
    )


def apply_filter(coeffs: BiquadCoeffs | None, x: np.ndarray) -> np.ndarray:
    """Run one biquad over x from zero initial state. None is bypass."""
    if coeffs is None:
        return x
    b = [coeffs.b0, coeffs.b1, coeffs.b2]
    a = [1.0, coeffs.a1, coeffs.a2]
    return lfilter(b, a, x)


def apply_chain(chain: list[BiquadCoeffs], x: np.ndarray) -> np.ndarray:
    for coeffs in chain:
        x = apply_filter(coeffs, x)
    return x


def pan_equal_power(azimuth: float) -> tuple[float, float]:
    """Constant-power stereo gains for azimuth in [-pi/2, +pi/2].

    -pi/2 is hard left, 0 is center, +pi/2 is hard right.
    gL^2 + gR^2 == 1 for every azimuth.
    """
    if not -math.pi / 2 - 1e-12 <= azimuth <= math.pi / 2 + 1e-12:
        raise ValueError(f"azimuth {azimuth} out of [-pi/2, pi/2]")
    theta = (azimuth + math.pi / 2) / 2.0
    return math.cos(theta), math.sin(theta)


def fold_rear(azimuth: float) -> tuple[float, float]:
    """Map a full-circle azimuth into the frontal pan range.

    Angles beyond +-pi/2 mirror onto the same side of the front arc and
    carry a fixed attenuation so rear sources sound duller. Returns
    (front_azimuth, gain).
    """
    az = math.remainder(azimuth, 2.0 * math.pi)
    if -math.pi / 2 <= az <= math.pi / 2:
        return az, 1.0
    folded = math.copysign(math.pi - abs(az), az)
    return folded, REAR_FOLD_GAIN


def azimuth_from(listener_pos, listener_yaw: float, source_pos) -> float:
    """Horizontal angle of the source in listener frame; 0 is dead ahead,
    positive is to the listener's right. Overhead sources count as ahead."""
    dx = source_pos.x - listener_pos.x
    dz = source_pos.z - listener_pos.z
    if abs(dx) < 1e-12 and abs(dz) < 1e-12:
        return 0.0
    world = math.atan2(dx, dz)
    return math.remainder(world - listener_yaw, 2.0 * math.pi)


def distance_gain(distance: float, min_distance: float = MIN_DISTANCE) -> float:
    """Inverse-distance rolloff, clamped so gain never exceeds 1."""
    return min_distance / max(distance, min_distance)


def resample_ratio(x: np.ndarray, ratio: float) -> np.ndarray:
    """Linear-interpolation resample; ratio > 1 shortens and raises pitch.

    Output index i reads input position i * ratio. Length is
    round(len(x) / ratio).
    """
    if not 0.25 <= ratio <= 4.0:
        raise ValueError(f"pitch ratio {ratio} out of [0.25, 4]")
    if ratio == 1.0:
        return x.copy()
    n_out = int(round(len(x) / ratio))
    positions = np.arange(n_out) * ratio
    return np.interp(positions, np.arange(len(x)), x)


def ear_gains(ear: Ear) -> tuple[float, float]:
    if ear is Ear.LEFT:
        return 1.0, 0.0
    if ear is Ear.RIGHT:
        return 0.0, 1.0
    g = math.sqrt(2.0) / 2.0
    return g, g


@dataclass
class StereoBuffer:
    """Accumulation buffer; grows on demand when events overrun the end."""

    left: np.ndarray
    right: np.ndarray

    @classmethod
    def silence(cls, n_samples: int) -> "StereoBuffer":
        return cls(np.zeros(n_samples), np.zeros(n_samples))

    @property
    def n_samples(self) -> int:
        return len(self.left)

    def _grow(self, n: int) -> None:
        if n > len(self.left):
            pad = np.zeros(n - len(self.left))
            self.left = np.concatenate([self.left, pad])
            self.right = np.concatenate([self.right, pad])

    def mix_into(self, start_sample: int, mono: np.ndarray, gain_l: float, gain_r: float) -> None:
        if start_sample < 0:
            raise ValueError("start_sample must be >= 0")
        end = start_sample + len(mono)
        self._grow(end)
        self.left[start_sample:end] += gain_l * mono
        self.right[start_sample:end] += gain_r * mono

    def finalize(self, master_gain: float = 1.0) -> tuple[np.ndarray, int]:
        """Interleaved int16 frames plus the count of clipped samples."""
        stacked = master_gain * np.stack([self.left, self.right], axis=1)
        clipped = int(np.count_nonzero((stacked > 1.0) | (stacked < -1.0)))
        pcm = np.rint(np.clip(stacked, -1.0, 1.0) * PCM_FULL_SCALE).astype(np.int16)
        return pcm, clipped
