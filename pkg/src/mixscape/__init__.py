"""Deterministic mixed-reality soundscape renderer and study toolkit."""

from .model import (
    SAMPLE_RATE,
    AudioClip,
    Ear,
    EarChannel,
    EarconAttachment,
    HighPass,
    ListenerPath,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    PitchScale,
    Scene,
    SoundCategory,
    SoundEvent,
    SoundSource,
    Spatial,
    Telephone,
    Timeline,
    TimelineEntry,
    TimeShiftConfig,
    TransparencyParams,
    Vec3,
    Waypoint,
)

__all__ = [
    "SAMPLE_RATE",
    "AudioClip",
    "Ear",
    "EarChannel",
    "EarconAttachment",
    "HighPass",
    "ListenerPath",
    "LowPass",
    "ManipulationPlan",
    "OnEvent",
    "OnProximity",
    "PitchScale",
    "Scene",
    "SoundCategory",
    "SoundEvent",
    "SoundSource",
    "Spatial",
    "Telephone",
    "Timeline",
    "TimelineEntry",
    "TimeShiftConfig",
    "TransparencyParams",
    "Vec3",
    "Waypoint",
]

__version__ = "0.1.0"
