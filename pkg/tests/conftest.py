import numpy as np
import pytest

from mixscape.model import (
    Ear,
    EarChannel,
    ListenerPath,
    Scene,
    SoundCategory,
    SoundEvent,
    SoundSource,
    Spatial,
    Vec3,
    Waypoint,
)


def static_listener() -> ListenerPath:
    return ListenerPath((Waypoint(0.0, Vec3(0.0, 0.0, 0.0), 0.0),))


def make_source(
    sid: str,
    clip: str = "tap@0.1",
    category: SoundCategory = SoundCategory.REAL_WORLD,
    position: Vec3 | None = None,
    ear: Ear | None = None,
    key: int | None = None,
) -> SoundSource:
    if ear is not None:
        placement = EarChannel(ear)
    else:
        placement = Spatial(position if position is not None else Vec3(0.0, 0.0, 1.0))
    return SoundSource(sid, clip, category, placement, key)


def make_scene(
    sources,
    events,
    beds=(),
    duration: float = 30.0,
    seed: int = 0,
    listener: ListenerPath | None = None,
    scene_id: str = "test-scene",
) -> Scene:
    return Scene(
        id=scene_id,
        duration=duration,
        seed=seed,
        sources=tuple(sources),
        ambient_beds=tuple(beds),
        events=tuple(events),
        listener=listener if listener is not None else static_listener(),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)


def sine(freq: float, seconds: float, rate: int = 48000) -> np.ndarray:
    t = np.arange(int(round(seconds * rate))) / rate
    return np.sin(2.0 * np.pi * freq * t)
