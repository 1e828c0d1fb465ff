"""Relative-motion classification and stimulus encoding.

The mate's observed positions over a window are reduced to one of six motion
classes (horizontal direction x radial quality), and the class selects a
canonical spike-train template for the perception circuit.

Frame conventions: bearings are measured in the vehicle frame, positive to
the vehicle's left. The lateral coordinate is positive to the vehicle's right,
so a mate moving from right to left has negative lateral velocity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from ._textfmt import ParseError, read_lines


class MotionClass(enum.Enum):
    RLD = ("RL", "D")
    RLS = ("RL", "S")
    RLA = ("RL", "A")
    LRD = ("LR", "D")
    LRS = ("LR", "S")
    LRA = ("LR", "A")

    @property
    def horizontal(self) -> str:
        return self.value[0]

    @property
    def radial(self) -> str:
        return self.value[1]

    @property
    def approaching(self) -> bool:
        return self.radial == "A"

    def mirrored(self) -> "MotionClass":
        return MotionClass(("LR" if self.horizontal == "RL" else "RL", self.radial))

    @classmethod
    def of(cls, horizontal: str, radial: str) -> "MotionClass":
        return cls((horizontal, radial))

    @classmethod
    def parse(cls, name: str) -> "MotionClass":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown motion class {name!r}") from None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StimulusEpisode:
    """Spike trains per input channel. Ticks lie in ``[start, start + duration)``."""

    duration: int
    trains: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    start: int = 0
    label: str | None = None

    __hash__ = None

    def __post_init__(self):
        for ch, ticks in self.trains.items():
            if list(ticks) != sorted(ticks):
                raise ValueError(f"spike train for {ch!r} is not sorted")
            for t in ticks:
                if not self.start <= t < self.start + self.duration:
                    raise ValueError(f"spike at tick {t} on {ch!r} outside [{self.start}, {self.start + self.duration})")

    def shifted(self, offset: int) -> "StimulusEpisode":
        trains = {ch: tuple(t + offset for t in ticks) for ch, ticks in self.trains.items()}
        return replace(self, trains=trains, start=self.start + offset)

    def without(self, channel: str, tick: int) -> "StimulusEpisode":
        trains = dict(self.trains)
        trains[channel] = tuple(t for t in trains[channel] if t != tick)
        return replace(self, trains=trains)

    @property
    def spike_count(self) -> int:
        return sum(len(v) for v in self.trains.values())


def empty_episode(start: int = 0, duration: int = 1) -> StimulusEpisode:
    return StimulusEpisode(duration, {}, start)


@dataclass(frozen=True)
class RelativeSample:
    t: int
    bearing: float
    range: float

    @property
    def lateral(self) -> float:
        return -self.range * math.sin(self.bearing)

    @property
    def forward(self) -> float:
        return self.range * math.cos(self.bearing)


@dataclass(frozen=True)
class ClassifierConfig:
    window: int = 8
    eps_h: float = 0.05  # length units per tick
    eps_r: float = 0.05


# ---------------------------------------------------------------------------
# templates

def parse_templates(text: str, source: str = "<string>") -> dict[MotionClass, StimulusEpisode]:
    out: dict[MotionClass, StimulusEpisode] = {}
    for line in read_lines(text, source):
        if line.section:
            raise line.error("templates files have no sections", 0, source)
        try:
            cls = MotionClass.parse(line.tokens[0])
        except ValueError as exc:
            raise line.error(str(exc), 0, source) from None
        if cls in out:
            raise line.error(f"duplicate template for {cls}", 0, source)
        if len(line.tokens) < 2 or not line.tokens[1].isdigit():
            raise line.error("expected: class duration channel:ticks ...", 1, source)
        trains = {}
        for i, tok in enumerate(line.tokens[2:], start=2):
            ch, _, ticks = tok.partition(":")
            try:
                trains[ch] = tuple(int(t) for t in ticks.split(","))
            except ValueError:
                raise line.error(f"malformed spike train {tok!r}", i, source) from None
        try:
            out[cls] = StimulusEpisode(int(line.tokens[1]), trains, 0, cls.name)
        except ValueError as exc:
            raise line.error(str(exc), 0, source) from None
    missing = [c.name for c in MotionClass if c not in out]
    if missing:
        raise ParseError(f"missing template(s): {', '.join(missing)}", 0, 0, source)
    return out


def serialize_templates(templates: Mapping[MotionClass, StimulusEpisode]) -> str:
    lines = ["# class  duration  channel:tick[,tick...]"]
    for cls in MotionClass:
        ep = templates[cls]
        trains = "  ".join(f"{ch}:{','.join(map(str, ticks))}" for ch, ticks in ep.trains.items())
        lines.append(f"{cls.name}  {ep.duration}  {trains}".rstrip())
    return "\n".join(lines) + "\n"


def load_templates(path) -> dict[MotionClass, StimulusEpisode]:
    path = Path(path)
    return parse_templates(path.read_text(), str(path))


_default_templates: dict[MotionClass, StimulusEpisode] | None = None


def default_templates() -> dict[MotionClass, StimulusEpisode]:
    global _default_templates
    if _default_templates is None:
        from .circuits import data_path
        _default_templates = load_templates(data_path("opportunist.templates"))
    return _default_templates


def template(cls: MotionClass, templates: Mapping[MotionClass, StimulusEpisode] | None = None) -> StimulusEpisode:
    return (templates or default_templates())[cls]


# ---------------------------------------------------------------------------
# classification

def classify_window(samples: Sequence[RelativeSample], config: ClassifierConfig = ClassifierConfig()) -> MotionClass | None:
    """Class of the mate's motion over the window, or None without lateral motion.

    Uses the mean lateral and range velocities between the first and last
    sample; ``eps_h`` and ``eps_r`` are dead-bands in length units per tick.
    """
    if len(samples) < 2:
        raise ValueError(f"need at least 2 samples, got {len(samples)}")
    for a, b in zip(samples, samples[1:]):
        if b.t <= a.t:
            raise ValueError(f"sample ticks must strictly increase ({a.t} then {b.t})")
    first, last = samples[0], samples[-1]
    span = last.t - first.t
    v_lat = (last.lateral - first.lateral) / span
    v_rng = (last.range - first.range) / span
    if abs(v_lat) <= config.eps_h:
        return None
    horizontal = "RL" if v_lat < 0 else "LR"
    if abs(v_rng) <= config.eps_r:
        radial = "S"
    else:
        radial = "A" if v_rng < 0 else "D"
    return MotionClass.of(horizontal, radial)


def encode(samples: Sequence[RelativeSample], config: ClassifierConfig = ClassifierConfig(),
           templates: Mapping[MotionClass, StimulusEpisode] | None = None) -> StimulusEpisode:
    cls = classify_window(samples, config)
    start = samples[0].t
    if cls is None:
        return empty_episode(start)
    return template(cls, templates).shifted(start)
