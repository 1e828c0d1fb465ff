"""2D world: a differential-drive vehicle reacting to a scripted mate.

Time advances in integer ticks. Wheel speeds are in length units per tick;
each tick is integrated with explicit Euler sub-steps no longer than ``dt``.
Every ``window`` ticks the vehicle senses the mate's recent positions,
classifies the motion, runs the perception circuit on the matching template
and applies the actuation law to its wheel speeds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from ._textfmt import ParseError, fmt_float, parse_float, parse_int, read_lines
from .actuation import ActionTable, OutputBits, WheelCommand, apply
from .circuits import data_path
from .perception import ClassifierConfig, MotionClass, RelativeSample, classify_window, empty_episode, encode
from .pipeline import ControlConstants, VehicleConfig, default_config

CSV_HEADER = ("t", "xv", "yv", "theta", "xm", "ym", "vl", "vr", "a", "b", "c", "d", "cmd")


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2 * math.pi)
    if a <= 0:
        a += 2 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    vl: float = 0.0
    vr: float = 0.0
    wheelbase: float = 1.0

    def __post_init__(self):
        if self.wheelbase <= 0:
            raise ValueError("wheelbase must be positive")

    @property
    def speed(self) -> float:
        return (self.vl + self.vr) / 2

    @property
    def omega(self) -> float:
        return (self.vr - self.vl) / self.wheelbase


def integrate(state: VehicleState, dt: float) -> VehicleState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    v, w = state.speed, state.omega
    return replace(state,
                   x=state.x + v * math.cos(state.theta) * dt,
                   y=state.y + v * math.sin(state.theta) * dt,
                   theta=wrap_angle(state.theta + w * dt))


def advance_tick(state: VehicleState, dt: float) -> VehicleState:
    n = max(1, math.ceil(1.0 / dt - 1e-9))
    for _ in range(n):
        state = integrate(state, 1.0 / n)
    return state


# ---------------------------------------------------------------------------
# mate scripts

@dataclass(frozen=True)
class Waypoints:
    """Piecewise-linear path; ``speeds[i]`` applies from point i to i+1."""

    points: tuple[tuple[float, float], ...]
    speeds: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) < 1 or len(self.speeds) != len(self.points) - 1:
            raise ValueError("waypoints need one speed per segment")
        if any(s <= 0 for s in self.speeds):
            raise ValueError("segment speeds must be positive")

    def segment_times(self) -> list[float]:
        times = [0.0]
        for (p, q), s in zip(zip(self.points, self.points[1:]), self.speeds):
            times.append(times[-1] + math.dist(p, q) / s)
        return times

    def position(self, t: float) -> tuple[float, float]:
        times = self.segment_times()
        for i in range(len(self.speeds)):
            if t < times[i + 1]:
                (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
                f = (t - times[i]) / (times[i + 1] - times[i])
                return x0 + f * (x1 - x0), y0 + f * (y1 - y0)
        return self.points[-1]


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float
    angular_speed: float  # rad per tick, positive = counter-clockwise
    phase: float = 0.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def position(self, t: float) -> tuple[float, float]:
        a = self.phase + self.angular_speed * t
        return self.center[0] + self.radius * math.cos(a), self.center[1] + self.radius * math.sin(a)


@dataclass(frozen=True)
class Ray:
    origin: tuple[float, float]
    direction: float  # heading in radians
    speed: float

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be nonnegative")

    def position(self, t: float) -> tuple[float, float]:
        return (self.origin[0] + self.speed * t * math.cos(self.direction),
                self.origin[1] + self.speed * t * math.sin(self.direction))


MateScript = Waypoints | Circle | Ray


# ---------------------------------------------------------------------------
# scenarios

@dataclass(frozen=True)
class Scenario:
    name: str
    mate: MateScript
    vehicle: VehicleState
    duration: int
    dt: float = 0.05
    constants: ControlConstants | None = None
    classifier: ClassifierConfig | None = None
    phases: dict[str, tuple[int, int]] = field(default_factory=dict)
    events: dict[str, int] = field(default_factory=dict)
    checks: tuple[str, ...] = ()

    __hash__ = None

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    def control(self, config: VehicleConfig) -> tuple[ControlConstants, ClassifierConfig]:
        return self.constants or config.constants, self.classifier or config.classifier


_SCENARIO_SECTIONS = ("mate", "vehicle", "constants", "phases", "events", "checks")


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    header: dict[str, str] = {}
    mate_kind = None
    mate: dict[str, list] = {}
    vehicle: dict[str, float] = {}
    consts: dict[str, float] = {}
    phases: dict[str, tuple[int, int]] = {}
    events: dict[str, int] = {}
    checks: list[str] = []
    first_mate_line = None
    for line in read_lines(text, source, _SCENARIO_SECTIONS):
        tok = line.tokens
        sec = line.section
        if sec == "":
            if tok[0] not in ("scenario", "duration", "dt") or len(tok) != 2:
                raise line.error(f"malformed header line {line.raw.strip()!r}", 0, source)
            header[tok[0]] = tok[1]
        elif sec == "mate":
            first_mate_line = first_mate_line or line
            if tok[0] == "kind":
                mate_kind = tok[1]
            elif tok[0] in ("start", "to", "center", "radius", "angular_speed", "phase", "origin", "direction", "speed"):
                mate.setdefault(tok[0], []).append(tuple(parse_float(line, i, tok[0], source) for i in range(1, len(tok))))
            else:
                raise line.error(f"unknown mate key {tok[0]!r}", 0, source)
        elif sec == "vehicle":
            if tok[0] not in ("x", "y", "theta", "vl", "vr", "wheelbase") or len(tok) != 2:
                raise line.error(f"unknown vehicle key {tok[0]!r}", 0, source)
            vehicle[tok[0]] = parse_float(line, 1, tok[0], source)
        elif sec == "constants":
            if tok[0] in ("delta", "v_min", "v_max", "eps_h", "eps_r"):
                consts[tok[0]] = parse_float(line, 1, tok[0], source)
            elif tok[0] == "window":
                consts[tok[0]] = parse_int(line, 1, tok[0], source)
            else:
                raise line.error(f"unknown constant {tok[0]!r}", 0, source)
        elif sec == "phases":
            phases[tok[0]] = (parse_int(line, 1, "phase start", source), parse_int(line, 2, "phase end", source))
        elif sec == "events":
            events[tok[0]] = parse_int(line, 1, "event tick", source)
        elif sec == "checks":
            checks.extend(tok)

    where = first_mate_line.lineno if first_mate_line else 0
    try:
        if mate_kind == "waypoints":
            pts = mate["start"] + [p[:2] for p in mate.get("to", [])]
            script = Waypoints(tuple(pts), tuple(p[2] for p in mate.get("to", [])))
        elif mate_kind == "circle":
            script = Circle(mate["center"][0], mate["radius"][0][0], mate["angular_speed"][0][0],
                            mate.get("phase", [(0.0,)])[0][0])
        elif mate_kind == "ray":
            script = Ray(mate["origin"][0], mate["direction"][0][0], mate["speed"][0][0])
        else:
            raise ParseError(f"unknown mate kind {mate_kind!r}", where, 1, source)
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"incomplete {mate_kind} mate script: {exc}", where, 1, source) from None

    constants = classifier = None
    if any(k in consts for k in ("delta", "v_min", "v_max")):
        constants = ControlConstants(**{k: consts[k] for k in ("delta", "v_min", "v_max") if k in consts})
    if any(k in consts for k in ("window", "eps_h", "eps_r")):
        classifier = ClassifierConfig(**{k: consts[k] for k in ("window", "eps_h", "eps_r") if k in consts})
    try:
        return Scenario(header.get("scenario", ""), script, VehicleState(**vehicle), int(header.get("duration", 0)),
                        float(header.get("dt", 0.05)), constants, classifier, phases, events, tuple(checks))
    except ValueError as exc:
        raise ParseError(str(exc), 0, 0, source) from None


def serialize_scenario(sc: Scenario) -> str:
    f = fmt_float
    out = [f"scenario {sc.name}", f"duration {sc.duration}", f"dt {f(sc.dt)}", "", "[mate]"]
    m = sc.mate
    if isinstance(m, Waypoints):
        out += ["kind waypoints", f"start {f(m.points[0][0])} {f(m.points[0][1])}"]
        out += [f"to {f(p[0])} {f(p[1])} {f(s)}" for p, s in zip(m.points[1:], m.speeds)]
    elif isinstance(m, Circle):
        out += ["kind circle", f"center {f(m.center[0])} {f(m.center[1])}", f"radius {f(m.radius)}",
                f"angular_speed {f(m.angular_speed)}", f"phase {f(m.phase)}"]
    else:
        out += ["kind ray", f"origin {f(m.origin[0])} {f(m.origin[1])}", f"direction {f(m.direction)}",
                f"speed {f(m.speed)}"]
    v = sc.vehicle
    out += ["", "[vehicle]"] + [f"{k} {f(getattr(v, k))}" for k in ("x", "y", "theta", "vl", "vr", "wheelbase")]
    if sc.constants or sc.classifier:
        out += ["", "[constants]"]
        if sc.constants:
            out += [f"delta {f(sc.constants.delta)}", f"v_min {f(sc.constants.v_min)}", f"v_max {f(sc.constants.v_max)}"]
        if sc.classifier:
            out += [f"window {sc.classifier.window}", f"eps_h {f(sc.classifier.eps_h)}",
                    f"eps_r {f(sc.classifier.eps_r)}"]
    if sc.phases:
        out += ["", "[phases]"] + [f"{k} {a} {b}" for k, (a, b) in sc.phases.items()]
    if sc.events:
        out += ["", "[events]"] + [f"{k} {t}" for k, t in sc.events.items()]
    if sc.checks:
        out += ["", "[checks]"] + list(sc.checks)
    return "\n".join(out) + "\n"


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


SCENARIO_NAMES = ("suspicious", "following", "wandering")


def scenario_library() -> list[Scenario]:
    return [load_scenario(data_path(f"scenarios/{name}.scenario")) for name in SCENARIO_NAMES]


def get_scenario(name_or_path) -> Scenario:
    if str(name_or_path) in SCENARIO_NAMES:
        return load_scenario(data_path(f"scenarios/{name_or_path}.scenario"))
    path = Path(name_or_path)
    if not path.is_file():
        raise FileNotFoundError(f"no scenario {str(name_or_path)!r}; valid names: {', '.join(SCENARIO_NAMES)}")
    return load_scenario(path)


# ---------------------------------------------------------------------------
# the closed loop

def to_vehicle_frame(vehicle: VehicleState, x: float, y: float) -> tuple[float, float]:
    """Bearing (left positive) and range of a world point seen from the vehicle."""
    dx, dy = x - vehicle.x, y - vehicle.y
    c, s = math.cos(vehicle.theta), math.sin(vehicle.theta)
    fwd, left = c * dx + s * dy, -s * dx + c * dy
    return math.atan2(left, fwd), max(math.hypot(dx, dy), 1e-12)


def sense(vehicle: VehicleState, history: Sequence[tuple[int, float, float]], window: int = 8) -> list[RelativeSample]:
    """The last ``window`` mate positions expressed in the vehicle's current frame."""
    if len(history) < window:
        return []
    out = []
    for t, x, y in history[-window:]:
        bearing, rng = to_vehicle_frame(vehicle, x, y)
        out.append(RelativeSample(t, bearing, rng))
    return out


@dataclass(frozen=True)
class LogRecord:
    t: int
    xv: float
    yv: float
    theta: float
    xm: float
    ym: float
    vl: float
    vr: float
    bits: OutputBits
    cmd: WheelCommand
    motion: MotionClass | None = None
    decision: bool = False


@dataclass
class TrajectoryLog:
    records: list[LogRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow([r.t, fmt_float(r.xv), fmt_float(r.yv), fmt_float(r.theta), fmt_float(r.xm), fmt_float(r.ym),
                        fmt_float(r.vl), fmt_float(r.vr), *(int(b) for b in r.bits), r.cmd.mnemonic])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TrajectoryLog":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ValueError(f"expected CSV header {','.join(CSV_HEADER)}")
        records = []
        for row in rows[1:]:
            t = int(row[0])
            xv, yv, th, xm, ym, vl, vr = map(float, row[1:8])
            bits = OutputBits(*(v == "1" for v in row[8:12]))
            records.append(LogRecord(t, xv, yv, th, xm, ym, vl, vr, bits, WheelCommand.parse(row[12])))
        return cls(records)


def run(scenario: Scenario, config: VehicleConfig | None = None, law: ActionTable | None = None) -> TrajectoryLog:
    """Simulate the scenario; ``law`` overrides the config's action table (for ablations)."""
    config = config or default_config()
    constants, classifier = scenario.control(config)
    window = classifier.window
    evaluate = (law or config.law).evaluate

    state = scenario.vehicle
    history: list[tuple[int, float, float]] = []
    bits, cmd = OutputBits(False, False, False, False), WheelCommand.ADVANCE
    log = TrajectoryLog()
    for t in range(scenario.duration):
        xm, ym = scenario.mate.position(t)
        history.append((t, xm, ym))
        decision = t % window == 0
        motion = None
        if decision:
            samples = sense(state, history, window)
            if samples:
                motion = classify_window(samples, classifier)
                episode = encode(samples, classifier, config.templates)
            else:
                episode = empty_episode(t)
            bits = config.perceive(episode)
            cmd = evaluate(bits)
            vl, vr = apply(cmd, (state.vl, state.vr), constants.delta, constants.bounds)
            state = replace(state, vl=vl, vr=vr)
        log.records.append(LogRecord(t, state.x, state.y, state.theta, xm, ym, state.vl, state.vr,
                                     bits, cmd, motion, decision))
        state = advance_tick(state, scenario.dt)
    return log
