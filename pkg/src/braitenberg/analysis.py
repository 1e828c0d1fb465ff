"""Golden-table regression, circuit metrics and trajectory properties."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .actuation import WheelCommand
from .perception import ClassifierConfig, MotionClass, StimulusEpisode, classify_window, default_templates
from .snn import OUTPUT_LABELS, ActivationTable, SpikingCircuit, raster, run_episode

__all__ = [
    "ActivationTable", "PropertyResult", "PropertyReport", "GOLDEN_ACTIVATIONS", "TABULATED_SIGMA",
    "table_regression", "cumulative_potential", "seizure_check", "behavior_properties",
    "decision_classes", "radial_speeds", "mean_speeds",
]

# Spike counts per episode for neurons 1-7 and A-D (blank cells are 0).
GOLDEN_ACTIVATIONS: dict[MotionClass, dict[str, int]] = {
    MotionClass.RLD: {"2": 1, "4": 1, "7": 1, "A": 1, "D": 1},
    MotionClass.RLS: {"1": 1, "2": 1, "5": 1, "7": 1, "B": 1, "D": 1},
    MotionClass.RLA: {"1": 2, "2": 1, "5": 2, "6": 1, "7": 1, "A": 1, "B": 2, "C": 1, "D": 1},
    MotionClass.LRD: {"2": 1, "3": 1, "4": 1, "7": 1, "A": 1, "D": 1},
    MotionClass.LRS: {"3": 1, "4": 1, "6": 1, "A": 1, "C": 1},
    MotionClass.LRA: {"1": 1, "3": 1, "4": 1, "5": 1, "6": 2, "A": 1, "B": 1, "C": 2},
}
TABLE_NEURONS = ("1", "2", "3", "4", "5", "6", "7") + OUTPUT_LABELS

# Tabulated cumulative-potential column. Only the first, second, fourth and
# fifth rows equal the row sums; see cumulative_potential.
TABULATED_SIGMA = {MotionClass.RLD: 5, MotionClass.RLS: 6, MotionClass.RLA: 6,
                   MotionClass.LRD: 6, MotionClass.LRS: 5, MotionClass.LRA: 6}

ESCAPE_MARGIN = 0.10
CAUTION_MARGIN = 0.10
REALIGN_DEGREES = 30.0
REALIGN_WINDOWS = 3


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    measured: str
    tolerance: str

    def line(self) -> str:
        return f"{self.name},{'pass' if self.passed else 'fail'},{self.measured},{self.tolerance}"


@dataclass
class PropertyReport:
    results: list[PropertyResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, measured: str, tolerance: str = "exact"):
        if any(r.name == name for r in self.results):
            raise ValueError(f"property {name!r} already reported")
        self.results.append(PropertyResult(name, bool(passed), measured, tolerance))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> PropertyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.results)

    def lines(self) -> str:
        return "\n".join(r.line() for r in self.results) + "\n"

    def render(self) -> str:
        width = max((len(r.name) for r in self.results), default=0)
        out = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.measured}  (tolerance: {r.tolerance})"
               for r in self.results]
        out.append(f"{sum(r.passed for r in self.results)}/{len(self.results)} properties pass")
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# circuit-level checks

def table_regression(circuit: SpikingCircuit, templates: Mapping[MotionClass, StimulusEpisode] | None = None) -> PropertyReport:
    """Run every canonical episode and compare all 11 counts to the golden table."""
    templates = templates or default_templates()
    report = PropertyReport()
    for motion, expected in GOLDEN_ACTIVATIONS.items():
        try:
            got = run_episode(circuit, templates[motion])
        except ValueError as exc:
            report.add(motion.name, False, f"error: {exc}")
            continue
        mismatches = []
        for nid in TABLE_NEURONS:
            want = expected.get(nid, 0)
            have = got[nid] if nid in got.counts else None
            if have != want:
                mismatches.append(f"{nid}={'missing' if have is None else have}(want {want})")
        measured = " ".join(mismatches) if mismatches else "all 11 counts match"
        report.add(motion.name, not mismatches, measured, "exact")
    return report


def cumulative_potential(table: ActivationTable | Mapping[str, int]) -> int:
    """Sum of all spike counts in the row."""
    counts = table.counts if isinstance(table, ActivationTable) else table
    return sum(counts.values())


def seizure_check(circuit: SpikingCircuit, episode: StimulusEpisode, budget: int) -> PropertyReport:
    """Pass iff no tick has more than ``budget`` neurons firing together."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    frames = raster(circuit, episode)
    sizes = [len(f) for f in frames]
    peak = max(sizes, default=0)
    peak_tick = episode.start + sizes.index(peak) if sizes else episode.start
    report = PropertyReport()
    report.add("seizure", peak <= budget, f"peak={peak}@tick{peak_tick}", f"<= {budget} per tick")
    return report


def peak_activity(circuit: SpikingCircuit, episode: StimulusEpisode) -> tuple[int, int]:
    """(peak simultaneous spikes, tick of the first peak)."""
    frames = raster(circuit, episode)
    sizes = [len(f) for f in frames]
    peak = max(sizes, default=0)
    return peak, episode.start + (sizes.index(peak) if sizes else 0)


# ---------------------------------------------------------------------------
# trajectory properties

def _arrays(log):
    P = np.array([[r.xv, r.yv] for r in log.records], dtype=float).reshape(-1, 2)
    M = np.array([[r.xm, r.ym] for r in log.records], dtype=float).reshape(-1, 2)
    return P, M


def radial_speeds(log, window: int, start: int, end: int) -> tuple[float, float]:
    """Mean radial speeds over ticks ``[start, end)`` by central differences.

    Returns (vehicle speed away from the mate, mate speed toward the vehicle);
    both are signed. The difference step is ``window`` ticks each side, so
    only ticks with a full stencil inside the log contribute.
    """
    P, M = _arrays(log)
    n = len(P)
    idx = np.arange(max(start, window), min(end, n - window))
    if idx.size == 0:
        raise ValueError(f"phase [{start}, {end}) has no tick with a full {window}-tick stencil")
    vv = (P[idx + window] - P[idx - window]) / (2 * window)
    vm = (M[idx + window] - M[idx - window]) / (2 * window)
    u = P[idx] - M[idx]
    norm = np.linalg.norm(u, axis=1)
    u = u / np.where(norm > 0, norm, 1.0)[:, None]
    return float(np.mean(np.sum(vv * u, axis=1))), float(np.mean(np.sum(vm * u, axis=1)))


def mean_speeds(log, window: int, start: int, end: int) -> tuple[float, float]:
    """Mean speed magnitudes (vehicle, mate) over ``[start, end)``, same stencil as :func:`radial_speeds`."""
    P, M = _arrays(log)
    idx = np.arange(max(start, window), min(end, len(P) - window))
    if idx.size == 0:
        raise ValueError(f"phase [{start}, {end}) has no tick with a full {window}-tick stencil")
    vv = np.linalg.norm((P[idx + window] - P[idx - window]) / (2 * window), axis=1)
    vm = np.linalg.norm((M[idx + window] - M[idx - window]) / (2 * window), axis=1)
    return float(vv.mean()), float(vm.mean())


def decision_classes(log, classifier: ClassifierConfig) -> dict[int, MotionClass | None]:
    """Motion class perceived at each control tick, recomputed from the logged geometry."""
    from .sim import VehicleState, sense

    w = classifier.window
    history = [(r.t, r.xm, r.ym) for r in log.records]
    out = {}
    for i, r in enumerate(log.records):
        if r.t % w:
            continue
        samples = sense(VehicleState(r.xv, r.yv, r.theta), history[: i + 1], w)
        out[r.t] = classify_window(samples, classifier) if samples else None
    return out


def _bearing(r) -> float:
    dx, dy = r.xm - r.xv, r.ym - r.yv
    return math.atan2(-math.sin(r.theta) * dx + math.cos(r.theta) * dy, math.cos(r.theta) * dx + math.sin(r.theta) * dy)


def behavior_properties(log, scenario, classifier: ClassifierConfig | None = None) -> PropertyReport:
    """Evaluate the checks the scenario declares (or all that apply).

    ``escape``: during the ``approach`` phase the vehicle's mean speed away
    from the mate beats the mate's closing speed by 10%. ``caution``: during
    the ``retreat`` phase the vehicle's mean speed toward the mate stays 10%
    below the mate's receding speed. ``retreat_rule``: every control tick that
    perceives an approach class issues L-R-. ``following``: within three
    windows of the ``direction_change`` event the mate is within 30 degrees of
    the vehicle's heading, and the final distance is below the initial one.
    ``coverage``: all six classes are perceived at some control tick.
    """
    if not log.records:
        raise ValueError("empty log")
    classifier = classifier or scenario.classifier or ClassifierConfig()
    w = classifier.window
    n = len(log.records)
    for name, (a, b) in scenario.phases.items():
        if not 0 <= a < b <= n:
            raise ValueError(f"phase {name!r} [{a}, {b}) outside log range [0, {n})")
    for name, t in scenario.events.items():
        if not 0 <= t < n:
            raise ValueError(f"event {name!r} at tick {t} outside log range [0, {n})")

    checks = list(scenario.checks)
    if not checks:
        checks = [c for c, ok in (("escape", "approach" in scenario.phases), ("caution", "retreat" in scenario.phases),
                                  ("retreat_rule", True), ("following", "direction_change" in scenario.events))
                  if ok]
    report = PropertyReport()
    classes = None
    for check in checks:
        if check == "escape":
            away, closing = radial_speeds(log, w, *scenario.phases["approach"])
            sv, sm = mean_speeds(log, w, *scenario.phases["approach"])
            ok = closing > 0 and away >= (1 + ESCAPE_MARGIN) * closing
            report.add("escape", ok, f"vehicle_away={away:.4f};mate_closing={closing:.4f};"
                       f"vehicle_speed={sv:.4f};mate_speed={sm:.4f}",
                       f"mate_closing > 0 and vehicle_away >= {1 + ESCAPE_MARGIN:.2f}*mate_closing")
        elif check == "caution":
            away, closing = radial_speeds(log, w, *scenario.phases["retreat"])
            sv, sm = mean_speeds(log, w, *scenario.phases["retreat"])
            toward, receding = -away, -closing
            ok = receding > 0 and toward <= (1 - CAUTION_MARGIN) * receding
            report.add("caution", ok, f"vehicle_toward={toward:.4f};mate_receding={receding:.4f};"
                       f"vehicle_speed={sv:.4f};mate_speed={sm:.4f}",
                       f"mate_receding > 0 and vehicle_toward <= {1 - CAUTION_MARGIN:.2f}*mate_receding")
        elif check == "retreat_rule":
            classes = classes or decision_classes(log, classifier)
            by_t = {r.t: r for r in log.records}
            hits = [t for t, c in classes.items() if c is not None and c.approaching]
            bad = [t for t in hits if by_t[t].cmd != WheelCommand.RETREAT]
            report.add("retreat_rule", not bad, f"approach_ticks={len(hits)};violations={len(bad)}",
                       "every approach tick issues L-R-")
        elif check == "following":
            tc = scenario.events["direction_change"]
            horizon = [r for r in log.records if tc <= r.t <= tc + REALIGN_WINDOWS * w]
            aligned = [r.t for r in horizon if abs(math.degrees(_bearing(r))) <= REALIGN_DEGREES]
            first, last = log.records[0], log.records[-1]
            d0 = math.hypot(first.xm - first.xv, first.ym - first.yv)
            d1 = math.hypot(last.xm - last.xv, last.ym - last.yv)
            latency = aligned[0] - tc if aligned else None
            ok = bool(aligned) and d1 < d0
            report.add("following", ok, f"realign_latency={latency};initial_distance={d0:.3f};final_distance={d1:.3f}",
                       f"|bearing|<={REALIGN_DEGREES:g}deg within {REALIGN_WINDOWS} windows; final<initial")
        elif check == "coverage":
            classes = classes or decision_classes(log, classifier)
            seen = {c for c in classes.values() if c is not None}
            missing = [m.name for m in MotionClass if m not in seen]
            report.add("coverage", not missing, f"seen={'/'.join(m.name for m in MotionClass if m in seen)}"
                       + (f";missing={'/'.join(missing)}" if missing else ""), "all six classes")
        else:
            raise ValueError(f"unknown check {check!r}")
    return report
