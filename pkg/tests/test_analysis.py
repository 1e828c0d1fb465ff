from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from braitenberg.actuation import ActionTable, WheelCommand
from braitenberg.analysis import (GOLDEN_ACTIVATIONS, TABULATED_SIGMA, PropertyReport, behavior_properties,
                                  cumulative_potential, mean_speeds, seizure_check, table_regression)
from braitenberg.circuits import build_opportunist
from braitenberg.perception import MotionClass, default_templates, template
from braitenberg.sim import TrajectoryLog, get_scenario, run
from braitenberg.snn import CircuitState, Neuron, SpikingCircuit, settle_ticks, step

from conftest import GOLDEN

ABLATED = ActionTable((), WheelCommand.ADVANCE)


def test_shipped_circuit_passes_regression():
    report = table_regression(build_opportunist())
    assert report.passed
    assert [r.name for r in report.results] == [m.name for m in MotionClass]


def test_mutation_neuron_4_threshold():
    c = build_opportunist()
    neurons = tuple(Neuron(n.id, n.threshold + 1, n.kind) if n.id == "4" else n for n in c.neurons)
    report = table_regression(replace(c, neurons=neurons))
    assert not report["RLD"].passed
    assert "4=0(want 1)" in report["RLD"].measured


def test_empty_circuit_fails_every_row():
    report = table_regression(SpikingCircuit(()))
    assert not any(r.passed for r in report.results)
    assert len(report.results) == 6


def test_regression_order_independent():
    templates = dict(reversed(list(default_templates().items())))
    a = {r.name: r.passed for r in table_regression(build_opportunist(), templates).results}
    b = {r.name: r.passed for r in table_regression(build_opportunist()).results}
    assert a == b


PINNED_SIGMA = {MotionClass.RLD: 5, MotionClass.RLS: 6, MotionClass.RLA: 12,
                MotionClass.LRD: 6, MotionClass.LRS: 5, MotionClass.LRA: 10}


@pytest.mark.parametrize("motion", list(MotionClass), ids=str)
def test_sigma_pinned(motion):
    assert cumulative_potential(GOLDEN_ACTIVATIONS[motion]) == PINNED_SIGMA[motion]


def test_sigma_known_discrepancy():
    agree = {m.name for m in MotionClass if cumulative_potential(GOLDEN_ACTIVATIONS[m]) == TABULATED_SIGMA[m]}
    assert agree == {"RLD", "RLS", "LRD", "LRS"}


def _peak_by_hand(circuit, episode):
    by_tick = {}
    for ch, ticks in episode.trains.items():
        for t in ticks:
            by_tick.setdefault(t, []).append(ch)
    s, best = CircuitState.fresh(circuit), (0, 0)
    for _ in range(episode.duration + settle_ticks(circuit)):
        t = s.tick
        s, fired = step(circuit, s, by_tick.get(t, ()))
        if len(fired) > best[0]:
            best = (len(fired), t)
    return best


@pytest.mark.parametrize("motion", list(MotionClass), ids=str)
def test_seizure_budget_eleven_passes(motion):
    assert seizure_check(build_opportunist(), template(motion), 11).passed


def test_seizure_budget_zero_rejected():
    with pytest.raises(ValueError):
        seizure_check(build_opportunist(), template(MotionClass.RLA), 0)


def test_seizure_below_peak_fails_with_tick():
    c, ep = build_opportunist(), template(MotionClass.RLA)
    peak, tick = _peak_by_hand(c, ep)
    report = seizure_check(c, ep, peak - 1)
    assert not report.passed
    assert report["seizure"].measured == f"peak={peak}@tick{tick}"
    assert seizure_check(c, ep, peak).passed


@given(st.sampled_from(list(MotionClass)), st.integers(1, 12), st.integers(0, 5))
def test_seizure_monotone_in_budget(motion, k, extra):
    c = build_opportunist()
    if seizure_check(c, template(motion), k).passed:
        assert seizure_check(c, template(motion), k + extra).passed


def test_suspicious_escape_and_caution():
    sc = get_scenario("suspicious")
    log = TrajectoryLog.from_csv((GOLDEN / "suspicious.csv").read_text())
    report = behavior_properties(log, sc)
    assert report["escape"].passed and report["caution"].passed


def test_suspicious_speed_magnitudes_agree():
    sc = get_scenario("suspicious")
    log = TrajectoryLog.from_csv((GOLDEN / "suspicious.csv").read_text())
    va, ma = mean_speeds(log, 8, *sc.phases["approach"])
    vr, mr = mean_speeds(log, 8, *sc.phases["retreat"])
    assert va >= 1.1 * ma
    assert vr <= 0.9 * mr


def test_ablation_breaks_escape():
    sc = get_scenario("suspicious")
    assert not behavior_properties(run(sc, law=ABLATED), sc)["escape"].passed


def test_phase_outside_log_rejected():
    sc = get_scenario("suspicious")
    short = TrajectoryLog(run(sc).records[:50])
    with pytest.raises(ValueError, match="outside log range"):
        behavior_properties(short, sc)


def test_behavior_properties_deterministic():
    sc = get_scenario("wandering")
    log = TrajectoryLog.from_csv((GOLDEN / "wandering.csv").read_text())
    assert behavior_properties(log, sc).lines() == behavior_properties(log, sc).lines()


def test_report_line_format():
    r = PropertyReport()
    r.add("x", True, "m=1", "exact")
    assert r.lines() == "x,pass,m=1,exact\n"
    with pytest.raises(ValueError, match="already reported"):
        r.add("x", False, "m=2")


def test_unknown_check_rejected():
    sc = replace(get_scenario("following"), checks=("teleport",))
    with pytest.raises(ValueError, match="teleport"):
        behavior_properties(run(replace(sc, duration=20)), replace(sc, events={}))
