"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest or directly with ``python tests/test_acceptance.py``.
"""

import math
import re
import sys
import time
from pathlib import Path

import pytest

from braitenberg.actuation import (ALL_BITS, OutputBits, WheelCommand, booleanize, decide, law_cases,
                                   load_action_table, pattern_matches, synthesize)
from braitenberg.analysis import (GOLDEN_ACTIVATIONS, TABULATED_SIGMA, behavior_properties, cumulative_potential,
                                  mean_speeds, table_regression)
from braitenberg.circuits import build_opportunist, data_path
from braitenberg.perception import MotionClass
from braitenberg.pipeline import SpecError, compile_spec, load_spec, parse_spec
from braitenberg.sim import SCENARIO_NAMES, VehicleState, get_scenario, integrate, run

GOLDEN = Path(__file__).parent / "golden"


def c1_table_regression():
    report = table_regression(build_opportunist())
    failed = [r.name for r in report.results if not r.passed]
    return not failed, f"{6 - len(failed)}/6 rows exact" + (f"; failing {failed}" if failed else ""), 1.0


def c2_law_totality_and_conflict():
    total = all(isinstance(decide(b), WheelCommand) for b in ALL_BITS) and len(ALL_BITS) == 16
    b1001 = OutputBits(True, False, False, True)
    cases = law_cases(b1001)
    conflict_ok = cases[1] and cases[2] and decide(b1001) is WheelCommand.TURN_LEFT
    approach = [decide(booleanize({k: GOLDEN_ACTIVATIONS[m].get(k, 0) for k in "ABCD"}))
                for m in (MotionClass.RLA, MotionClass.LRA)]
    ok = total and conflict_ok and approach == [WheelCommand.RETREAT] * 2
    return ok, f"total={total}; 1001 both cases -> {decide(b1001)}; RLA/LRA -> {'/'.join(map(str, approach))}", 1.0


def c3_synthesis():
    sop = synthesize(load_action_table(data_path("opportunist.actions")))
    equal = all(sop.evaluate(b) is decide(b) for b in ALL_BITS)
    redundant = []
    for cmd, cubes in sop.terms.items():
        for k, cube in enumerate(cubes):
            for pos, ch in enumerate(cube):
                if ch == "-":
                    continue
                trial = dict(sop.terms)
                trial[cmd] = cubes[:k] + (cube[:pos] + "-" + cube[pos + 1:],) + cubes[k + 1:]
                still = all([c for c, cs in trial.items() if any(pattern_matches(q, b) for q in cs)] == [decide(b)]
                            for b in ALL_BITS)
                if still:
                    redundant.append(f"{cube}[{pos}]")
    return equal and not redundant, f"pointwise_equal={equal}; redundant_literals={len(redundant)}", 1.0


def c4_suspicion():
    sc = get_scenario("suspicious")
    log = run(sc)
    r = behavior_properties(log, sc)
    # radial components decide the report; plain speed magnitudes must agree
    va, ma = mean_speeds(log, 8, *sc.phases["approach"])
    vr, mr = mean_speeds(log, 8, *sc.phases["retreat"])
    magnitudes = va >= 1.1 * ma and vr <= 0.9 * mr
    ok = r["escape"].passed and r["caution"].passed and magnitudes
    return ok, f"{r['escape'].measured}; {r['caution'].measured}; magnitudes_agree={magnitudes}", 5.0


def c5_following():
    sc = get_scenario("following")
    r = behavior_properties(run(sc), sc)
    return r["following"].passed, r["following"].measured, 5.0


def c6_wandering():
    sc = get_scenario("wandering")
    r = behavior_properties(run(sc), sc)
    ok = r["coverage"].passed and r["retreat_rule"].passed
    return ok, f"{r['coverage'].measured}; {r['retreat_rule'].measured}", 10.0


def c7_sigma_pin():
    pinned = {"RLD": 5, "RLS": 6, "RLA": 12, "LRD": 6, "LRS": 5, "LRA": 10}
    got = {m.name: cumulative_potential(GOLDEN_ACTIVATIONS[m]) for m in MotionClass}
    tabulated_match = {m.name for m in MotionClass if got[m.name] == TABULATED_SIGMA[m]}
    ok = got == pinned and tabulated_match == {"RLD", "RLS", "LRD", "LRS"}
    return ok, " ".join(f"{k}={v}" for k, v in got.items()), 1.0


def c8_kinematics():
    s = VehicleState(0, 0, 0, 1, 2, 1.0)
    for _ in range(100):
        s = integrate(s, 0.01)
    want = (1.5 * math.sin(1.0), 1.5 * (1 - math.cos(1.0)))
    err = math.dist((s.x, s.y), want) / math.hypot(*want)
    return err < 0.02, f"relative_error={err:.5f}", 1.0


def c9_determinism():
    same = []
    for name in SCENARIO_NAMES:
        sc = get_scenario(name)
        a, b = run(sc).to_csv(), run(sc).to_csv()
        same.append(a == b == (GOLDEN / f"{name}.csv").read_text())
    return all(same), " ".join(f"{n}={'identical' if s else 'differs'}" for n, s in zip(SCENARIO_NAMES, same)), None


def c10_traceability():
    path = data_path("opportunist.behavior")
    cfg = compile_spec(load_spec(path))
    forward = all(cfg.provenance.values())
    reached = {s for v in cfg.provenance.values() for s in v}
    backward = {m.name for m in MotionClass} <= reached
    text = re.sub(r"^1010\s+L\+R-\s+LRS\n", "", path.read_text(), flags=re.M)
    try:
        parse_spec(text, path.parent, "mutant.behavior")
        rejected = False
    except SpecError as exc:
        rejected = "LRS" in str(exc)
    return forward and backward and rejected, f"forward={forward}; backward={backward}; mutant_rejected={rejected}", 1.0


CRITERIA = [
    (1, "activation table exact regression", c1_table_regression),
    (2, "control law totality and 1001 conflict", c2_law_totality_and_conflict),
    (3, "synthesis equivalence and literal minimality", c3_synthesis),
    (4, "suspicion asymmetry (escape, caution)", c4_suspicion),
    (5, "following behavior", c5_following),
    (6, "wandering coverage and retreat rule", c6_wandering),
    (7, "cumulative potential pinned values", c7_sigma_pin),
    (8, "kinematics closed-form arc", c8_kinematics),
    (9, "determinism of golden scenario logs", c9_determinism),
    (10, "pipeline traceability and mutant rejection", c10_traceability),
]


def evaluate(check):
    start = time.perf_counter()
    ok, detail, limit = check()
    elapsed = time.perf_counter() - start
    if limit is None:
        return ok, f"{detail}; runtime={elapsed:.3f}s (no limit)"
    ok = ok and elapsed < limit
    return ok, f"{detail}; runtime={elapsed:.3f}s (limit {limit:g}s)"


def line(num, title, ok, detail):
    return f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("num, title, check", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, check, capsys):
    ok, detail = evaluate(check)
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(n, t, *evaluate(c)) for n, t, c in CRITERIA]
    for n, t, ok, detail in results:
        print(line(n, t, ok, detail))
    sys.exit(0 if all(r[2] for r in results) else 1)
