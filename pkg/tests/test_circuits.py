from dataclasses import replace

import pytest
from hypothesis import given

from braitenberg._textfmt import ParseError
from braitenberg.analysis import GOLDEN_ACTIVATIONS
from braitenberg.circuits import build_opportunist, parse_circuit, serialize_circuit, validate_circuit
from braitenberg.perception import MotionClass, template
from braitenberg.snn import Neuron, Synapse, run_episode

from strategies import circuits

MINIMAL = """
circuit tiny
[neurons]
n1 1 input
"""

VEHICLE = """
circuit v
grade vehicle
[neurons]
i 1 input
A 1 output
B 1 output
C 1 output
D 1 output
[synapses]
i A + 1 0
[inputs]
s i
[outputs]
A A
B B
C C
D D
"""


def test_minimal_document():
    c = parse_circuit(MINIMAL)
    assert len(c.neurons) == 1 and c.synapses == ()
    assert c.neurons[0] == Neuron("n1", 1, "input")


def test_missing_output_label_names_it():
    text = VEHICLE.replace("C C\n", "")
    with pytest.raises(ParseError, match="missing output label\\(s\\): C") as exc:
        parse_circuit(text, "v.circuit")
    assert exc.value.line > 0


@pytest.mark.parametrize("mutation, fragment, line", [
    (lambda t: t.replace("B 1 output", "A 1 output"), "duplicate neuron id 'A'", 7),
    (lambda t: t.replace("i A + 1 0", "i Q + 1 0"), "dangling synapse endpoint 'Q'", 11),
    (lambda t: t.replace("i A + 1 0", "i A + x 0"), "magnitude", 11),
    (lambda t: t.replace("s i", "s zz"), "unknown neuron 'zz'", 13),
    (lambda t: t.replace("[inputs]", "[inptus]"), "unknown section", 12),
    (lambda t: t.replace("i A + 1 0", "i A * 1 0"), "polarity", 11),
])
def test_located_errors(mutation, fragment, line):
    with pytest.raises(ParseError) as exc:
        parse_circuit(mutation(VEHICLE), "v.circuit")
    assert fragment in exc.value.message
    assert exc.value.line == line
    assert exc.value.column >= 1
    assert str(exc.value).startswith(f"v.circuit:{line}:")


def test_opportunist_shape():
    c = build_opportunist()
    assert sorted(c.neuron_ids) == sorted(["1", "2", "3", "4", "5", "6", "7", "A", "B", "C", "D"])
    assert c.grade == "vehicle"
    assert {s.polarity for s in c.synapses} == {1, -1}
    assert validate_circuit(c) == []


def test_opportunist_modules_are_separate():
    # horizontal receptors 1-3, depth module 4-7
    kinds = {n.id: n.kind for n in build_opportunist().neurons}
    assert [kinds[i] for i in "1234"] == ["input"] * 4
    assert [kinds[i] for i in "567"] == ["hidden"] * 3


@pytest.mark.parametrize("motion", list(MotionClass), ids=lambda m: m.name)
def test_opportunist_reproduces_each_row(motion):
    counts = run_episode(build_opportunist(), template(motion))
    assert counts.nonzero() == GOLDEN_ACTIVATIONS[motion]


def test_validate_reports_unknown_synapse_target():
    c = build_opportunist()
    bad = replace(c, synapses=c.synapses + (Synapse("1", "zz"),))
    assert any("'zz'" in r for r in validate_circuit(bad))


def test_validate_reports_zero_threshold():
    c = build_opportunist()
    bad = replace(c, neurons=c.neurons[:-1] + (Neuron("D", 0, "output"),))
    assert any("threshold < 1" in r for r in validate_circuit(bad))


def test_validate_vehicle_grade_needs_all_labels():
    c = build_opportunist()
    bad = replace(c, outputs={k: v for k, v in c.outputs.items() if k != "B"})
    assert any("exactly A, B, C, D" in r for r in validate_circuit(bad))


def test_opportunist_round_trip():
    c = build_opportunist()
    assert parse_circuit(serialize_circuit(c)) == c


@given(circuits())
def test_round_trip_property(c):
    assert parse_circuit(serialize_circuit(c)) == c
