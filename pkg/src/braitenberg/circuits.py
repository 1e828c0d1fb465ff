"""Circuit description files: parse, serialize, validate.

Format::

    circuit opportunist
    grade vehicle            # optional; "module" (default) or "vehicle"

    [neurons]
    # id  threshold  kind
    1     1          input

    [synapses]
    # pre  post  polarity(+|-)  magnitude  delay
    1      5     +              1          0

    [inputs]
    # channel  neuron       (repeat a channel to fan out)
    s1         1

    [outputs]
    # label  neuron
    A        A
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ._textfmt import Line, ParseError, parse_int, read_lines
from .snn import EXCITATORY, INHIBITORY, INPUT, NEURON_KINDS, OUTPUT, OUTPUT_LABELS, Neuron, SpikingCircuit, Synapse

SECTIONS = ("neurons", "synapses", "inputs", "outputs")
_POLARITY = {"+": EXCITATORY, "-": INHIBITORY, "exc": EXCITATORY, "inh": INHIBITORY}


def parse_circuit(text: str, source: str = "<string>") -> SpikingCircuit:
    name, grade = "", "module"
    neurons: list[Neuron] = []
    synapses: list[Synapse] = []
    inputs: dict[str, list[str]] = {}
    outputs: dict[str, str] = {}
    seen: dict[str, Line] = {}
    pending_syn: list[tuple[Line, Synapse]] = []
    pending_io: list[tuple[Line, str]] = []
    outputs_line: Line | None = None

    for line in read_lines(text, source, SECTIONS):
        tok = line.tokens
        if line.section == "":
            if tok[0] == "circuit" and len(tok) == 2:
                name = tok[1]
            elif tok[0] == "grade" and len(tok) == 2 and tok[1] in ("module", "vehicle"):
                grade = tok[1]
            else:
                raise line.error(f"malformed header line {line.raw.strip()!r}", 0, source)
        elif line.section == "neurons":
            if len(tok) != 3:
                raise line.error("neuron declaration needs: id threshold kind", 0, source)
            if tok[0] in seen:
                raise line.error(f"duplicate neuron id {tok[0]!r} (first declared on line {seen[tok[0]].lineno})", 0, source)
            if tok[2] not in NEURON_KINDS:
                raise line.error(f"unknown neuron kind {tok[2]!r}", 2, source)
            seen[tok[0]] = line
            neurons.append(Neuron(tok[0], parse_int(line, 1, "threshold", source), tok[2]))
        elif line.section == "synapses":
            if len(tok) != 5:
                raise line.error("synapse declaration needs: pre post polarity magnitude delay", 0, source)
            if tok[2] not in _POLARITY:
                raise line.error(f"polarity must be + or -, got {tok[2]!r}", 2, source)
            syn = Synapse(tok[0], tok[1], _POLARITY[tok[2]], parse_int(line, 3, "magnitude", source),
                          parse_int(line, 4, "delay", source))
            pending_syn.append((line, syn))
        elif line.section == "inputs":
            if len(tok) != 2:
                raise line.error("input declaration needs: channel neuron", 0, source)
            inputs.setdefault(tok[0], []).append(tok[1])
            pending_io.append((line, tok[1]))
        elif line.section == "outputs":
            if len(tok) != 2:
                raise line.error("output declaration needs: label neuron", 0, source)
            if tok[0] in outputs:
                raise line.error(f"duplicate output label {tok[0]!r}", 0, source)
            outputs[tok[0]] = tok[1]
            pending_io.append((line, tok[1]))
            outputs_line = outputs_line or line

    for line, syn in pending_syn:
        for idx, endpoint in ((0, syn.pre), (1, syn.post)):
            if endpoint not in seen:
                raise line.error(f"dangling synapse endpoint {endpoint!r}", idx, source)
        synapses.append(syn)
    for line, nid in pending_io:
        if nid not in seen:
            raise line.error(f"unknown neuron {nid!r}", 1, source)

    if grade == "vehicle":
        missing = [lab for lab in OUTPUT_LABELS if lab not in outputs]
        if missing:
            where = outputs_line.lineno if outputs_line else 0
            raise ParseError(f"missing output label(s): {', '.join(missing)}", where, 1, source)

    return SpikingCircuit(tuple(neurons), tuple(synapses), {k: tuple(v) for k, v in inputs.items()},
                          outputs, name, grade)


def serialize_circuit(circuit: SpikingCircuit) -> str:
    lines = []
    if circuit.name:
        lines.append(f"circuit {circuit.name}")
    if circuit.grade != "module":
        lines.append(f"grade {circuit.grade}")
    lines += ["", "[neurons]", "# id  threshold  kind"]
    lines += [f"{n.id}  {n.threshold}  {n.kind}" for n in circuit.neurons]
    lines += ["", "[synapses]", "# pre  post  polarity  magnitude  delay"]
    lines += [f"{s.pre}  {s.post}  {'+' if s.polarity > 0 else '-'}  {s.magnitude}  {s.delay}"
              for s in circuit.synapses]
    lines += ["", "[inputs]"]
    lines += [f"{ch}  {nid}" for ch, targets in circuit.inputs.items() for nid in targets]
    lines += ["", "[outputs]"]
    lines += [f"{label}  {nid}" for label, nid in circuit.outputs.items()]
    return "\n".join(lines) + "\n"


def load_circuit(path) -> SpikingCircuit:
    path = Path(path)
    return parse_circuit(path.read_text(), str(path))


def validate_circuit(circuit: SpikingCircuit) -> list[str]:
    """Violated invariants as human-readable entries; empty means valid."""
    report = []
    ids = [n.id for n in circuit.neurons]
    known = set(ids)
    for nid in sorted({i for i in ids if ids.count(i) > 1}):
        report.append(f"duplicate neuron id {nid!r}")
    for n in circuit.neurons:
        if n.threshold < 1:
            report.append(f"neuron {n.id!r}: threshold < 1")
        if n.kind not in NEURON_KINDS:
            report.append(f"neuron {n.id!r}: unknown kind {n.kind!r}")
    for s in circuit.synapses:
        for endpoint in (s.pre, s.post):
            if endpoint not in known:
                report.append(f"synapse {s.pre}->{s.post}: unknown neuron id {endpoint!r}")
        if s.polarity not in (EXCITATORY, INHIBITORY):
            report.append(f"synapse {s.pre}->{s.post}: polarity must be +1 or -1")
        if s.magnitude < 1:
            report.append(f"synapse {s.pre}->{s.post}: magnitude < 1")
        if s.delay < 0:
            report.append(f"synapse {s.pre}->{s.post}: delay < 0")
    kinds = {n.id: n.kind for n in circuit.neurons}
    for ch, targets in circuit.inputs.items():
        for nid in targets:
            if nid not in known:
                report.append(f"input channel {ch!r}: unknown neuron id {nid!r}")
            elif kinds[nid] != INPUT:
                report.append(f"input channel {ch!r}: neuron {nid!r} is not of kind input")
    targets = list(circuit.outputs.values())
    for label, nid in circuit.outputs.items():
        if nid not in known:
            report.append(f"output {label!r}: unknown neuron id {nid!r}")
        elif kinds[nid] != OUTPUT:
            report.append(f"output {label!r}: neuron {nid!r} is not of kind output")
        elif targets.count(nid) > 1:
            report.append(f"output {label!r}: neuron {nid!r} is shared by several labels")
    if circuit.grade == "vehicle" and set(circuit.outputs) != set(OUTPUT_LABELS):
        report.append(f"vehicle circuit outputs must be exactly A, B, C, D; got {', '.join(circuit.outputs) or 'none'}")
    return report


def data_path(name: str) -> Path:
    return Path(str(resources.files("braitenberg") / "data" / name))


def build_opportunist() -> SpikingCircuit:
    """The reference Opportunist circuit, loaded from the versioned golden file."""
    return load_circuit(data_path("opportunist.circuit"))
