"""The four-phase development process as a compiler.

A behavior file states the desired reactions (definition), splits perception
into partitions, binds each partition to a circuit file (realization) and
gives the action table (actuation). ``compile_spec`` checks the phases
against each other and emits a :class:`VehicleConfig` whose every element
can be traced back to the behavior file.

Behavior file sections: ``[definition]``, ``[partitions]``, ``[contract]``,
``[actuation]``, ``[constants]``. See ``data/opportunist.behavior``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping

from ._textfmt import Line, ParseError, parse_float, parse_int, read_lines
from .actuation import (ActionTable, OutputBits, SopExpression, WheelCommand, booleanize, parse_action_lines,
                        parse_term, pattern_matches, serialize_action_table, synthesize, term_text)
from .circuits import data_path, load_circuit
from .perception import ClassifierConfig, MotionClass, StimulusEpisode, load_templates
from .snn import OUTPUT_LABELS, ActivationTable, Neuron, SpikingCircuit, Synapse, run_episode

SECTIONS = ("definition", "partitions", "contract", "actuation", "constants")
ASPECTS = ("horizontal", "radial")
DEFAULT_SOURCE = "actuation.default"


class SpecError(ParseError):
    """One or more located diagnostics from parsing or compiling a behavior file."""

    def __init__(self, diagnostics: list[ParseError]):
        self.diagnostics = diagnostics
        first = diagnostics[0]
        super().__init__(first.message, first.line, first.column, first.source)
        self.args = ("\n".join(str(d) for d in diagnostics),)

    def __str__(self) -> str:
        return self.args[0]


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class ControlConstants:
    delta: float = 0.2
    v_min: float = -1.5
    v_max: float = 1.5

    @property
    def bounds(self) -> tuple[float, float]:
        return self.v_min, self.v_max


@dataclass(frozen=True)
class ScenarioDef:
    motion: MotionClass
    command: WheelCommand
    reaction: str = ""


@dataclass(frozen=True)
class Partition:
    name: str
    aspects: tuple[str, ...]
    circuit: str
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class BehaviorSpec:
    name: str
    definition: tuple[ScenarioDef, ...]
    partitions: tuple[Partition, ...]
    actuation: ActionTable
    templates: str
    contract: Mapping[MotionClass, Mapping[str, int]] = field(default_factory=dict)
    constants: ControlConstants = ControlConstants()
    classifier: ClassifierConfig = ClassifierConfig()
    base_dir: Path = Path(".")
    warnings: tuple[str, ...] = ()

    __hash__ = None

    def resolve(self, ref: str) -> Path:
        return (self.base_dir / ref).resolve()

    def scenario(self, motion: MotionClass) -> ScenarioDef:
        for s in self.definition:
            if s.motion == motion:
                return s
        raise KeyError(motion)


@dataclass(frozen=True)
class VehicleConfig:
    name: str
    circuit: SpikingCircuit
    law: ActionTable
    sop: SopExpression
    templates: Mapping[MotionClass, StimulusEpisode]
    constants: ControlConstants
    classifier: ClassifierConfig
    activations: Mapping[MotionClass, ActivationTable]
    provenance: Mapping[str, tuple[str, ...]]

    __hash__ = None

    def output_bits(self, counts: ActivationTable) -> OutputBits:
        # labels the compiled circuit does not expose read as inactive
        return booleanize({lab: counts[self.circuit.outputs[lab]] if lab in self.circuit.outputs else 0
                           for lab in OUTPUT_LABELS})

    def perceive(self, episode: StimulusEpisode) -> OutputBits:
        return self.output_bits(run_episode(self.circuit, episode))

    def command(self, bits: OutputBits) -> WheelCommand:
        return self.law.evaluate(bits)


# ---------------------------------------------------------------------------
# parsing

_CONSTANT_KEYS = {"delta": float, "v_min": float, "v_max": float, "window": int, "eps_h": float, "eps_r": float}


def parse_spec(text: str, base_dir=".", source: str = "<string>") -> BehaviorSpec:
    base_dir = Path(base_dir)
    errors: list[ParseError] = []
    warnings: list[str] = []
    name = ""
    definition: list[ScenarioDef] = []
    def_lines: dict[MotionClass, Line] = {}
    partitions: list[Partition] = []
    contract: dict[MotionClass, dict[str, int]] = {}
    templates_ref = ""
    act_lines: list[Line] = []
    consts: dict[str, float | int] = {}

    def err(line: Line, msg: str, idx: int = 0):
        errors.append(line.error(msg, idx, source))

    def motion_of(line: Line, idx: int = 0) -> MotionClass | None:
        try:
            return MotionClass.parse(line.tokens[idx])
        except ValueError as exc:
            err(line, str(exc), idx)
            return None

    lines = read_lines(text, source, SECTIONS)
    for line in lines:
        tok = line.tokens
        if line.section == "":
            if tok[0] == "behavior" and len(tok) == 2:
                name = tok[1]
            else:
                err(line, f"malformed header line {line.raw.strip()!r}")
        elif line.section == "definition":
            motion = motion_of(line)
            if motion is None:
                continue
            if motion in def_lines:
                err(line, f"duplicate scenario {motion} (first on line {def_lines[motion].lineno})")
                continue
            try:
                cmd = WheelCommand.parse(tok[1])
            except (IndexError, ValueError):
                err(line, "expected: scenario command reaction...", 1)
                continue
            def_lines[motion] = line
            definition.append(ScenarioDef(motion, cmd, " ".join(tok[2:])))
        elif line.section == "partitions":
            if len(tok) != 4:
                err(line, "expected: name aspects circuit outputs")
                continue
            aspects = () if tok[1] == "-" else tuple(tok[1].split(","))
            bad = [a for a in aspects if a not in ASPECTS]
            if bad:
                err(line, f"unknown aspect(s) {', '.join(bad)}", 1)
                continue
            if not aspects:
                warnings.append(f"{source}:{line.lineno}: partition {tok[0]!r} covers no scenario aspect")
            if not (base_dir / tok[2]).is_file():
                err(line, f"dangling circuit reference {tok[2]!r}", 2)
            outputs = tuple(tok[3].split(","))
            bad = [o for o in outputs if o not in OUTPUT_LABELS]
            if bad:
                err(line, f"unknown output label(s) {', '.join(bad)}", 3)
            partitions.append(Partition(tok[0], aspects, tok[2], outputs))
        elif line.section == "contract":
            if tok[0] == "templates":
                templates_ref = tok[1] if len(tok) == 2 else ""
                if not templates_ref or not (base_dir / templates_ref).is_file():
                    err(line, f"dangling templates reference {templates_ref!r}", 1)
                continue
            motion = motion_of(line)
            if motion is None:
                continue
            row = {}
            for i, item in enumerate(tok[1:], start=1):
                nid, _, count = item.rpartition(":")
                if not nid or not count.isdigit():
                    err(line, f"malformed count {item!r} (expected neuron:count)", i)
                    continue
                row[nid] = int(count)
            contract[motion] = row
        elif line.section == "actuation":
            act_lines.append(line)
        elif line.section == "constants":
            key = tok[0]
            if key not in _CONSTANT_KEYS or len(tok) != 2:
                err(line, f"unknown or malformed constant {key!r}")
                continue
            conv = parse_int if _CONSTANT_KEYS[key] is int else parse_float
            try:
                consts[key] = conv(line, 1, key, source)
            except ParseError as exc:
                errors.append(exc)

    try:
        actuation = parse_action_lines(act_lines, source)
    except ParseError as exc:
        errors.append(exc)
        actuation = ActionTable(())

    # cross-phase checks
    end = ParseError("", len(text.splitlines()), 1, source)
    covered: dict[MotionClass, list[int]] = {}
    for idx, row in enumerate(actuation.rows):
        for lab in row.labels:
            try:
                covered.setdefault(MotionClass.parse(lab), []).append(idx)
            except ValueError:
                errors.append(ParseError(f"actuation row {row} names unknown motion class {lab!r}", end.line, 1, source))
    for s in definition:
        rows = covered.get(s.motion, [])
        line = def_lines[s.motion]
        if not rows:
            err(line, f"scenario {s.motion} has no actuation row")
        elif len(rows) > 1:
            err(line, f"scenario {s.motion} appears in {len(rows)} actuation rows")
        elif actuation.rows[rows[0]].command != s.command:
            err(line, f"scenario {s.motion} defined as {s.command} but its actuation row says "
                      f"{actuation.rows[rows[0]].command}")
    for motion in covered:
        if motion not in def_lines:
            errors.append(ParseError(f"actuation row names undefined scenario {motion}", end.line, 1, source))
    for motion in contract:
        if motion not in def_lines:
            errors.append(ParseError(f"contract row for undefined scenario {motion}", end.line, 1, source))
    for aspect in ASPECTS:
        if not any(aspect in p.aspects for p in partitions):
            errors.append(ParseError(f"no partition covers the {aspect} aspect", end.line, 1, source))
    if not definition:
        errors.append(ParseError("behavior definition is empty", end.line, 1, source))
    if not templates_ref:
        errors.append(ParseError("missing 'templates' reference in [contract]", end.line, 1, source))
    if errors:
        raise SpecError(errors)

    classifier = ClassifierConfig(**{k: consts[k] for k in ("window", "eps_h", "eps_r") if k in consts})
    constants = ControlConstants(**{k: consts[k] for k in ("delta", "v_min", "v_max") if k in consts})
    return BehaviorSpec(name, tuple(definition), tuple(partitions), actuation, templates_ref, contract,
                        constants, classifier, base_dir, tuple(warnings))


def load_spec(path) -> BehaviorSpec:
    path = Path(path)
    return parse_spec(path.read_text(), path.parent, str(path))


def serialize_spec(spec: BehaviorSpec) -> str:
    out = [f"behavior {spec.name}", "", "[definition]", "# scenario  command  reaction"]
    out += [f"{s.motion}  {s.command}  {s.reaction}".rstrip() for s in spec.definition]
    out += ["", "[partitions]", "# name  aspects  circuit  outputs"]
    out += [f"{p.name}  {','.join(p.aspects) or '-'}  {p.circuit}  {','.join(p.outputs)}" for p in spec.partitions]
    out += ["", "[contract]", f"templates  {spec.templates}"]
    for motion, row in spec.contract.items():
        out.append(f"{motion}  " + " ".join(f"{nid}:{n}" for nid, n in row.items()))
    out += ["", "[actuation]"]
    out += serialize_action_table(spec.actuation).splitlines()
    c, k = spec.constants, spec.classifier
    out += ["", "[constants]", f"delta {c.delta!r}", f"v_min {c.v_min!r}", f"v_max {c.v_max!r}",
            f"window {k.window}", f"eps_h {k.eps_h!r}", f"eps_r {k.eps_r!r}"]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# compilation

def _merge(spec: BehaviorSpec) -> tuple[SpikingCircuit, dict[str, list[str]]]:
    """One circuit for all partitions, plus the partitions claiming each label.

    Partitions sharing a circuit file share its neurons. Distinct files get
    disjoint namespaces (``<partition>.<id>``); input channels with the same
    name are shared by fanning out.
    """
    groups: dict[Path, list[Partition]] = {}
    for p in spec.partitions:
        groups.setdefault(spec.resolve(p.circuit), []).append(p)

    owners: dict[str, list[str]] = {}
    neurons: list[Neuron] = []
    synapses: list[Synapse] = []
    inputs: dict[str, list[str]] = {}
    outputs: dict[str, str] = {}
    label_file: dict[str, Path] = {}
    names = []
    for path, parts in groups.items():
        circuit = load_circuit(path)
        names.append(circuit.name or path.stem)
        prefix = "" if len(groups) == 1 else parts[0].name + "."
        ren = lambda nid: prefix + nid  # noqa: E731
        neurons += [Neuron(ren(n.id), n.threshold, n.kind) for n in circuit.neurons]
        synapses += [Synapse(ren(s.pre), ren(s.post), s.polarity, s.magnitude, s.delay) for s in circuit.synapses]
        for ch, targets in circuit.inputs.items():
            inputs.setdefault(ch, []).extend(ren(t) for t in targets)
        for p in parts:
            for lab in p.outputs:
                if lab not in circuit.outputs:
                    raise CompileError(f"partition {p.name!r}: circuit {p.circuit} has no output {lab}")
                if lab in label_file and label_file[lab] != path:
                    raise CompileError(f"output {lab} claimed by partitions realized in different circuits")
                label_file[lab] = path
                outputs[lab] = ren(circuit.outputs[lab])
                owners.setdefault(lab, []).append(p.name)
    ordered = {lab: outputs[lab] for lab in OUTPUT_LABELS if lab in outputs}
    grade = "vehicle" if set(ordered) == set(OUTPUT_LABELS) else "module"
    merged = SpikingCircuit(tuple(neurons), tuple(synapses), {k: tuple(v) for k, v in inputs.items()},
                            ordered, "+".join(names), grade)
    return merged, owners


def compile_spec(spec: BehaviorSpec) -> VehicleConfig:
    circuit, owners = _merge(spec)

    missing = sorted(spec.actuation.referenced_labels() - set(circuit.outputs))
    if missing:
        raise CompileError(f"actuation references output(s) {', '.join(missing)} not realized by any partition")
    try:
        law_map = spec.actuation.flatten()
    except ValueError as exc:
        raise CompileError(str(exc)) from None
    sop = synthesize(spec.actuation)

    templates = load_templates(spec.resolve(spec.templates))
    activations: dict[MotionClass, ActivationTable] = {}
    for s in spec.definition:
        counts = run_episode(circuit, templates[s.motion])
        activations[s.motion] = counts
        expected = spec.contract.get(s.motion)
        if expected is not None:
            unknown = sorted(set(expected) - set(circuit.neuron_ids))
            if unknown:
                raise CompileError(f"contract row {s.motion} names unknown neuron(s) {', '.join(unknown)}")
            diffs = [f"{nid}: expected {expected.get(nid, 0)}, got {counts[nid]}"
                     for nid in circuit.neuron_ids if counts[nid] != expected.get(nid, 0)]
            if diffs:
                raise CompileError(f"contract row {s.motion} not reproduced: " + "; ".join(diffs))
    cfg = VehicleConfig(spec.name, circuit, spec.actuation, sop, templates, spec.constants, spec.classifier,
                        activations, {})

    bits_of = {m: cfg.output_bits(t) for m, t in activations.items()}
    for s in spec.definition:
        got = law_map[bits_of[s.motion]]
        if got != s.command:
            raise CompileError(f"scenario {s.motion} is defined as {s.command} but the compiled circuit "
                               f"and law give {got} (outputs {bits_of[s.motion].pattern})")

    provenance: dict[str, tuple[str, ...]] = {}
    for lab, nid in circuit.outputs.items():
        fired = [s.motion.name for s in spec.definition if activations[s.motion][nid] >= 1]
        provenance[f"output {lab}"] = tuple(fired + owners.get(lab, []))
    for i, row in enumerate(spec.actuation.rows, start=1):
        provenance[f"row {i}: {row}"] = tuple(row.labels) or tuple(
            s.motion.name for s in spec.definition
            if pattern_matches(row.pattern, bits_of[s.motion]) and s.command == row.command)
    for cmd, cubes in sop.terms.items():
        for cube in cubes:
            hits = tuple(s.motion.name for s in spec.definition
                         if s.command == cmd and pattern_matches(cube, bits_of[s.motion]))
            if not hits and cmd == spec.actuation.default:
                hits = (DEFAULT_SOURCE,)
            provenance[f"term {term_text(cube, ascii_only=True)} -> {cmd}"] = hits

    orphans = sorted(k for k, v in provenance.items() if not v)
    if orphans:
        raise CompileError(f"untraceable compiled element(s): {', '.join(orphans)}")
    reached = {src for v in provenance.values() for src in v}
    unreached = [s.motion.name for s in spec.definition if s.motion.name not in reached]
    if unreached:
        raise CompileError(f"scenario(s) {', '.join(unreached)} not reached by any compiled element")

    return VehicleConfig(spec.name, circuit, spec.actuation, sop, templates, spec.constants, spec.classifier,
                         activations, provenance)


def _element_key(config: VehicleConfig, element: str) -> str:
    text = element.strip()
    if text in config.provenance:
        return text
    if text in config.circuit.outputs:
        return f"output {text}"
    if text.startswith("output ") and text in config.provenance:
        return text
    if text.lower().startswith("row "):
        num = text[4:].split(":")[0].strip()
        for key in config.provenance:
            if key.startswith(f"row {num}:"):
                return key
    for arrow in ("->", "→"):
        if arrow in text:
            lhs, rhs = (part.strip() for part in text.removeprefix("term ").split(arrow, 1))
            try:
                cmd = WheelCommand.parse(rhs)
                cube = parse_term(lhs) if not set(lhs) <= set("01-") else lhs
            except ValueError:
                break
            term_key = f"term {term_text(cube, ascii_only=True)} -> {cmd}"
            if term_key in config.provenance:
                return term_key
            for key in config.provenance:
                if key.startswith("row ") and key.endswith(f": {cube} -> {cmd}"):
                    return key
            break
    raise KeyError(f"unknown compiled element {element!r}")


def trace(config: VehicleConfig, element: str) -> list[str]:
    """Behavior-file sources of a compiled element.

    ``element`` is an output label (``"A"``), an action row (``"row 3"`` or
    ``"1001 -> L-R+"``) or a synthesized term (``"ABC -> L-R-"``).
    """
    return list(config.provenance[_element_key(config, element)])


def trace_report(config: VehicleConfig) -> str:
    lines = [f"# traceability for {config.name}: compiled element <- behavior sources"]
    lines += [f"{key} <- {', '.join(srcs)}" for key, srcs in config.provenance.items()]
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=1)
def default_config() -> VehicleConfig:
    return compile_spec(load_spec(data_path("opportunist.behavior")))
