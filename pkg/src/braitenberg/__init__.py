"""Spiking-circuit Braitenberg vehicle: circuits, perception, actuation logic, compiler and simulator."""

from .actuation import (ActionTable, OutputBits, SopExpression, WheelCommand, apply, booleanize, decide,
                        load_action_table, minimize, synthesize)
from .analysis import (PropertyReport, behavior_properties, cumulative_potential, seizure_check,
                       table_regression)
from .circuits import build_opportunist, load_circuit, parse_circuit, serialize_circuit, validate_circuit
from .perception import ClassifierConfig, MotionClass, RelativeSample, StimulusEpisode, classify_window, encode
from .pipeline import BehaviorSpec, VehicleConfig, compile_spec, default_config, load_spec, parse_spec, trace
from .sim import Scenario, TrajectoryLog, VehicleState, get_scenario, integrate, run, scenario_library, sense
from .snn import ActivationTable, Neuron, SpikingCircuit, Synapse, run_episode, step

__all__ = [
    "ActionTable", "OutputBits", "SopExpression", "WheelCommand", "apply", "booleanize", "decide",
    "load_action_table", "minimize", "synthesize",
    "PropertyReport", "behavior_properties", "cumulative_potential", "seizure_check", "table_regression",
    "build_opportunist", "load_circuit", "parse_circuit", "serialize_circuit", "validate_circuit",
    "ClassifierConfig", "MotionClass", "RelativeSample", "StimulusEpisode", "classify_window", "encode",
    "BehaviorSpec", "VehicleConfig", "compile_spec", "default_config", "load_spec", "parse_spec", "trace",
    "Scenario", "TrajectoryLog", "VehicleState", "get_scenario", "integrate", "run", "scenario_library", "sense",
    "ActivationTable", "Neuron", "SpikingCircuit", "Synapse", "run_episode", "step",
]
