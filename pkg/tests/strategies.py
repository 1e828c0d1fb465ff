"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from braitenberg.perception import StimulusEpisode
from braitenberg.snn import HIDDEN, INPUT, Neuron, SpikingCircuit, Synapse


@st.composite
def circuits(draw, excitatory_only=False, unit_thresholds=False, max_neurons=6):
    n = draw(st.integers(2, max_neurons))
    n_in = draw(st.integers(1, min(3, n)))
    ids = [f"n{i}" for i in range(n)]
    thr = st.just(1) if unit_thresholds else st.integers(1, 3)
    neurons = tuple(Neuron(nid, draw(thr), INPUT if k < n_in else HIDDEN) for k, nid in enumerate(ids))
    pol = st.just(1) if excitatory_only else st.sampled_from([1, -1])
    synapses = tuple(draw(st.lists(
        st.builds(Synapse, st.sampled_from(ids), st.sampled_from(ids), pol, st.integers(1, 2), st.integers(0, 2)),
        max_size=10)))
    return SpikingCircuit(neurons, synapses, {f"s{k}": (ids[k],) for k in range(n_in)})


@st.composite
def episodes(draw, circuit, duration=6):
    trains = {}
    for ch in circuit.inputs:
        ticks = draw(st.lists(st.integers(0, duration - 1), unique=True, max_size=4))
        trains[ch] = tuple(sorted(ticks))
    return StimulusEpisode(duration, trains)


@st.composite
def circuit_and_episode(draw, **kw):
    c = draw(circuits(**kw))
    return c, draw(episodes(c))
