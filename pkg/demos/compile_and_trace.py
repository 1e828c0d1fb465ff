"""Compile the opportunist behavior file and follow one decision back to its sources.

Run:  python demos/compile_and_trace.py
"""
from braitenberg import compile_spec, load_spec, trace
from braitenberg.circuits import data_path

config = compile_spec(load_spec(data_path("opportunist.behavior")))

print(config.sop.render(ascii_only=True))
print()
for element in ("ABC -> L-R-", "1001 -> L-R+", "A"):
    print(f"{element!r:>16} traces to {trace(config, element)}")
