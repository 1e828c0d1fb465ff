"""Minimize the behavior's action table into sum-of-products form per wheel command.

The opportunist table leaves ten of sixteen output patterns unspecified, so
synthesis is free to use them as don't-cares when merging rows.

Run:  python demos/synthesis.py
"""
from braitenberg import load_action_table, synthesize
from braitenberg.actuation import ALL_BITS, decide, priority_law_table
from braitenberg.circuits import data_path

table = load_action_table(data_path("opportunist.actions"))
sop = synthesize(table)
print("opportunist table:")
print(sop.render())

agree = sum(sop.evaluate(b) is decide(b) for b in ALL_BITS)
print(f"agrees with the priority law on {agree}/16 patterns\n")

# the priority law itself has one overlapping pattern; synthesis reports it
law = synthesize(priority_law_table())
print("priority law:")
print(law.render(ascii_only=True))
for note in law.diagnostics:
    print("note:", note)
