"""Drive the opportunist circuit with each canonical stimulus and show its spike counts.

Run:  python demos/table_regression.py
"""
from braitenberg import booleanize, build_opportunist, cumulative_potential, decide, run_episode, table_regression
from braitenberg.perception import default_templates

circuit = build_opportunist()
templates = default_templates()

print("class   spike counts (nonzero)                      sum  ABCD  command")
for motion, episode in templates.items():
    counts = run_episode(circuit, episode)
    bits = booleanize({k: counts[k] for k in "ABCD"})
    row = " ".join(f"{n}:{c}" for n, c in counts.nonzero().items())
    print(f"{motion.name:<7} {row:<43} {cumulative_potential(counts):>3}  {bits.pattern}  {decide(bits).mnemonic}")

print()
print(table_regression(circuit).render(), end="")
