"""Simulate a mate that approaches and then retreats, and compare against an ablated vehicle.

The ablated vehicle ignores its sensors and always drives forward. Only the
full controller backs away fast enough while the mate closes in.

Run:  python demos/suspicious_mate.py [out.svg]
"""
import sys
from pathlib import Path

from braitenberg import ActionTable, WheelCommand, behavior_properties, get_scenario, run
from braitenberg.svg import log_svg

scenario = get_scenario("suspicious")
full = run(scenario)
blind = run(scenario, law=ActionTable((), WheelCommand.ADVANCE))

for name, log in (("full controller", full), ("always forward", blind)):
    print(f"== {name}")
    print(behavior_properties(log, scenario).render())

commands = [r.cmd.mnemonic for r in full.records if r.decision]
print("decisions:", " ".join(commands))

if len(sys.argv) > 1:
    Path(sys.argv[1]).write_text(log_svg(full, "suspicious mate"))
    print("wrote", sys.argv[1])
