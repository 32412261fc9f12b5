"""
Ten stacked slabs cover the ball
================================

Ten parallel planks of width 0.2 have total width 2, exactly the diameter
of the unit ball.  Placed greedily from the top, each one lands right under
the previous one and the last remainder is a single point.
"""

import plankcover as pc
from plankcover.engine import EngineConfig

inst = pc.gen_parallel(10, 0.2)
cert = pc.run_cover(inst, EngineConfig(mode="fixed_order"))

for pp in cert.placements:
    print(f"[{pp.lower_offset:+.3f}, {pp.upper_offset:+.3f}]")
print("covered:", cert.covered, "planks used:", cert.planks_used)

##############################################################################
# Dropping the last plank leaves the bottom cap of height 0.2 uncovered.
# Its share of the ball is h^2 (3 - h) / 4 = 0.028.

nine = pc.gen_parallel(9, 0.2)
short = pc.run_cover(nine, EngineConfig(mode="fixed_order"))
frac = pc.verify_cover(nine, short, 1_000_000, seed=0)
print(f"uncovered with 9 planks: {frac:.4f} (cap share {0.04 * 2.8 / 4:.4f})")
