"""
Covering with random planks
===========================

Random plank directions, processed in angle-graph chunks so that planks
with nearby normals are placed one after another.  We track the volume of
the unit parallel body B(K), which shrinks to 0 once the remainder is empty.
"""

import math

import plankcover as pc
from plankcover.engine import EngineConfig

eps = 0.1
k = math.ceil(8 * eps ** -1.75)
inst = pc.gen_random(k, eps, seed=1)
cert = pc.run_cover(inst, EngineConfig(record_volumes=True, volume_samples=20_000))
print(f"k = {k}, used {cert.planks_used}, covered = {cert.covered}")

# Vol B(K) starts at 32 pi / 3 for the ball and must fall below 4 pi / 3
# before K can be empty.
for s in cert.steps:
    if s.vol_parallel is not None:
        print(f"step {s.step:4d}  Vol K ~ {s.vol_region:6.3f}  Vol B(K) ~ {s.vol_parallel:7.3f} +- {s.vol_parallel_se:.3f}")

##############################################################################
# Sampling the ball finds no uncovered point.

print("uncovered fraction:", pc.verify_cover(inst, cert, 200_000, seed=1))
