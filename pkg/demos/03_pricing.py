"""Look inside the pricing step.

With fixed duals, the labeling algorithm searches one vehicle's routes for
positive reduced cost. Dominance level 4 prunes labels but must keep the best
route; levels 1-3 are cheaper heuristics used early by the relaxation schedule.
"""
import numpy as np

from lexrouter import GeneratorConfig, generate_random
from lexrouter.master import DualValues, Phase
from lexrouter.pricing import PricingConfig, price_vehicle

inst = generate_random(GeneratorConfig(n_interventions=8, n_vehicles=2, seed=3,
                                       window_tightness=0.2))
rng = np.random.default_rng(0)
duals = DualValues(tuple(rng.uniform(0, 80, 8)), (20.0, 20.0))
phase = Phase.duration()

for level in range(5):
    res = price_vehicle(inst, 0, duals, phase, PricingConfig(eta=None, level=level))
    top = max(res.reduced_costs, default=float("nan"))
    print(f"level {level}: {res.labels:>5} labels, {len(res.columns):>4} routes, best {top:8.3f}")

res = price_vehicle(inst, 0, duals, phase, PricingConfig(eta=3))
print("\nwith eta=3 the search stops early:", [c.stops for c in res.columns])
