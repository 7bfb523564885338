"""Generate a random instance, cut it down to a size category, and save it.

The generator places depots and job sites in a square, derives travel minutes
from Euclidean distance, and mixes short jobs (which must fit in one half-day)
with long jobs (which may run through the midday instant).
"""
from collections import Counter
from pathlib import Path
import tempfile

from lexrouter import GeneratorConfig, generate_random, load_instance, save_instance, standardize
from lexrouter.instance_io import CATEGORIES, make_category_instance

raw = generate_random(GeneratorConfig(n_interventions=27, n_vehicles=5, seed=11))
print(f"raw instance: {len(raw.interventions)} jobs, {len(raw.vehicles)} vehicles")
print("long vs short jobs:", Counter("long" if i.is_long else "short" for i in raw.interventions))

xs = standardize(raw, target_vehicles=4, seed=11)
print(f"standardised: {len(xs.interventions)} jobs, {len(xs.vehicles)} vehicles")
print("removed vehicles:", xs.meta["standardize"]["removed_vehicles"])

with tempfile.TemporaryDirectory() as d:
    path = Path(d) / "xs.json"
    save_instance(xs, path)
    assert load_instance(path) == xs
    print(f"saved and reloaded {path.name} ({path.stat().st_size} bytes)")

for cat in CATEGORIES:
    inst = make_category_instance(cat, seed=0)
    print(f"{cat:>2}: {len(inst.interventions):>3} jobs / {len(inst.vehicles):>2} vehicles")
