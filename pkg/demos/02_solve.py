"""Solve one small instance with every method and check against brute force.

Weighted runs maximise ``M * f1 - f2`` once; sequential runs first maximise
total service minutes and then minimise cost while keeping those minutes.
Both must land on the same lexicographic optimum.
"""
from lexrouter import GeneratorConfig, METHODS, brute_force_lex_optimum, generate_random, solve
from lexrouter import compute_big_m, validate_schedule

inst = generate_random(GeneratorConfig(n_interventions=7, n_vehicles=2, seed=5))
print(f"big-M for this instance: {compute_big_m(inst).value}")

best = brute_force_lex_optimum(inst)
print(f"oracle: f1={best.f1} min, f2={float(best.f2):.2f}")

for method in METHODS:
    sol, stats = solve(inst, method, time_limit=30)
    assert validate_schedule(sol, inst) == []
    iters = [p.iterations for p in stats.phases]
    print(f"{method:<10} f1={sol.f1} f2={float(sol.f2):.2f} exact={sol.exact} iterations={iters}")
    assert sol.objectives == best.objectives

print("\nschedule of the first route:")
col = best.routes[0]
for row in col.timeline(inst):
    print(f"  {row['node']:<4} arrive {row['arrival']:>3}  start {row['start']:>3}  end {row['end']:>3}")
