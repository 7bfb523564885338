"""Run a small benchmark and print the best-count / best-gap table.

For each instance the best duration over all methods is found; ``a`` counts
instances where a method reaches it, ``b`` those where it also has the lowest
cost among such methods. Gaps are mean percentages; a dash marks a cost gap
that is undefined because the method never reached the best duration.
"""
from lexrouter.instance_io import make_category_instance
from lexrouter.report import format_gap_table, gap_report, report_csv, run_bench

instances = [make_category_instance("XS", seed) for seed in range(3)]
records = run_bench(instances, ["cg-w", "cg-s", "compact-w"], time_limit=20)
print(format_gap_table(gap_report(records)))
print()
print(report_csv(records))
