#!/usr/bin/env python3
"""Rank eight depth models across four proxy tasks from shipped tables.

Each task table holds raw metric cells plus a baseline row.  Per task we
compute every method's mean relative improvement over the baseline and
rank by it; the cross-task standing is the mean of those ranks.  Excluded
rows (a model trained on the task's data, or the dataset's own rendered
depth) keep their improvement but never receive a rank.
"""

from deptheval import average_rank, emit_report, improvement_ratio, load_table
from deptheval.data import RANKED_FIXTURES, fixture_path

tables = [load_table(fixture_path(name), baseline="w/o depth") for name in RANKED_FIXTURES]
report = average_rank(tables)
print(emit_report(report, "markdown"))

# The SLAM ranking ships in two variants: the rank basis (three room scenes
# plus office-0), which reproduces the published improvement column, and
# the full eight-scene matrix, which tells a different story.
basis = load_table(fixture_path("slam_rank_basis.json"))
full = load_table(fixture_path("slam.json"))
print("SLAM improvement, rank-basis scenes vs full matrix:")
for method in basis.methods():
    print(f"  {method:11s} {improvement_ratio(basis, method):+7.2f} "
          f"vs {improvement_ratio(full, method):+7.2f}")
