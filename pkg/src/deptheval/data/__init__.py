"""Shipped benchmark fixtures.

Published proxy-task leaderboards for eight depth foundation models, one
file per task.  ``slam.json`` carries the full eight-scene matrix for
reference; ``slam_rank_basis.json`` is restricted to the rm-0/rm-1/rm-2/
off-0 scene subset, which is the column basis the published improvement
and rank figures are computed over (verified to reproduce all eight of
them to two decimals, which the full matrix does not).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

FIXTURES = (
    "depth_completion.csv",
    "stereo_matching.csv",
    "gaussian_splatting.csv",
    "slam.json",
    "slam_rank_basis.json",
    "vlm_chatgpt4o.csv",
    "vlm_spatialbot.csv",
)

# The four tasks whose ranks enter the cross-task average.
RANKED_FIXTURES = (
    "depth_completion.csv",
    "stereo_matching.csv",
    "gaussian_splatting.csv",
    "slam_rank_basis.json",
)


def fixture_path(name: str) -> Path:
    """Absolute path of a shipped fixture file."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; available: {FIXTURES}")
    return Path(str(resources.files(__package__) / name))
