"""Shared helpers for the test suite."""

from __future__ import annotations

import math
from pathlib import Path

from cogload.config import ExperimentConfig, Scene, SensorSource

DATA_DIR = Path(__file__).parent / "data"


def make_config(**overrides) -> ExperimentConfig:
    """A small valid config; override any field."""
    base = dict(
        user_id="tester",
        scene=Scene.PROGRESSIVE,
        phase_duration_s=30.0,
        rng_seed=1234,
        pause_duration_s=5.0,
    )
    if "sensor_source" in overrides and isinstance(overrides["sensor_source"], str):
        overrides["sensor_source"] = SensorSource.parse(overrides["sensor_source"])
    base.update(overrides)
    return ExperimentConfig(**base)


# independent textbook implementations used as statistics oracles; written
# against the formulas directly, no shared code with the package

def oracle_pearson(xs, ys) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(sum((x - mx) ** 2 for x in xs)) * math.sqrt(
        sum((y - my) ** 2 for y in ys))
    return num / den


def oracle_ranks(values) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def oracle_spearman(xs, ys) -> float:
    return oracle_pearson(oracle_ranks(xs), oracle_ranks(ys))
