"""Recorded best-score trajectories from a 100-variable benchmark run.

A serial baseline and ten sampled workers were snapshotted every 1800
seconds for eight intervals.  EXPECTED_PERMILLE freezes the per-interval
relative gaps ((baseline - worker) / baseline, in permille rounded to
three decimals) that these trajectories imply; the values were computed
independently by hand from the raw scores and serve as the regression
oracle for interval comparison.
"""

from __future__ import annotations

INTERVAL = 1800.0
BOUNDARIES = tuple(INTERVAL * j for j in range(1, 9))

BASELINE = [
    -620010.1, -620008.8, -620005.1, -620005.1,
    -620005.1, -620005.1, -620005.1, -620005.1,
]

WORKERS = {
    1: [-620373.9, -620373.9, -620372.7, -620005.1,
        -620005.1, -619992.9, -619990.9, -619990.9],
    2: [-619990.9, -619989.0, -619989.0, -619989.0,
        -619989.0, -619989.0, -619989.0, -619989.0],
    3: [-620025.1, -620023.7, -620013.9, -620013.9,
        -620013.9, -620013.9, -620013.9, -620013.9],
    4: [-619993.1, -619993.1, -619993.1, -619993.1,
        -619993.1, -619993.1, -619993.1, -619993.1],
    5: [-620025.7, -620025.7, -620025.7, -620025.7,
        -620025.7, -620025.7, -620025.7, -620025.7],
    6: [-620007.6, -620007.6, -620003.0, -619990.9,
        -619990.9, -619990.9, -619990.9, -619990.9],
    7: [-619996.6, -619996.6, -619992.9, -619990.9,
        -619990.9, -619990.9, -619990.9, -619990.9],
    8: [-619995.4, -619994.1, -619994.1, -619994.1,
        -619994.1, -619994.1, -619994.1, -619994.1],
    9: [-620012.2, -620012.2, -620012.2, -620001.4,
        -620001.4, -620001.4, -620001.4, -620001.4],
    10: [-620014.2, -620014.2, -620014.2, -620014.2,
         -620014.2, -620014.2, -620014.2, -620014.2],
}

EXPECTED_PERMILLE = {
    "S1": [-0.587, -0.589, -0.593, 0.000, 0.000, 0.020, 0.023, 0.023],
    "S2": [0.031, 0.032, 0.026, 0.026, 0.026, 0.026, 0.026, 0.026],
    "S3": [-0.024, -0.024, -0.014, -0.014, -0.014, -0.014, -0.014, -0.014],
    "S4": [0.027, 0.025, 0.019, 0.019, 0.019, 0.019, 0.019, 0.019],
    "S5": [-0.025, -0.027, -0.033, -0.033, -0.033, -0.033, -0.033, -0.033],
    "S6": [0.004, 0.002, 0.003, 0.023, 0.023, 0.023, 0.023, 0.023],
    "S7": [0.022, 0.020, 0.020, 0.023, 0.023, 0.023, 0.023, 0.023],
    "S8": [0.024, 0.024, 0.018, 0.018, 0.018, 0.018, 0.018, 0.018],
    "S9": [-0.003, -0.005, -0.011, 0.006, 0.006, 0.006, 0.006, 0.006],
    "S10": [-0.007, -0.009, -0.015, -0.015, -0.015, -0.015, -0.015, -0.015],
    "highest_dag": [0.031, 0.032, 0.026, 0.026, 0.026, 0.026, 0.026, 0.026],
}


def baseline_series() -> list[tuple[float, float]]:
    return [(b, s) for b, s in zip(BOUNDARIES, BASELINE)]


def worker_series() -> dict[int, list[tuple[float, float]]]:
    return {
        w: [(b, s) for b, s in zip(BOUNDARIES, scores)]
        for w, scores in WORKERS.items()
    }
