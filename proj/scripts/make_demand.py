#!/usr/bin/env python3
"""Synthesize the bundled system-demand years (360 days of 24 hours each).

Writes data/demand_observed.csv (one year) and data/demand_history.csv
(three earlier years) as `hour,demand_mw` tables. Output is fully
determined by the seeds below.
"""
import argparse
from pathlib import Path

import numpy as np

PEAK_MW = 2850.0
MONTH_LEVEL = [0.93, 0.90, 0.82, 0.78, 0.82, 0.92, 1.00, 0.98, 0.87, 0.79, 0.84, 0.94]
WEEKDAY_LEVEL = [1.0, 1.0, 1.0, 1.0, 0.98, 0.90, 0.87]

# hour-of-day shapes for winter, summer and the shoulder months
WINTER = [0.72, 0.69, 0.68, 0.68, 0.70, 0.75, 0.85, 0.95, 0.98, 0.97, 0.95, 0.93,
          0.91, 0.90, 0.90, 0.92, 0.96, 1.00, 0.99, 0.96, 0.92, 0.87, 0.81, 0.76]
SUMMER = [0.70, 0.67, 0.65, 0.64, 0.65, 0.68, 0.73, 0.79, 0.85, 0.89, 0.92, 0.95,
          0.97, 0.99, 1.00, 1.00, 0.99, 0.97, 0.94, 0.91, 0.88, 0.84, 0.79, 0.74]
SHOULDER = [0.71, 0.68, 0.67, 0.66, 0.68, 0.72, 0.80, 0.88, 0.92, 0.93, 0.93, 0.93,
            0.92, 0.92, 0.92, 0.93, 0.95, 0.98, 1.00, 0.98, 0.94, 0.88, 0.81, 0.75]


def shape_for(month):
    if month in (0, 1, 11):
        return np.array(WINTER)
    if month in (5, 6, 7):
        return np.array(SUMMER)
    return np.array(SHOULDER)


def synth_year(rng, first_weekday):
    days = 360
    weather = np.zeros(days)
    for d in range(1, days):
        weather[d] = 0.75 * weather[d - 1] + rng.normal(0.0, 0.045)
    level = np.array([MONTH_LEVEL[d // 30] * WEEKDAY_LEVEL[(first_weekday + d) % 7] * (1.0 + weather[d])
                      for d in range(days)])
    # daily levels apply at noon and are interpolated in between, so load
    # does not step at midnight
    hours = np.arange(days * 24)
    level_by_hour = np.interp(hours, np.arange(days) * 24 + 12, level)
    out = np.empty(days * 24)
    for d in range(days):
        hourly = shape_for(d // 30) * (1.0 + rng.normal(0.0, 0.01, 24))
        out[d * 24:(d + 1) * 24] = level_by_hour[d * 24:(d + 1) * 24] * hourly
    return out


def write(path, series):
    with open(path, "w") as f:
        f.write("hour,demand_mw\n")
        for h, v in enumerate(series):
            f.write(f"{h},{v:.3f}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)

    history = [synth_year(np.random.default_rng(seed), seed % 7) for seed in (11, 12, 13)]
    observed = synth_year(np.random.default_rng(2024), 3)
    scale = PEAK_MW / observed.max()
    write(out / "demand_observed.csv", observed * scale)
    write(out / "demand_history.csv", np.concatenate(history) * scale)
    print(f"observed peak {observed.max() * scale:.1f} MW, min {observed.min() * scale:.1f} MW")


if __name__ == "__main__":
    main()
