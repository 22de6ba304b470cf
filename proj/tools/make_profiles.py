#!/usr/bin/env python3
"""Generate the synthetic stand-in load profiles in data/.

The tables mimic the shape of household (H0), business (G1) and retail (G4)
winter load profiles: a night base load plus smooth daytime bumps and
plateaus, with distinct weekday, Saturday and Sunday curves. Values are in
watts for an annual consumption of 1000 kWh. Output is deterministic.

usage: make_profiles.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

MINUTES = np.arange(1440)
HOURS = MINUTES / 60.0


def bump(center, width, amp):
    return amp * np.exp(-0.5 * ((HOURS - center) / width) ** 2)


def plateau(start, end, amp, edge=0.6):
    rise = 1.0 / (1.0 + np.exp(-(HOURS - start) / (edge / 4)))
    fall = 1.0 / (1.0 + np.exp((HOURS - end) / (edge / 4)))
    return amp * rise * fall


PROFILES = {
    "H0": {
        "weekday": 62 + bump(7.25, 0.8, 55) + bump(12.5, 1.4, 45) + bump(18.75, 1.9, 135),
        "saturday": 64 + bump(9.5, 1.3, 60) + bump(12.75, 1.5, 70) + bump(18.5, 1.9, 125),
        "sunday": 64 + bump(10.0, 1.3, 55) + bump(12.25, 1.2, 95) + bump(18.5, 2.0, 120),
    },
    "G1": {
        "weekday": 48 + plateau(7.5, 17.0, 215) + bump(10.0, 1.5, 35) - bump(12.5, 0.5, 30),
        "saturday": 46 + plateau(8.0, 12.5, 45),
        "sunday": 44 + bump(12.0, 3.0, 6),
    },
    "G4": {
        "weekday": 52 + plateau(8.25, 18.75, 165) + bump(11.0, 1.3, 30) + bump(16.5, 1.5, 25),
        "saturday": 50 + plateau(8.25, 15.0, 150) + bump(11.5, 1.5, 30),
        "sunday": 46 + plateau(10.0, 12.0, 18),
    },
}


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    for name, days in PROFILES.items():
        with open(out / f"{name}.csv", "w") as f:
            f.write("minute,weekday,saturday,sunday\n")
            for m in MINUTES:
                f.write(f"{m},{days['weekday'][m]:.3f},{days['saturday'][m]:.3f},{days['sunday'][m]:.3f}\n")
        peaks = {d: f"{HOURS[np.argmax(v)]:05.2f}h/{v.max():.1f}W" for d, v in days.items()}
        print(name, peaks)


if __name__ == "__main__":
    main()
