#!/usr/bin/env python3
"""Write a fleet synthesis config: N PMUs x (vm, va, freq), 30 min at 30 fps."""
import argparse
import json
import random


def channel(pmu, kind, rng):
    inject = {"noise_snr_db": round(rng.uniform(38.0, 48.0), 1)}
    if kind == "vm":
        base = {"nominal_value": round(rng.uniform(0.98, 1.04), 4),
                "trend": [[0, 0.0], [900, round(rng.uniform(-0.01, 0.01), 4)], [1800, 0.0]],
                "dynamics_variability": 1e-8}
    elif kind == "va":
        drift = rng.uniform(-3.6, 3.6)
        base = {"nominal_value": round(rng.uniform(-180, 180), 2),
                "trend": [[0, 0.0], [1800, round(drift * 1800, 1)]]}
    else:
        base = {"dynamics_variability": 1e-9}
        inject["modes"] = [{"frequency_hz": 0.3, "amplitude": 0.004},
                           {"frequency_hz": 0.5, "amplitude": 0.002}]
        inject["noise_snr_db"] = 35.0
    if rng.random() < 0.3:
        inject["outlier"] = {"rate": 0.002, "magnitude_sigmas": 10}
    if rng.random() < 0.4:
        inject["missing"] = {"dropout_rate": round(rng.uniform(0.001, 0.01), 4),
                             "max_gap_samples": rng.choice([5, 30, 60]),
                             "filler": rng.choice(["nan", 9999, -9999])}
    return {"pmu_id": pmu, "kind": kind, **base, "inject": inject}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pmus", type=int, default=41)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--duration", type=float, default=1800.0)
    ap.add_argument("out")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    channels = [channel(f"PMU{i + 1:03d}", kind, rng)
                for i in range(args.pmus) for kind in ("vm", "va", "freq")]
    cfg = {"seed": args.seed, "sampling": {"rate_fps": 30, "nominal_hz": 60},
           "duration_s": args.duration, "channels": channels}
    with open(args.out, "w") as f:
        json.dump(cfg, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
