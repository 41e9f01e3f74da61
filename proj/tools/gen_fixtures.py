#!/usr/bin/env python3
"""Generate the synthetic skeleton recordings under data/fixtures.

The right wrist carries a period-10 zero-mean jitter scaled so that every
window of 10 consecutive frames has exactly the requested per-axis sample
standard deviation. Everything else sways slowly with a 10 s period so the
recordings loop seamlessly.
"""

import argparse
import json
import math
import pathlib

RATE_HZ = 30.0
FRAMES = 300
PERIOD = 10

# Per-axis sample std of the right wrist, cm (good and poor lighting).
SIGMA_BRIGHT_CM = (0.10, 0.40, 0.75)
SIGMA_DARK_CM = (0.98, 6.08, 10.69)

# Fixed zero-mean patterns, one per axis, normalised to unit sample std.
_RAW = (
    (0.3, -1.1, 0.8, 1.4, -0.6, -0.2, 1.0, -1.3, 0.4, -0.7),
    (-0.9, 0.5, 1.2, -0.4, -1.0, 0.7, 0.1, 1.3, -0.8, -0.7),
    (1.1, 0.2, -0.9, -1.2, 0.6, 0.9, -0.3, -0.5, 1.3, -1.2),
)


def unit_pattern(raw):
    mean = sum(raw) / len(raw)
    centred = [v - mean for v in raw]
    var = sum(v * v for v in centred) / (len(raw) - 1)
    return [v / math.sqrt(var) for v in centred]


PATTERNS = [unit_pattern(r) for r in _RAW]


def body(x0, sway, t):
    """Keypoints of a standing person facing -x, right side towards +y."""
    s = sway * math.sin(2.0 * math.pi * t / (FRAMES / RATE_HZ))
    kp = {
        "pelvis": (x0 + s, 0.0, 0.0),
        "neck": (x0 + s, 0.0, 0.55),
        "head": (x0 + s, 0.0, 0.72),
        "right_shoulder": (x0 + s, 0.20, 0.50),
        "left_shoulder": (x0 + s, -0.20, 0.50),
        "right_elbow": (x0 - 0.12, 0.25, 0.28),
        "left_elbow": (x0 + s, -0.24, 0.22),
        "left_wrist": (x0 + s, -0.25, -0.05),
    }
    return kp


def right_wrist(x0, sigma_cm, k):
    base = (x0 - 0.30, 0.25, 0.33)
    return tuple(base[a] + sigma_cm[a] * 0.01 * PATTERNS[a][k % PERIOD] for a in range(3))


def frame(t, kp, conf=0.9):
    return {
        "t": t,
        "keypoints": {n: [float(f"{c:.17g}") for c in p] for n, p in sorted(kp.items())},
        "confidence": {n: conf for n in sorted(kp)},
    }


def recording(x0, sigma_cm, sway=0.02):
    out = []
    for k in range(FRAMES):
        t = k / RATE_HZ
        kp = body(x0, sway, t)
        kp["right_wrist"] = right_wrist(x0, sigma_cm, k)
        out.append(frame(t, kp))
    return out


def tpose():
    kp = {
        "pelvis": (1.0, 0.0, 0.0),
        "neck": (1.0, 0.0, 0.55),
        "head": (1.0, 0.0, 0.72),
        "right_shoulder": (1.0, 0.20, 0.50),
        "left_shoulder": (1.0, -0.20, 0.50),
        "right_elbow": (1.0, 0.48, 0.50),
        "left_elbow": (1.0, -0.48, 0.50),
        "right_wrist": (1.0, 0.74, 0.50),
        "left_wrist": (1.0, -0.74, 0.50),
    }
    return [frame(k / RATE_HZ, kp) for k in range(PERIOD)]


def constant():
    kp = body(0.9, 0.0, 0.0)
    kp["right_wrist"] = (0.6, 0.25, 0.33)
    return [frame(k / RATE_HZ, kp) for k in range(FRAMES)]


def write(path, frames, header):
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# {header}\n")
        for fr in frames:
            f.write(json.dumps(fr, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for light, sigma in (("bright", SIGMA_BRIGHT_CM), ("dark", SIGMA_DARK_CM)):
        for dist, x0 in (("near", 0.85), ("far", 1.15)):
            write(out / f"{light}_{dist}.jsonl", recording(x0, sigma),
                  f"{light} lighting, person at x={x0} m, right-wrist sigma {sigma} cm, 30 Hz")
    write(out / "tpose.jsonl", tpose(), "static T-pose at x=1.0 m")
    write(out / "constant.jsonl", constant(), "static person, zero jitter")


if __name__ == "__main__":
    main()
