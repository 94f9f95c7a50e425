"""Scan the boundary-map smallest singular value along one geodesic.

Writes a t, sigma_min table and prints where the independent detector sees
rank drops next to what the closed forms predict.  Useful for eyeballing
how sharp the dips are before trusting a tolerance.

    python scripts/scan_sigma_min.py --algebra heis3 --z0 1 --x0 1,0 \
        --tmax 13 --out sigma.csv
"""

import argparse
import sys

import numpy as np

from nilconj import (
    GeodesicSpec,
    conjugate_times,
    detect_conjugate,
    fixture,
    integrate_propagator,
    sigma_min_series,
)


def parse_vec(text: str) -> np.ndarray:
    return np.array([float(part) for part in text.split(",")], dtype=float)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algebra", default="heis3")
    ap.add_argument("--z0", default="1")
    ap.add_argument("--x0", default="1,0")
    ap.add_argument("--tmax", type=float, default=13.0)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout table)")
    args = ap.parse_args()

    alg = fixture(args.algebra)
    geo = GeodesicSpec(alg, parse_vec(args.z0), parse_vec(args.x0))
    prop = integrate_propagator(geo, args.tmax)
    sig = sigma_min_series(prop)

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("t,sigma_min\n")
            for t, s in zip(prop.times, sig):
                fh.write(f"{t:.10g},{s:.10g}\n")
        print(f"wrote {prop.times.size} rows to {args.out}")
    else:
        stride = max(1, prop.times.size // 40)
        for t, s in zip(prop.times[::stride], sig[::stride]):
            bar = "#" * int(min(60, 8 * s))
            print(f"{t:8.4f}  {s:12.6g}  {bar}")

    detected = detect_conjugate(geo, args.tmax, prop=prop)
    print("\ndetected rank drops:")
    for t, mult in detected:
        print(f"  t = {t:.9f} (multiplicity {mult})")
    try:
        closed = conjugate_times(geo, args.tmax)
        print("closed-form times:")
        for ct in closed:
            print(f"  t = {ct.t:.9f} (multiplicity {ct.multiplicity}, {ct.branch})")
    except Exception as exc:  # unsupported mixed cases etc.
        print(f"closed forms unavailable: {type(exc).__name__}: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
