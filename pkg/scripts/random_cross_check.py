"""Fuzz the closed-form conjugate times against the ODE detector.

Draws random geodesics on each built-in algebra, skips initial data the
closed forms decline (unsupported mixed cases), and reports the worst
time gap seen across all matches.  A nonzero exit means a discrepancy.

    python scripts/random_cross_check.py --per-algebra 25 --tmax 6 --seed 7
"""

import argparse
import sys

import numpy as np

from nilconj import (
    FIXTURE_NAMES,
    GeodesicSpec,
    UnsupportedCaseError,
    compare,
    conjugate_times,
    detect_conjugate,
    fixture,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-algebra", type=int, default=25)
    ap.add_argument("--tmax", type=float, default=6.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bad = 0
    worst = 0.0
    for name in FIXTURE_NAMES:
        alg = fixture(name)
        ran = skipped = 0
        while ran < args.per_algebra:
            z0 = rng.standard_normal(alg.dim_center)
            x0 = rng.standard_normal(alg.dim_v)
            kind = int(rng.integers(3))
            if kind == 0:
                x0[:] = 0.0          # central
            elif kind == 1 or alg.dim_center > 1:
                z0[:] = 0.0          # straight; mixed needs a line center
            geo = GeodesicSpec(alg, z0, x0)
            try:
                closed = conjugate_times(geo, args.tmax)
            except UnsupportedCaseError:
                skipped += 1
                if skipped > 20 * args.per_algebra:
                    raise
                continue
            ran += 1
            report = compare(closed, detect_conjugate(geo, args.tmax))
            if not report.ok:
                bad += 1
                print(f"{name}: DISCREPANCY for z0={z0} x0={x0}")
                print(f"  missing={report.missing} spurious={report.spurious}")
            for tc, td, _, _ in report.matched:
                worst = max(worst, abs(tc - td))
        print(f"{name}: {ran} geodesics checked, {skipped} unsupported draws skipped")

    print(f"\nworst matched time gap: {worst:.3e}")
    print("ok" if bad == 0 else f"{bad} discrepancies")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
