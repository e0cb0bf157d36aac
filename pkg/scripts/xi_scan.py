"""Largest sampled Nijenhuis component of J^plus_xi and J^minus_xi over the Riemann sphere.

A structure is integrable when that number is at round-off level.  For the
Ricci-flat example only xi = 0 and xi = inf survive on the plus side, while
the minus family is a single integrable structure for every xi.

    python scripts/xi_scan.py --grid 128 --csv scan.csv
"""

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

from akgeo.constructions import UPRIME, example_coframe
from akgeo.domains import sample_domain
from akgeo.hermitian import INTEGRABLE_TOL, XiParameter, integrability_scan, stereographic_grid


@dataclass
class Config:
    grid: int = 64
    points: int = 10
    seed: int = 42
    tol: float = INTEGRABLE_TOL
    csv: Path | None = None


def main(cfg: Config) -> None:
    pts = sample_domain(UPRIME, cfg.points, cfg.seed)
    grid = [XiParameter.finite(0), *stereographic_grid(cfg.grid), XiParameter.infinity()]
    rows = []
    for side in ("plus", "minus"):
        scan = integrability_scan(example_coframe(), side, grid, pts, cfg.tol)
        rows += [(side, xi.label(), r) for xi, r in scan.residuals]
        smallest = sorted(scan.residuals, key=lambda t: t[1])[:4]
        print(f"{side:5}: {len(scan.candidates)}/{len(grid)} integrable; smallest residuals:")
        for xi, r in smallest:
            print(f"        xi={xi.label():24} {r:.3e}")
    if cfg.csv is not None:
        with cfg.csv.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["side", "xi", "max_nijenhuis"])
            w.writerows(rows)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name}", type=Path if name == "csv" else type(default) if default is not None else str,
                        default=default)
    main(Config(**vars(ap.parse_args())))
