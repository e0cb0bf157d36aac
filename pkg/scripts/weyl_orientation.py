"""Eigenvalues of both Weyl halves of the Ricci-flat example under each orientation.

With dx1^dx2^dx3^dx4 positive the half that vanishes is W-, and W+ has the
eigenvalue pattern (l, l, -2l); flipping the orientation swaps the halves.

    python scripts/weyl_orientation.py --points 5
"""

import argparse
from dataclasses import dataclass

import numpy as np

from akgeo.constructions import UPRIME, example_metric
from akgeo.domains import sample_domain
from akgeo.geometry import petrov_classify, weyl_halves


@dataclass
class Config:
    points: int = 5
    seed: int = 42


def main(cfg: Config) -> None:
    g = example_metric()
    for p in sample_domain(UPRIME, cfg.points, cfg.seed):
        u = 2 * p[0] - 2 * (p[2] ** 2 + p[3] ** 2)
        print(f"point {np.round(p, 3)}  u={u:.3f}")
        for o in (1, -1):
            for half in weyl_halves(g, p, orientation=o):
                ev = np.round(half.eigenvalues.real, 6)
                kind = petrov_classify(half).value
                print(f"   orientation {o:+d}  W{half.side.value:5}  type {kind}  eigenvalues {ev}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=Config.points)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
