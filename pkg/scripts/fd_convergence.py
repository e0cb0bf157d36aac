"""Error of finite-difference Christoffel symbols against the exact ones as the step shrinks.

The fourth-order stencil should lose about four digits per decade of h
until round-off takes over.

    python scripts/fd_convergence.py --points 3
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from akgeo.checks import fd_christoffel
from akgeo.constructions import UPRIME, example_metric
from akgeo.domains import sample_domain


@dataclass
class Config:
    points: int = 3
    seed: int = 42
    steps: list[float] = field(default_factory=lambda: [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5])


def main(cfg: Config) -> None:
    g = example_metric()
    pts = sample_domain(UPRIME, cfg.points, cfg.seed)
    exact = g.connection.values(pts)
    metric_at = lambda q: g.values(q[None, :])[0]
    print(f"{'h':>8}  max |Gamma_fd - Gamma|")
    for h in cfg.steps:
        err = max(float(np.abs(fd_christoffel(metric_at, p, h) - exact[k]).max())
                  for k, p in enumerate(pts))
        print(f"{h:8.0e}  {err:.3e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=Config.points)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
