"""Run the Ricci-flat example suite and print one line per report.

    python scripts/verify_example.py --seed 7 --samples 200 --out reports.jsonl
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

from akgeo.checks import SuiteOptions, run_check_suite


@dataclass
class Config:
    seed: int = 42
    samples: int = 100
    out: Path | None = None


def main(cfg: Config) -> int:
    reports, code = run_check_suite("ricci-flat", SuiteOptions(cfg.seed, cfg.samples))
    for r in reports:
        c = r.detail.get("criterion", "-")
        print(f"{c:>3}  {r.status:5}  {r.name:32} residual={r.max_residual:<11.3g} tol={r.tol:g}")
    if cfg.out is not None:
        cfg.out.write_text("".join(r.to_json() + "\n" for r in reports))
    return code


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--out", type=Path)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
