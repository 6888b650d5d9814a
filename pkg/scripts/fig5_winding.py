"""Winding number along lam = lam0 exp(i pi/3)."""

import argparse
import math
from pathlib import Path

from nhxy import runner


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=59)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    obs = runner.ObservableSet(winding=True, phase=True)
    pts = runner.run_sweep(runner.Ray(math.pi / 3, 0.1, 3.0, args.steps), args.gamma,
                           runner.RunConfig(obs))
    with open(args.out_dir / "winding_ray.csv", "w", encoding="utf-8", newline="") as fh:
        runner.write_points_csv(fh, pts, obs, timestamp=False)
    for p in pts:
        print(f"lam0={p.param:.3f}  {p.phase:>5}  W={p.winding:+.1f}")


if __name__ == "__main__":
    main()
