"""Phase diagram over the complex field plane, with the winding number per cell."""

import argparse
from pathlib import Path

from nhxy import runner


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, nargs="+", default=[1.0, 0.5])
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    grid = runner.PhaseGrid(-2, 2, -2, 2, args.step)
    cfg = runner.RunConfig(runner.ObservableSet(phase=True, winding=True), workers=args.workers)
    for g in args.gamma:
        pts = runner.run_phase_diagram(grid, g, cfg)
        path = args.out_dir / f"phase_diagram_gamma{g:g}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            runner.write_phase_csv(fh, pts, timestamp=False)
        counts = {}
        for p in pts:
            counts[p.phase] = counts.get(p.phase, 0) + 1
        print(f"gamma={g:g}: {len(pts)} cells {dict(sorted(counts.items()))} -> {path}")


if __name__ == "__main__":
    main()
