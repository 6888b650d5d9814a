"""Correlator and entropy scaling at the FM, LL and PM showcase points, plus the two sweeps."""

import argparse
import cmath
import math
from pathlib import Path

from nhxy import runner
from nhxy.contractions import contraction_table
from nhxy.correlation import correlator_curve, log_fit, scaling_fit
from nhxy.entanglement import entropy_curve
from nhxy.model import ModelParams

POINTS = {"FM": cmath.rect(0.5, math.pi / 3), "LL": cmath.rect(1.5, math.pi / 3),
          "PM": cmath.rect(3.0, math.pi / 3)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r-max", type=int, default=100)
    ap.add_argument("--L-max", type=int, default=100)
    ap.add_argument("--steps", type=int, default=60)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    with open(args.out_dir / "scaling_curves.csv", "w", encoding="utf-8", newline="") as fh:
        rows = []
        for name, lam in POINTS.items():
            p = ModelParams(1.0, lam)
            table = contraction_table(p, max(args.r_max, args.L_max))
            cx = {r.r: r.value for r in correlator_curve(table, range(1, args.r_max + 1))}
            s = {e.L: e.value for e in entropy_curve(p, range(1, args.L_max + 1))}
            for x in range(1, max(args.r_max, args.L_max) + 1):
                c, e = cx.get(x, complex("nan")), s.get(x, complex("nan"))
                rows.append({"phase": name, "x": str(x), "re_cx": runner.format_value(c.real),
                             "im_cx": runner.format_value(c.imag), "re_s": runner.format_value(e.real),
                             "im_s": runner.format_value(e.imag)})
            if name == "LL":
                fit = scaling_fit([(r, cx[r].real) for r in range(10, args.r_max + 1)], (10, args.r_max))
                slope, _, _ = log_fit([(L, s[L].real) for L in range(10, args.L_max + 1)], (10, args.L_max))
                print(f"LL: Re C^x ~ r^{fit.exponent:.4f}, Re S_L slope {slope:.4f} (c = {3 * slope:.3f})")
        runner.write_csv(fh, list(rows[0]), rows, timestamp=False)

    obs = runner.ObservableSet(correlator=(2,), entropy=(2,), phase=True)
    cfg = runner.RunConfig(obs, workers=args.workers)
    paths = {"ray": runner.Ray(math.pi / 3, 0.1, 3.0, args.steps),
             "segment": runner.Segment(-2 + 3j, 2 - 1j, args.steps)}
    for name, path in paths.items():
        pts = runner.run_sweep(path, 1.0, cfg)
        out = args.out_dir / f"sweep_{name}.csv"
        with open(out, "w", encoding="utf-8", newline="") as fh:
            runner.write_points_csv(fh, pts, obs, timestamp=False, derivatives=True)
        with open(out.with_suffix(".gp"), "w", encoding="utf-8") as fh:
            fh.write(runner.gnuplot_script(out.name, obs))
        print(f"{name} sweep: {len(pts)} rows, {runner.failed(pts)} failed -> {out}")


if __name__ == "__main__":
    main()
