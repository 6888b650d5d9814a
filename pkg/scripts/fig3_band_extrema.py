"""Band extrema along lam = lam0 exp(i pi/3) and the full bands at the LL point."""

import argparse
import math
from pathlib import Path

import numpy as np

from nhxy import runner
from nhxy.model import ModelParams
from nhxy.spectrum import band_extrema, full_bands


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=291)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for lam0 in np.linspace(0.1, 3.0, args.steps):
        ext = band_extrema(ModelParams.polar(1.0, lam0, math.pi / 3))
        rows.append({"lam0": runner.format_value(lam0), "min_abs_re": runner.format_value(ext.min_abs_re),
                     "argmin_re_k": runner.format_value(ext.argmin_re_k),
                     "min_abs_im": runner.format_value(ext.min_abs_im),
                     "argmin_im_k": runner.format_value(ext.argmin_im_k)})
    with open(args.out_dir / "band_extrema.csv", "w", encoding="utf-8", newline="") as fh:
        runner.write_csv(fh, list(rows[0]), rows, timestamp=False)
    bands = full_bands(ModelParams.polar(1.0, 1.5, math.pi / 3), 512)
    with open(args.out_dir / "bands_LL.csv", "w", encoding="utf-8", newline="") as fh:
        runner.write_csv(fh, ["k", "re_energy", "im_energy"],
                         [dict(zip(["k", "re_energy", "im_energy"], map(runner.format_value, r)))
                          for r in bands.rows()], timestamp=False)
    print(f"Im eps changes sign at k = {bands.sign_changes} (arccos 0.75 = {math.acos(0.75):.6f})")


if __name__ == "__main__":
    main()
