"""Talbot carpet behind the C70 grating plus the self-image check at both resonant orders."""

import argparse
import json
from pathlib import Path

import numpy as np

from quantum_ratio.interferometry import PointSource, self_image_check, talbot_carpet, talbot_length
from quantum_ratio.presets import c70_talbot
from quantum_ratio.report import csv_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="talbot", help="output directory")
    ap.add_argument("--steps", type=int, default=64, help="carpet rows")
    ap.add_argument("--bins", type=int, default=512, help="carpet columns")
    args = ap.parse_args()

    pre = c70_talbot()
    geo = pre.geometry(2.0)
    lt = talbot_length(pre.grating.period, pre.wavelength)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    distances = np.linspace(geo.l2 / args.steps, geo.l2, args.steps)
    x, rows = talbot_carpet(pre.grating, geo, distances, n_bins=args.bins)
    cols = ["z_m"] + [f"x_{i}" for i in range(len(x))]
    table = [[float(z), *r.tolist()] for z, r in zip(distances, rows)]
    config = {"preset": pre.name, "steps": args.steps, "bins": args.bins}
    (out / "carpet.csv").write_text(csv_text(cols, table, config))
    summary = {"wavelength": pre.wavelength, "talbot_length": lt, "l1": geo.l1, "l2": geo.l2, "m1": geo.m1,
               "m2": geo.m2, "x_m": x.tolist()}
    for order in (2.0, 1.0):
        r = self_image_check(PointSource(), pre.grating, pre.geometry(order))
        summary[f"order_{order:g}"] = {"correlation": r.correlation, "best_shift": r.best_shift,
                                        "period_at_g3": r.period_at_g3}
        print(f"order {order:g}: correlation {r.correlation:.4f}, shift {r.best_shift / r.period_at_g3:+.3f} periods")
    (out / "carpet.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"L_T = {lt:.4g} m, l2 = {geo.l2:.4g} m, M2 = {geo.m2:.4g}")


if __name__ == "__main__":
    main()
