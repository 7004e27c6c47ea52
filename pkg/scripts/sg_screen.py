"""Stern-Gerlach screen images for the Ag preset: quantum pure, fully mixed and classical isotropic."""

import argparse
from pathlib import Path

from quantum_ratio.presets import ag_stern_gerlach
from quantum_ratio.report import csv_text
from quantum_ratio.sterngerlach import classical_sg_ensemble, quantum_screen_image, run_sg_pure


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sg_screen", help="output directory")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--bins", type=int, default=512)
    args = ap.parse_args()

    pre = ag_stern_gerlach()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep = run_sg_pure(pre.field, pre.packet, pre.spin, pre.particle.size_l0)
    quantum = quantum_screen_image(pre.field, pre.packet, tuple(rep["weights"]), args.bins)
    classical = classical_sg_ensemble(pre.field, pre.packet, n_samples=args.samples, seed=args.seed, n_bins=args.bins)
    config = {"preset": pre.name, "samples": args.samples, "seed": args.seed, "bins": args.bins}
    for name, img in (("quantum", quantum), ("classical", classical)):
        (out / f"{name}.csv").write_text(csv_text(["z_m", "weight"], img.rows(), config))
        print(f"{name}: {len(img.band_centers)} band(s) at", ", ".join(f"{c:.4e} m" for c in img.band_centers))
    (out / "report.json").write_text(rep.to_json())
    q = rep["quantum_ratio"]["q"]
    print(f"separation {rep['separation']:.4e} m, Q = {q:.4g} ({rep['classification']['class']})")
    print(pre.derivation)


if __name__ == "__main__":
    main()
