"""Large-spin S_z distributions: concentration of k/N around cos^2(theta/2) as N grows."""

import argparse
import math

from quantum_ratio.sterngerlach import large_spin_coefficients, spike_analysis


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=math.pi / 4)
    ap.add_argument("--N", type=int, nargs="+", default=[10, 100, 1000, 10_000, 100_000, 1_000_000])
    args = ap.parse_args()
    print(f"{'N':>9} {'mean k/N':>12} {'std*sqrt(N)':>14} {'TV to Gaussian':>15}")
    for n in args.N:
        a = spike_analysis(large_spin_coefficients(n, args.theta))
        print(f"{n:>9} {a.mean_x:>12.9f} {a.std_x * math.sqrt(n):>14.11f} {a.gaussian_tv_error:>15.3e}")
    print(f"x0 = cos^2(theta/2) = {math.cos(args.theta / 2) ** 2:.9f}")


if __name__ == "__main__":
    main()
