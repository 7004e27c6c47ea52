"""Exact versus WKB transmission for rectangular barriers over a kappa*w ladder."""

import argparse
import math

from scipy import constants as sc

from quantum_ratio.tunneling import BarrierSpec, transfer_matrix_transmission, wkb_transmission


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--energy-ev", type=float, default=1.0)
    ap.add_argument("--height-ratio", type=float, default=2.0, help="V0 / E")
    ap.add_argument("--kw", type=float, nargs="+", default=[1, 2, 3, 5, 10, 20, 50, 400])
    args = ap.parse_args()
    m = sc.m_e
    e = args.energy_ev * sc.electron_volt
    v0 = args.height_ratio * e
    kappa = math.sqrt(2 * m * (v0 - e)) / sc.hbar
    print(f"{'kappa*w':>8} {'ln T exact':>14} {'ln T WKB':>12} {'|ratio-1|':>10} {'T+R-1':>10}")
    for kw in args.kw:
        b = BarrierSpec.rectangle(v0, kw / kappa)
        ex = transfer_matrix_transmission(b, e, m)
        wk = wkb_transmission(b, e, m)
        ratio = abs(wk.log_transmission / ex.log_transmission - 1)
        print(f"{kw:>8g} {ex.log_transmission:>14.6f} {wk.log_transmission:>12.4f} {ratio:>10.4f} "
              f"{ex.transmission + ex.reflection - 1:>10.1e}")


if __name__ == "__main__":
    main()
