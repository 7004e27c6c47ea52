"""Regenerate the reference doubling times, quantum ratios and spin distributions."""

import argparse
import sys

from quantum_ratio.cli import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reference_tables", help="output directory")
    args = ap.parse_args()
    return run(["paper-tables", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
