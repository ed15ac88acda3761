"""Print the logarithmic Chowla sum over a schedule of x values as CSV.

    python scripts/chowla_series.py --schedule 1e3,1e4,1e5,1e6,1e7 --w 1000
"""

import argparse
import csv
import sys

from divexpand.arith import log_chowla_series, log_chowla_window
from divexpand.cli import parse_schedule


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--schedule", default="1e3,1e4,1e5,1e6,1e7")
    ap.add_argument("--w", type=float, default=0.0, help="also print the window sum over [x/w, x]")
    args = ap.parse_args(argv)
    wr = csv.writer(sys.stdout, lineterminator="\n")
    wr.writerow(["x", "log_chowla_sum"] + (["window_sum"] if args.w else []))
    for x, v in log_chowla_series(parse_schedule(args.schedule)):
        row = [x, f"{v:.8f}"]
        if args.w:
            row.append(f"{log_chowla_window(x, args.w):.8f}" if args.w <= x else "")
        wr.writerow(row)


if __name__ == "__main__":
    main()
