"""Masked spectral radius against sqrt(K L) over a range of window sizes.

    python scripts/spectrum_probe.py --sizes 1e4,1e5,1e6 --H0 50 --H 1000
"""

import argparse
import sys

from divexpand.cli import ExperimentConfig, parse_schedule, spectrum_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1e4,1e5")
    ap.add_argument("--H0", type=int, default=50)
    ap.add_argument("--H", type=int, default=1000)
    ap.add_argument("--K", type=float, default=2.0)
    ap.add_argument("--ell", type=int, default=3)
    ap.add_argument("--no-mask", action="store_true")
    args = ap.parse_args(argv)
    print("N,primes,scriptL,rho,ratio,mask_fraction,residual")
    for N in parse_schedule(args.sizes):
        cfg = ExperimentConfig(N=N, H0=args.H0, H=args.H, K=args.K, ell=args.ell,
                               mask=not args.no_mask)
        rep = spectrum_report(cfg)
        print(f"{N},{rep['primes']},{rep['scriptL']:.5f},{rep['spectral_radius']:.6f},"
              f"{rep['ratio']:.4f},{rep['mask_fraction']:.4f},{rep['residual']:.2e}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
