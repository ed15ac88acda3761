"""Endpoint statistics of the naive random-walk model, with a text histogram.

    python scripts/walk_stats.py --H0 11 --H 60 --k 5 --samples 1000000
"""

import argparse

from divexpand.arith import build_prime_set
from divexpand.walks import simulate_naive_walk


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--H0", type=int, default=11)
    ap.add_argument("--H", type=int, default=60)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    P = build_prime_set(args.H0, args.H)
    st = simulate_naive_walk(P, args.k, args.samples, seed=args.seed)
    print(f"|P|={len(P)} L={P.scriptL:.4f} k={st.k} samples={st.samples}")
    print(f"mean={st.mean:.4f} stderr={st.stderr:.4f} mean/stderr={st.mean / st.stderr:.2f}")
    print(f"variance={st.variance:.2f} expected={st.expected_variance:.2f} "
          f"ratio={st.variance / st.expected_variance:.4f}")
    top = max(st.counts.max(), 1)
    for lo, hi, c in zip(st.bin_edges[:-1], st.bin_edges[1:], st.counts):
        print(f"{lo:9.1f} {hi:9.1f} {c:8d} " + "#" * int(60 * c / top))


if __name__ == "__main__":
    main()
