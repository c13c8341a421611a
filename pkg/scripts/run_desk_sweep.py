#!/usr/bin/env python3
"""Run the desk-scale QPSK SNR sweep and write the per-SNR CSV.

Same engine as `widesig sweep`; kept as a script so the default experiment
is one command with no config file.
"""

import argparse
import time

from widesig.cli import SweepSpec, run_sweep


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--record-length", type=int, default=1 << 21)
    ap.add_argument("--workers", type=int, default=None)
    return ap.parse_args()


def main():
    args = parse_args()
    spec = SweepSpec(seed=args.seed, repeats=args.repeats, record_length=args.record_length)
    t0 = time.time()
    report = run_sweep(spec, workers=args.workers)
    report.to_csv(args.out)
    print(f"wrote {args.out} in {time.time() - t0:.0f}s")
    for snr in sorted(report.per_snr):
        row = report.per_snr[snr][0]
        print(f"  snr {snr:+6.1f} dB: precision {row.precision:.3f}  recall {row.recall:.3f}  f1 {row.f1:.3f}")


if __name__ == "__main__":
    main()
