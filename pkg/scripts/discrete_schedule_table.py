#!/usr/bin/env python3
"""Print an SNR-scaled discrete noise schedule next to its base schedule.

Reports beta', alpha_bar', and the per-step SNR ratio (which should equal
the scale factor c everywhere).
"""

import argparse

import numpy as np

from dctpipe.schedule import discrete_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--beta-start", type=float, default=1e-4)
    ap.add_argument("--beta-end", type=float, default=0.02)
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--rows", type=int, default=12, help="rows to print, evenly spaced")
    args = ap.parse_args()

    base = discrete_schedule(args.steps, args.beta_start, args.beta_end, c=1.0)
    scaled = discrete_schedule(args.steps, args.beta_start, args.beta_end, c=args.c)
    snr_base = base.alpha_bar / (1.0 - base.alpha_bar)
    snr_scaled = scaled.alpha_bar / (1.0 - scaled.alpha_bar)

    idx = np.unique(np.linspace(0, args.steps - 1, args.rows).astype(int))
    print(f"steps={args.steps} beta=[{args.beta_start},{args.beta_end}] c={args.c}")
    print(f"{'t':>5} {'beta':>12} {'beta_c':>12} {'abar':>12} {'abar_c':>12} {'snr_ratio':>10}")
    for i in idx:
        print(
            f"{i + 1:>5} {base.beta[i]:>12.6g} {scaled.beta[i]:>12.6g} "
            f"{base.alpha_bar[i]:>12.6g} {scaled.alpha_bar[i]:>12.6g} "
            f"{snr_scaled[i] / snr_base[i]:>10.6f}"
        )
    worst = np.abs(snr_scaled / snr_base / args.c - 1.0).max()
    print(f"max |snr'/snr - c| / c over all steps: {worst:.3e}")


if __name__ == "__main__":
    main()
