#!/usr/bin/env python3
"""Noiseless signal recovery: smooth f(t) = sin(5t) + sin(3t) with the
Gaussian kernel and apply the order-n truncated deconvolution series.

The default configuration (eps = 0.55, n = 90) attenuates the angular-
frequency-5 tone to 5.2e-4, of which 91 series terms recover only 4.6%;
run with --epsilon 0.275 to see an essentially perfect reconstruction."""
import argparse
import json

from deconv.experiments import ExperimentSpec, run_fig2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig2", help="output directory")
    ap.add_argument("--epsilon", type=float, default=None, help="kernel scale override")
    ap.add_argument("--order", type=int, default=None, help="series order override")
    args = ap.parse_args()
    overrides = {}
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.order is not None:
        overrides["order"] = args.order
    summary = run_fig2(ExperimentSpec.fig2(**overrides), args.out)
    print(json.dumps(summary, sort_keys=True, indent=2))


if __name__ == "__main__":
    main()
