#!/usr/bin/env python3
"""Classify a few canonical channels and print the verdict table."""

import sys

from bcsi.classifier import classify_all
from bcsi.probability import (binary_symmetric_pair, blackwell_channel,
                              noiseless_channel, product_channel)


def main() -> int:
    channels = {
        "noiseless binary": noiseless_channel(2),
        "crossover 0.1 / 0.2": binary_symmetric_pair(0.1, 0.2),
        "crossover 0.2 / 0.1 (swapped)": binary_symmetric_pair(0.2, 0.1),
        "blackwell maps": blackwell_channel(),
        "y2 constant": product_channel([[0.9, 0.1], [0.2, 0.8]], [[1.0], [1.0]]),
    }
    props = ("deterministic", "degraded", "less_noisy", "more_capable")
    header = f"{'channel':<30}" + "".join(f"{p:>14}" for p in props)
    print(header)
    print("-" * len(header))
    for name, ch in channels.items():
        verdicts = classify_all(ch, resolution=16)
        cells = "".join(f"{str(verdicts[p].holds):>14}" for p in props)
        print(f"{name:<30}{cells}")
    print("\ngrid-based verdicts (less_noisy, more_capable) mean: no "
          "counterexample found at the recorded resolution")
    return 0


if __name__ == "__main__":
    sys.exit(main())
