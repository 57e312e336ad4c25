#!/usr/bin/env python3
"""Example external objective speaking the line-per-evaluation protocol.

Reads one JSON request {"x": [v0, ...]} per line from stdin and writes one
decimal float per line to stdout. The process stays alive for a whole run, so
expensive one-time setup (loading data, warming a model) pays off across
evaluations.

This stand-in "training job" interprets the incoming coordinates as
regularisation-style hyperparameters searched in exponent space: the tuner
proposes x, the job trains with 10**x. Replace synthetic_loss with a real
train-and-validate call to tune an actual model.
"""

import json
import math
import sys


def synthetic_loss(hyper):
    # Smooth unimodal stand-in for a validation loss over three
    # hyperparameters, minimised near (4, 2, 0.5).
    target = (4.0, 2.0, 0.5)
    scale = (2.0, 1.5, 0.75)
    z = sum(((h - t) / s) ** 2 for h, t, s in zip(hyper, target, scale))
    return 1.0 - math.exp(-0.5 * z)


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        x = json.loads(line)["x"]
        print(repr(synthetic_loss(x)))
        sys.stdout.flush()


if __name__ == "__main__":
    main()
