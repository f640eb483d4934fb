#!/usr/bin/env python3
"""Sweep convergent orders for the unit/divisor-count pair.

Prints, per order N: the common denominator's bit size, both measured
approximation exponents, and the maximal admissible exponent of the
linear-form product instance.

Usage:
    python scripts/exponent_sweep.py [--max-order 10]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from transcheck.approx import build_subspace_instance, convergent, measured_exponent
from transcheck.exactcore import RefusalError
from transcheck.relations import unit_divisor_pair_spec


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-order", type=int, default=10)
    args = parser.parse_args()
    spec = unit_divisor_pair_spec()
    print("%4s %12s %12s %12s %14s" % ("N", "q bits", "delta_N(1)", "delta_N(d)", "delta'_max"))
    for order in range(1, args.max_order + 1):
        q_bits = convergent(spec, 1, order).q.bit_length()
        exps = []
        for i in (1, 2):
            try:
                exps.append("%.6f" % float(measured_exponent(spec, i, order)))
            except RefusalError:
                exps.append("refused")
        try:
            inst = build_subspace_instance(spec, order, precision=3)
            admissible = ("%.6f" % float(inst.delta_prime_max)
                          if inst.delta_prime_max is not None else "unbounded")
        except RefusalError:
            admissible = "refused"
        print("%4d %12d %12s %12s %14s" % (order, q_bits, exps[0], exps[1], admissible))
    return 0


if __name__ == "__main__":
    sys.exit(main())
