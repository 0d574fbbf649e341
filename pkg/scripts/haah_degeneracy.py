"""Logical qubit count of toric2d fractalized with second-order rules, versus torus size."""

import argparse
import json

from fractalcodes.algebra import LaurentPoly, parse_poly
from fractalcodes.codes import build_model, instantiate, logical_count
from fractalcodes.fractalizer import LcaRuleSet, fractalize_code


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 5, 6, 8])
    args = ap.parse_args()
    Y = lambda t: parse_poly(t, 2, ["y"])
    rules = LcaRuleSet(2, 2, 1, 2, ((Y("1+y+y^2"), LaurentPoly.zero(2, 1)), (Y("1+y"), Y("1+y+y^2"))))
    spec = fractalize_code(build_model("toric2d"), rules)
    for L in args.sizes:
        inst = instantiate(spec, (L, L, L))
        print(json.dumps({"L": L, "n": inst.n, "k": logical_count(inst)}))


if __name__ == "__main__":
    main()
