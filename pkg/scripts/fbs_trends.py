"""Distance trend of padded fractal Bacon-Shor codes for related and unrelated rules.

Each size is searched under a candidate budget; a stopped search is reported
as a lower bound. The fitted exponent is printed only when every point is exact.
"""

import argparse
import json
import math

from fractalcodes.algebra import parse_poly
from fractalcodes.errors import BudgetExceeded
from fractalcodes.subsystem import build_fbs, dressed_distance_detail


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f1", default="1+y")
    ap.add_argument("--f2", default="1+y+y^2")
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--L3", type=int, default=2)
    ap.add_argument("--wmax", type=int, default=8)
    ap.add_argument("--budget", type=int, default=10 ** 7)
    args = ap.parse_args()
    Y = lambda t: parse_poly(t, 2, ["y"])
    pts = []
    for L in args.sizes:
        g = build_fbs(L, L, args.L3, Y(args.f1), Y(args.f2), pad=True)
        row = {"L": L, "n": g.n, "k": g.protected.shape[0] // 2}
        try:
            row["d"] = dressed_distance_detail(g, args.wmax, budget=args.budget)["d"]
            row["exact"] = row["d"] is not None
        except BudgetExceeded as e:
            row["d"], row["exact"] = e.partial["ruled_out_below"], False
        pts.append(row)
        print(json.dumps(row))
    if len(pts) >= 2 and all(r["exact"] for r in pts):
        a, b = pts[0], pts[-1]
        eta = math.log(b["d"] / a["d"]) / math.log(b["L"] / a["L"])
        print(json.dumps({"eta": eta}))
    else:
        print(json.dumps({"eta": None, "note": "inconclusive at these sizes",
                          "sizes": args.sizes}))


if __name__ == "__main__":
    main()
