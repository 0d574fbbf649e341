"""Draw the space-time pattern of an LCA rule and estimate its growth dimension."""

import argparse
import json

from fractalcodes.algebra import parse_poly
from fractalcodes.lca import hausdorff_estimate, render_pbm, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rule", default="1+x")
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--steps", type=int, default=63)
    ap.add_argument("--pbm", help="write the image here")
    args = ap.parse_args()
    f = parse_poly(args.rule, args.p, ["x"])
    traj = run(f, parse_poly("1", args.p, ["x"]), args.steps)
    if args.pbm:
        with open(args.pbm, "wb") as fh:
            fh.write(render_pbm(traj))
    T = 1 << max(4, (args.steps + 1).bit_length() - 1)
    print(json.dumps({"rule": args.rule, "p": args.p, "T": T,
                      "hausdorff_dimension": hausdorff_estimate(f, T)}))


if __name__ == "__main__":
    main()
