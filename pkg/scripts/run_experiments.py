"""Regenerate the reference sweeps and plots into scripts/out/.

Usage: python3 scripts/run_experiments.py [--parallel N]
"""

import argparse
import sys
from pathlib import Path

from soilmpt import cli

HERE = Path(__file__).resolve().parent
SCENARIO = HERE / "sphere.json"


def runs(out: Path, parallel: str):
    common = ["--scenario", str(SCENARIO), "--parallel", parallel]
    yield ["sweep-frequency", *common, "--out", str(out / "frequency.csv"), "--svg"]
    yield ["sweep-frequency", *common, "--mode", "dipole",
           "--out", str(out / "frequency_dipole.csv"), "--svg"]
    yield ["sweep-depth", *common, "--depths", "0.2,0.3,0.4,0.5",
           "--out", str(out / "depth.csv"), "--svg"]
    yield ["sweep-size", *common, "--alphas", "0.0125,0.025,0.05,0.1",
           "--out", str(out / "size.csv"), "--svg"]
    yield ["soil-response", *common, "--sigmas", "0.01,0.1,1,1.6", "--murs", "1.0006,1.021,1.076",
           "--out", str(out / "soil_response.csv"), "--svg"]
    yield ["rate-study", *common, "--alphas", "0.1,0.05,0.025,0.0125",
           "--out", str(out / "rate_fixed_nu.csv")]
    yield ["rate-study", *common, "--alphas", "0.1,0.05,0.025,0.0125", "--hold", "fixed_omega",
           "--out", str(out / "rate_fixed_omega.csv")]
    yield ["mpt-sphere", "--alpha", "0.1", "--sigma", "1e6", "--omin", "1e2", "--omax", "1e8",
           "--n", "60", "--out", str(out / "sphere_signature.csv")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--parallel", default="1")
    ap.add_argument("--out", type=Path, default=HERE / "out")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for argv in runs(args.out, args.parallel):
        print("soilmpt", " ".join(argv), flush=True)
        code = cli.run(argv)
        if code not in (cli.EXIT_OK, cli.EXIT_NUMERICAL):
            sys.exit(code)


if __name__ == "__main__":
    main()
