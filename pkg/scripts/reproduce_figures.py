"""Write the tables behind the four standard plots as CSV files.

    python3 scripts/reproduce_figures.py [--out results/]

Each table is also reproducible with the ``collective-work`` CLI; the
equivalent command is printed next to every file written.
"""
import argparse
import time
from pathlib import Path

from collective_work import cli

HERE = Path(__file__).resolve().parent
QUTRIT = HERE / "states" / "qutrit_018.state"
QUBIT_BATH = HERE / "states" / "qubit_bath.state"

GAMMA_GRID = "0:0.95:20"

JOBS = {
    "qubit_sweep_p0.8": ["qubit-sweep", "--p", "0.8", "--N", "10,25,50,100", "--gamma", GAMMA_GRID],
    "qutrit_N20": ["qudit-sweep", "--state", str(QUTRIT), "--N", "20", "--gamma", GAMMA_GRID, "--all-lattice"],
    "qutrit_N50": ["qudit-sweep", "--state", str(QUTRIT), "--N", "50", "--gamma", GAMMA_GRID, "--all-lattice"],
    "min_spins_p0.95": ["min-spins", "--p", "0.95", "--P0", "0.99", "--fraction", "0:0.85:18,0.86,0.87,0.88,0.89"],
    "bath_p0.8_beta1": ["bath-sweep", "--state", str(QUBIT_BATH), "--N", "10,25,50,100", "--gamma", GAMMA_GRID],
    "schedule_c0.3": ["schedule", "--c", "0.3", "--d", "2", "--N", "10,30,100,300,1000,3000,10000",
                         "--epsilon", "0.01"],
}


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--only", nargs="*", choices=sorted(JOBS), help="subset of tables")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for name in args.only or JOBS:
        argv = JOBS[name] + ["--out", str(out / f"{name}.csv")]
        t0 = time.perf_counter()
        code = cli.main(argv)
        status = max(status, code)
        print(f"{name}.csv  exit={code}  {time.perf_counter() - t0:.2f}s  collective-work {' '.join(argv)}")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
