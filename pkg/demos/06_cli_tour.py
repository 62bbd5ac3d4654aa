"""Run the command-line tool on the JSON specs in demos/specs.

    PYTHONPATH=src python3 demos/06_cli_tour.py
"""

import shlex
import sys
from pathlib import Path

from gpdt.cli import main

here = Path(__file__).resolve().parent / "specs"

runs = [
    "build {s}/pair3.json",
    "gap {s}/z3.json",
    "gap {s}/sl2_5.json --format csv",
    "projection {s}/pair2.json --format csv",
    "constants {s}/union.json --reps regular,trivial",
    "hls Z pow2 8",
    "hls SL2Z 3,5,7 --unnested",
    "witness {s}/hls6.json 3",
    "witness {s}/hls6.json 6",
    "check-kernels {s}/phi_one.json",
    "gns {s}/neg_pair3.json --t 0.5",
    "expander {s}/graphs.json",
]

for cmd in runs:
    argv = shlex.split(cmd.format(s=here))
    print(f"$ gpdt {cmd.format(s='demos/specs')}")
    sys.stdout.flush()
    code = main(argv)
    print(f"[exit {code}]\n")
