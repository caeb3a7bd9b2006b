"""Rerun the four benchmark cases and the resource table into one output directory.

    python scripts/reproduce.py --out results --seed 0 --repeats 10
"""

import sys

from leakgrover.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce", *sys.argv[1:]]))
