"""
Kernel Toolkit - Main Entry Point

Runs one batch command over CSV datasets, for example:

    python main.py gram --input data.csv --kernel rbf --gamma auto --output K.csv
    python main.py validate --input K.csv --format json
    python main.py embed --input data.csv --p 2 --save-model model.npz --output Y.csv
    python main.py oos-embed --model model.npz --input new.csv
    python main.py nystrom --input data.csv --m 20 --strategy greedy_pivot

See `python main.py <command> --help` for the options of each command.
"""

import sys

from src.cli import run


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
