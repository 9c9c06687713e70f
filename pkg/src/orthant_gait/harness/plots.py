"""Stand-alone plotting scripts written next to the experiment CSVs.

The scripts need pandas and matplotlib at the time they are run; the package itself
does not import matplotlib.
"""

from pathlib import Path

from orthant_gait.utils.files import atomic_write_text

LEARNING_CURVES_SCRIPT = "plot_learning_curves.py"
DISTANCES_SCRIPT = "plot_distances.py"

_LEARNING_CURVES_TEMPLATE = '''\
"""Mean normalised return against environment steps, one line per reward setup."""

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

HERE = Path(__file__).parent


def main() -> None:
    curves = pd.read_csv(HERE / "learning_curves.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for setup, group in curves.groupby("setup", sort=False):
        ax.plot(group["step"], group["mean_normalized_return"], label=setup)
    ax.axhline(1.0, color="black", linestyle="--", linewidth=0.8, label="baseline")
    ax.set_xlabel("environment steps")
    ax.set_ylabel("normalised return")
    ax.legend()
    fig.tight_layout()
    fig.savefig(HERE / "learning_curves.png", dpi=150)


if __name__ == "__main__":
    main()
'''

_DISTANCES_TEMPLATE = '''\
"""Best walking distance per seed for every reward setup against the baseline."""

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

HERE = Path(__file__).parent


def main() -> None:
    distances = pd.read_csv(HERE / "distances.csv")
    baseline = distances[distances["setup"] == "baseline"]["distance"].iloc[0]
    runs = distances[distances["setup"] != "baseline"]
    setups = list(dict.fromkeys(runs["setup"]))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.boxplot(
        [runs[runs["setup"] == setup]["distance"] for setup in setups],
        labels=setups,
    )
    ax.axhline(baseline, color="black", linestyle="--", linewidth=0.8, label="baseline")
    ax.set_ylabel("best walking distance at t = 10 s (m)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(HERE / "distances.png", dpi=150)


if __name__ == "__main__":
    main()
'''


def write_plot_scripts(directory: Path) -> list[Path]:
    paths = []
    for name, text in (
        (LEARNING_CURVES_SCRIPT, _LEARNING_CURVES_TEMPLATE),
        (DISTANCES_SCRIPT, _DISTANCES_TEMPLATE),
    ):
        path = directory / name
        atomic_write_text(path, text)
        paths.append(path)
    return paths
