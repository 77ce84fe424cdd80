"""Reference CLI output shipped with the package for determinism checks."""

from importlib import resources

GOLDEN_ARGV = ["qfi-sweep", "--m", "0.5", "--sigma", "0.5", "--a", "1.0", "--t-max", "1.0",
               "--steps", "4", "--n-points", "1025"]
GOLDEN_FILE = "qfi_sweep_small.csv"


def golden_text():
    return resources.files("gravbounds").joinpath("data", GOLDEN_FILE).read_text()
