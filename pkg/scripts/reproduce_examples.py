#!/usr/bin/env python3
"""
Script to regenerate every example table and figure into results/

Usage:
    python scripts/reproduce_examples.py [--recovery]
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.core.config import get_settings  # noqa: E402
from app.main import main  # noqa: E402

ROOT = Path(__file__).parent.parent
SCENES = ROOT / "scenes"


def runs(results: Path, recovery: bool):
    """(label, argv) for every reproducible artifact"""
    extra = ["--recovery"] if recovery else []
    for name in ("triple", "nuple", "butterfly"):
        yield name, ["example", name, "--csv", str(results / f"{name}.csv"),
                     "--svg", str(results / f"{name}.svg"), *extra]
    yield "triple-r2", ["example", "triple", "--r", "2", "--csv", str(results / "triple_r2.csv")]
    yield "infinite-triple", ["example", "infinite-triple", "--levels", "20",
                              "--csv", str(results / "infinite_triple.csv"),
                              "--svg", str(results / "infinite_triple.svg")]
    yield "area", ["area", "--scene", str(SCENES / "triple_point.json"),
                   "--csv", str(results / "area_triple.csv"), "--json", str(results / "area_triple.json")]
    for loop in ("triangle_loop", "double_eight_loop"):
        yield loop, ["plateau", "--loop", str(SCENES / f"{loop}.json"),
                     "--csv", str(results / f"{loop}.csv"), "--svg", str(results / f"{loop}.svg")]
    yield "recovery", ["recovery-check", "--scene", str(SCENES / "straight_jump.json"),
                       "--csv", str(results / "recovery_straight_jump.csv"),
                       "--svg", str(results / "recovery_straight_jump.svg")]


def reproduce(recovery: bool = False) -> int:
    """Run every artifact; the first non-zero exit code is returned"""
    results = ROOT / get_settings().RESULTS_DIR
    failures = []
    for label, argv in runs(results, recovery):
        code = main(argv)
        if code != 0:
            failures.append((label, code))

    if failures:
        for label, code in failures:
            print(f"FAILED {label}: exit code {code}", file=sys.stderr)
        return failures[0][1]
    print(f"All artifacts written to {results}")
    return 0


if __name__ == "__main__":
    sys.exit(reproduce(recovery="--recovery" in sys.argv[1:]))
