"""Global sections on random qubit fragments: every one should admit a section."""
import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import gen  # noqa: E402
from qtopos.contexts import build_poset  # noqa: E402
from qtopos.kscheck import find_global_section  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--contexts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    found = 0
    worst = 0.0
    for _ in range(args.count):
        poset = build_poset(gen.random_seeds(rng, 2, args.contexts))
        t0 = time.perf_counter()
        found += find_global_section(poset).found
        worst = max(worst, time.perf_counter() - t0)
    print(f"{found}/{args.count} fragments with {args.contexts} seeds have a section; worst {worst * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
