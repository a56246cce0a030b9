"""Run both Kochen-Specker searches on the bundled 18-vector witness and time them."""
import argparse
import json
import time

from qtopos.contexts import Context, build_poset
from qtopos.kscheck import cabello18, find_global_section, verify_coloring_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--parallel", type=int, default=1)
    ap.add_argument("--drop", type=int, default=0, help="drop this many bases from the end first")
    args = ap.parse_args()

    w = cabello18()
    bases = w.basis_projections()[: len(w.bases) - args.drop]
    t0 = time.perf_counter()
    coloring = verify_coloring_witness(bases)
    t1 = time.perf_counter()
    poset = build_poset([Context(b, name=f"B{i + 1}") for i, b in enumerate(bases)])
    t2 = time.perf_counter()
    section = find_global_section(poset, parallel=args.parallel)
    t3 = time.perf_counter()
    print(
        json.dumps(
            {
                "bases": len(bases),
                "coloring_exists": not coloring.no_coloring,
                "coloring_nodes": coloring.nodes_explored,
                "coloring_seconds": round(t1 - t0, 3),
                "poset_contexts": len(poset),
                "poset_seconds": round(t2 - t1, 3),
                "section": section.to_json(),
                "section_seconds": round(t3 - t2, 3),
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
