"""Contravariant and covariant truth values on the qubit fragment for a grid of states."""
import argparse
from fractions import Fraction

from qtopos import linops
from qtopos.contexts import build_poset, context_from_commuting
from qtopos.logic import CO, CONTRA
from qtopos.states import State, truth

PROPS = {
    "|0>": [[1, 0], [0, 0]],
    "|1>": [[0, 0], [0, 1]],
    "|+>": [["1/2", "1/2"], ["1/2", "1/2"]],
    "I": [[1, 0], [0, 1]],
}


def bloch_state(x, z):
    """Real-plane qubit state with Bloch coordinates (x, 0, z)."""
    half = Fraction(1, 2)
    return State(linops.exact_matrix([[half * (1 + z), half * x], [half * x, half * (1 - z)]]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=2, help="grid points per axis on [-1, 1]")
    args = ap.parse_args()
    sz = linops.exact_matrix([[1, 0], [0, -1]])
    sx = linops.exact_matrix([[0, 1], [1, 0]])
    poset = build_poset([context_from_commuting([sz], "A_z"), context_from_commuting([sx], "A_x")])
    grid = [Fraction(-1) + Fraction(2 * i, args.steps) for i in range(args.steps + 1)]
    print(f"{'state (x,z)':>14} {'prop':>5} {'contra':>24} {'co':>24}")
    for x in grid:
        for z in grid:
            if x * x + z * z > 1:
                continue
            state = bloch_state(x, z)
            for name, m in PROPS.items():
                p = linops.exact_matrix(m)
                cells = [",".join(truth(state, p, poset, v)[1].names()) or "-" for v in (CONTRA, CO)]
                print(f"{f'({x},{z})':>14} {name:>5} {cells[0]:>24} {cells[1]:>24}")


if __name__ == "__main__":
    main()
