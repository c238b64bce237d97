"""Conditional expectations, a Doob martingale and the conditional Jensen inequality.

Run with ``python demos/martingales.py``.
"""

from __future__ import annotations

from stonecalc.lattice import LatticeElement, StoneSpace
from stonecalc.probability import (
    Filtration,
    classify_process,
    convex_image_submartingale,
    doob_martingale,
    jensen,
    l1_norm,
    max_function,
)


def main() -> None:
    space = StoneSpace(4)
    # information arrives in two rounds: first {0,1} vs {2,3}, then every atom
    filt = Filtration.from_partitions(space, [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]],
                                      weights=[1, 1, 1, 1])
    terminal = LatticeElement(space, [4.0, -2.0, 1.0, -3.0])
    m = doob_martingale(filt, terminal)
    for n, x in enumerate(m.path, start=1):
        print(f"X_{n} = {x.values.tolist()}")
    print("classification:", classify_process(m).value)

    rec = convex_image_submartingale([m], l1_norm(1))
    print("\n|X_t| is a", rec.kind.value)
    for n, x in enumerate(rec.image.path, start=1):
        print(f"|X_{n}| = {x.values.tolist()}")

    y = LatticeElement(space, [0.0, 3.0, -1.0, 2.0])
    r = jensen(max_function(2), [terminal, y], filt.stage(2))
    print("\nF_2(max(X, Y)) =", r.lhs.values.tolist())
    print("max(F_2 X, F_2 Y) =", r.rhs.values.tolist())
    print(f"smallest slack = {r.min_slack}, minorants used = {r.minorant_count}")


if __name__ == "__main__":
    main()
