"""Stopping times as band projections, stopped processes and the debut.

Run with ``python demos/stopping_times.py``.
"""

from __future__ import annotations

import math

from stonecalc.lattice import LatticeElement, StoneSpace
from stonecalc.probability import AdaptedProcess, Filtration
from stonecalc.stopping import (
    StoppingTime,
    debut_roundtrip,
    from_projections,
    stopped_element,
    stopped_process,
    time_change,
    to_projections,
)


def main() -> None:
    space = StoneSpace(3)
    filt = Filtration.from_partitions(space, [[[0, 1, 2]], [[0], [1, 2]], [[0], [1], [2]]])
    tau = StoppingTime(filt, [2, 3, math.inf])
    print("tau                =", tau.values.tolist())
    bands = to_projections(tau)
    print("supports of P_n    =", [sorted(P.band_support.members) for P in bands])
    print("back from P_n      =", from_projections(bands, filt).values.tolist())
    print("time change n_k=2k =", time_change(tau, [2, 4, 6]).values.tolist())

    X = AdaptedProcess(filt, [LatticeElement(space, v) for v in ([1, 1, 1], [2, 5, 5], [3, 7, 9])])
    sigma = StoppingTime(filt, [2, 3, 3])
    print("\nX_sigma for sigma = (2, 3, 3):", stopped_element(X, sigma).values.tolist())
    print("stopped at tau:")
    for n, x in enumerate(stopped_process(X, tau).path, start=1):
        print(f"  X_(tau ^ {n}) = {x.values.tolist()}")

    indicators, recovered = debut_roundtrip(tau)
    print("\n1{tau <= n}:", [x.values.tolist() for x in indicators.path])
    print("first hit  :", recovered.values.tolist())


if __name__ == "__main__":
    main()
