"""Integrate continuous functions against the spectral system of an element.

Run with ``python demos/functional_calculus.py``.
"""

from __future__ import annotations

from stonecalc.lattice import LatticeElement, StoneSpace
from stonecalc.spectral import (
    IntervalSet,
    StepFunction,
    compose_continuous,
    daniell_continuous,
    daniell_step,
    mu_A,
    polynomial,
    spectral_system,
)


def main() -> None:
    x = LatticeElement(StoneSpace(4), [-1.5, 0.25, 0.25, 2.0])
    A = spectral_system(x)
    print("X              =", x.values.tolist())
    print("A_0 = 1{X <= 0} =", A(0.0).values.tolist())
    print("mu_A((0, 1])    =", mu_A(x, IntervalSet.interval(0.0, 1.0)).values.tolist())

    f = StepFunction([-1.0, 1.0], [3.0, -2.0], 5.0)
    print("\nstep f: 3 on (-inf,-1], -2 on (-1,1], 5 beyond")
    print("I(f)            =", daniell_step(f, x).values.tolist())

    p = polynomial([1.0, 0.0, -2.0, 0.5])
    via_steps = daniell_continuous(p, x)
    direct = compose_continuous(p, x)
    gap = max(abs(a - b) for a, b in zip(via_steps, direct))
    print("\np(t) = 1 - 2t^2 + t^3/2")
    print("I(p) from steps =", [round(v, 6) for v in via_steps])
    print("p o X           =", direct.values.tolist())
    print(f"largest gap     = {gap:.2e}")


if __name__ == "__main__":
    main()
