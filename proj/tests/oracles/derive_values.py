"""Reference numbers for the C++ tests, computed without the library.

Run once; the printed header is frozen as tests/unit/frozen_values.hpp.
"""

import math

import numpy as np
from scipy import integrate, linalg, optimize, special


def shooting(p, length=1.0):
    """First Dirichlet eigenvalue of the 1D p-Laplacian on (0, length)."""
    q = 1.0 / (p - 1.0)

    def rhs(_, y, lam):
        u, w = y
        return [math.copysign(abs(w) ** q, w), -lam * math.copysign(abs(u) ** (p - 1), u)]

    def flux(lam):
        sol = integrate.solve_ivp(rhs, (0.0, 0.5 * length), [0.0, 1.0], args=(lam,),
                                  method="DOP853", rtol=1e-12, atol=1e-14)
        return sol.y[1, -1]

    hi = 1.0
    while flux(hi) > 0:
        hi *= 2.0
    return optimize.brentq(flux, 0.5 * hi if hi > 1 else 0.0, hi, xtol=1e-14, rtol=1e-14)


def pi_p_value(p, length=1.0):
    pi_p = 2.0 * math.pi / (p * math.sin(math.pi / p))
    return (p - 1.0) * (pi_p / length) ** p


def second_difference(length, cells):
    h = length / cells
    n = cells - 1
    d = np.full(n, 2.0 / h**2)
    e = np.full(n - 1, -1.0 / h**2)
    return linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))[0]


def p1_interval(length, cells):
    """P1 elements with one-point mass quadrature on the element midpoint."""
    h = length / cells
    n = cells - 1
    k = (np.diag(np.full(n, 2.0 / h)) - np.diag(np.full(n - 1, 1.0 / h), 1)
         - np.diag(np.full(n - 1, 1.0 / h), -1))
    m = np.zeros((n + 2, n + 2))
    for c in range(cells):
        m[c:c + 2, c:c + 2] += h / 4.0
    m = m[1:-1, 1:-1]
    return linalg.eigh(k, m, eigvals_only=True, subset_by_index=[0, 0])[0]


def main():
    j01 = special.jn_zeros(0, 1)[0]
    values = {
        "kPiSquared": math.pi**2,
        "kBesselDisk": j01**2,
        "kShootingP15": shooting(1.5),
        "kShootingP3": shooting(3.0),
        "kShootingP4": shooting(4.0),
        "kPiPP15": pi_p_value(1.5),
        "kPiPP3": pi_p_value(3.0),
        "kSecondDifference100": second_difference(1.0, 100),
        "kP1Interval20": p1_interval(1.0, 20),
        "kStraightTubeGapL10": (math.pi / 20.0) ** 2,
    }
    print("#pragma once\n")
    print("// Generated by tests/oracles/derive_values.py (scipy), then frozen.\n")
    print("namespace frozen {\n")
    for name, v in values.items():
        print(f"inline constexpr double {name} = {float(v)!r};")
    print("\n}  // namespace frozen")


if __name__ == "__main__":
    main()
