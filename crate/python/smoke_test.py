"""Smoke test for the zerovar_py extension.

Build and install first, e.g. `pip install ./crates/py`, then run
`python python/smoke_test.py`.
"""

import math

import zerovar_py as zv


def main():
    leg = zv.Ensemble.legendre(64)
    print(leg)

    p = 2 / math.pi * math.atan(math.sqrt(3) / 2)
    e = zv.expected_zeros(leg, 1, -0.5, 0.5)
    assert abs(e - p) < 1e-9, e

    v = zv.variance(leg, 1, -0.5, 0.5)
    assert abs(v["variance"] - p * (1 - p)) < 1e-4, v

    sim = zv.simulate(leg, 20, -0.5, 0.5, 2000, seed=1)
    assert sum(sim["histogram"].values()) == 2000
    print(f"n=20 mean zeros {sim['mean']:.3f} +- {sim['mean_stderr']:.3f}, "
          f"Kac-Rice {zv.expected_zeros(leg, 20, -0.5, 0.5):.3f}")

    coeffs = zv.sample_coefficients(1, 0, 15)
    assert zv.count_zeros(leg, coeffs, -1.0, 1.0) == zv.count_zeros_exact(leg, coeffs, -1.0, 1.0)

    assert zv.xi(0.0) == -1 / 3
    c = zv.universal_constant(window=500.0)["c"]
    print(f"c = {c:.6f}")
    assert abs(c - 0.27913) < 1e-3

    try:
        zv.rho1(leg, 100, 0.0)
    except ValueError as err:
        print("capacity error:", err)
    else:
        raise AssertionError("expected ValueError")
    print("ok")


if __name__ == "__main__":
    main()
