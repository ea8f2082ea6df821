"""Smoke test for the compiled extension: run with `python python/smoke_test.py`."""

import math

import kgmp_py as k


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    grid = k.Grid(3, intervals=120)
    assert len(grid) == 121 and grid.dim == 3
    assert close(grid.integrate([1.0] * len(grid)), 2.0 * math.pi**2, 1e-12)

    p = k.Params(3, m0=1.0, m1=0.8, q=1.3, omega=0.4, p=4.0)
    c = 0.7
    v = k.solve_gauge(grid, p, [c] * len(grid))
    exact = p.q * c * c / (p.m1**2 + p.q**2 * c * c)
    assert all(close(x, exact, 1e-12) for x in v)
    assert all(0.0 <= x <= 1.0 / p.q for x in v)

    e = k.energy(grid, p, [c] * len(grid))
    assert close(e.total, e.dirichlet + e.mass - e.nonlinear - e.gauge_coupling, 1e-12)

    cs, cv = k.constant_solution(p)
    res = p.m0**2 * cs - cs ** (p.p - 1) - p.omega**2 * (1 - p.q * cv) ** 2 * cs
    assert abs(res) < 1e-10, res

    # Critical S^5 with m0 = 1: u = 1 at level vol (1/2 - 3/10) = pi^3 / 5.
    s5 = k.Grid(5, intervals=200)
    crit = k.Params(5, m0=1.0, m1=1.0, q=1.0)
    sol = k.mountain_pass(s5, crit)
    assert sol.accepted and sol.residual < 1e-8
    assert all(abs(x - 1.0) < 1e-6 for x in sol.u)
    assert close(sol.level, math.pi**3 / 5.0, 1e-3), sol.level

    ratio = k.phase_ratio(k.Params(5, 1.0, 1.0, 1.0), 1e-2, intervals=4000)
    assert 0.0 <= ratio <= 1.0

    try:
        k.mountain_pass(grid, k.Params(3, 1.0, 1.0, 1.0, omega=1.5, p=4.0))
    except k.HypothesisError:
        pass
    else:
        raise AssertionError("|omega| >= m0 must be refused")

    print(f"ok: level {sol.level:.10f}, phase ratio {ratio:.6f}")


if __name__ == "__main__":
    main()
