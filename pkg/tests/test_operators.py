import math

import numpy as np
import pytest

from huxdelta.equilibrium import make_profile, phi_at, phi_prime_at
from huxdelta.model import f1
from huxdelta.operators import (
    AZ,
    MINUS_LZ,
    Grid,
    apply,
    assemble_AZ,
    assemble_minusLZ,
    discrete_equilibrium,
    stationary_operator_residual,
)
from huxdelta.spectral import eigenvalue_k


def test_grid_layout():
    g = Grid(20.0, 4000)
    assert g.h == 0.01 and g.x.size == 3999
    assert g.x[g.center] == 0.0
    assert np.array_equal(g.x, -g.x[::-1])
    assert g.x[0] == pytest.approx(-20.0 + g.h)
    w = g.widen(1.5)
    assert w.h == pytest.approx(g.h) and w.N % 2 == 0 and w.L == pytest.approx(30.0)
    for bad in [(20.0, 4001), (20.0, 2), (0.0, 100)]:
        with pytest.raises(ValueError):
            Grid(*bad)


def test_AZ_entries():
    g = Grid(5.0, 100)
    op = assemble_AZ(g, 2.0)
    assert op.kind == AZ and op.diag.size == 99 and op.off.size == 98
    expect = np.full(99, 2 / g.h**2)
    expect[g.center] -= 2.0 / g.h
    assert np.array_equal(op.diag, expect)
    assert np.all(op.off == -1 / g.h**2)
    d = op.dense()
    assert np.array_equal(d, d.T)


def test_dirichlet_lowest_eigenvalue():
    g = Grid(20.0, 4000)
    lam = eigenvalue_k(assemble_AZ(g, 0.0), 1)
    exact = (2 / g.h**2) * (1 - math.cos(math.pi * g.h / (2 * g.L)))
    assert lam == pytest.approx(exact, abs=1e-10 * 4 / g.h**2)
    assert lam == pytest.approx((math.pi / (2 * g.L)) ** 2, rel=1e-4)


def test_apply_columns_and_sine():
    g = Grid(4.0, 80)
    op = assemble_AZ(g, 1.5)
    D = op.dense()
    for j in (0, 17, g.center, 78):
        e = np.zeros(op.size)
        e[j] = 1.0
        col = apply(op, e)
        assert np.array_equal(col, D[:, j]) and np.count_nonzero(col) <= 3
    G = Grid(20.0, 4000)
    s = np.sin(np.pi * (G.x + G.L) / (2 * G.L))
    lhs = apply(assemble_AZ(G, 0.0), s)
    assert np.max(np.abs(lhs - (math.pi / (2 * G.L)) ** 2 * s)) < 1e-8
    with pytest.raises(ValueError):
        apply(op, np.ones(5))
    M = np.random.default_rng(0).standard_normal((op.size, 3))
    assert np.allclose(apply(op, M), D @ M, rtol=1e-14, atol=1e-10)


def test_rayleigh_quotient_bound_state(grid):
    Z = 2.0
    psi = math.sqrt(Z / 2) * np.exp(-Z * np.abs(grid.x) / 2)
    rq = float(psi @ apply(assemble_AZ(grid, Z), psi)) / float(psi @ psi)
    assert rq == pytest.approx(-Z**2 / 4, abs=1e-3)


def test_self_adjoint(grid, fig1):
    rng = np.random.default_rng(7)
    u, v = rng.standard_normal((2, grid.N - 1))
    for op in (assemble_AZ(grid, 2.0), assemble_minusLZ(fig1.with_Z(-1.0), None, grid)):
        a, b = float(apply(op, u) @ v), float(u @ apply(op, v))
        assert abs(a - b) <= 1e-12 * max(abs(a), abs(b))


def test_minusLZ_potential_structure(grid, fig1):
    P = fig1.with_Z(2.0)
    op = assemble_minusLZ(P, make_profile(P), grid)
    assert op.kind == MINUS_LZ
    V = 2 / grid.h**2 - P.Z / grid.h * (np.arange(op.size) == grid.center) - P.w - op.diag
    assert np.allclose(V, V[::-1], rtol=0, atol=1e-9)
    assert np.allclose(V, f1(phi_at(grid.x, make_profile(P)), P), atol=1e-9)
    assert op.diag[0] == pytest.approx(2 / grid.h**2 - P.w, abs=1e-9)


def test_zero_mode_annihilated_to_second_order(fig1):
    res = []
    for N in (2000, 4000, 8000):
        g = Grid(20.0, N)
        prof = make_profile(fig1)
        d = phi_prime_at(g.x, prof)
        r = apply(assemble_minusLZ(fig1, prof, g), d)
        res.append(np.max(np.abs(r)) / np.max(np.abs(d)))
    assert res[-1] < 0.05
    assert 3.5 < res[0] / res[1] < 4.5 and 3.5 < res[1] / res[2] < 4.5


def test_quadratic_form_consistency(fig1):
    P = fig1.with_Z(1.0)
    errs = []
    for N in (1000, 2000, 4000):
        g = Grid(10.0, N)
        u = np.exp(-g.x**2) * (1 + 0.3 * g.x)
        prof = make_profile(P)
        V = f1(phi_at(g.x, prof), P)
        discrete = g.h * float(apply(assemble_minusLZ(P, prof, g), u) @ u)
        # continuum form with exact derivative of the test function
        du = np.exp(-g.x**2) * (0.3 - 2 * g.x * (1 + 0.3 * g.x))
        cont = g.h * float(du @ du) - P.w * g.h * float(u @ u) - g.h * float(V @ (u * u)) - P.Z * u[g.center] ** 2
        errs.append(abs(discrete - cont))
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


def test_discrete_equilibrium(grid, fig1, posb):
    for P in (fig1.with_Z(2.0), fig1, posb.with_Z(-2.0)):
        u = discrete_equilibrium(P, grid)
        r = stationary_operator_residual(u, P, grid)
        # round-off level relative to |A_Z| |u|
        assert np.max(np.abs(r)) <= 1e-12 * (4 / grid.h**2) * np.max(u)
        assert np.array_equal(u, u[::-1])
        closed = phi_at(grid.x, make_profile(P))
        assert np.max(np.abs(u - closed)) < 1e-3 * np.max(closed)
