import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from huxdelta.equilibrium import make_profile, phi_prime_at
from huxdelta.operators import Grid, TridiagonalOperator, assemble_AZ, assemble_minusLZ
from huxdelta.spectral import (
    ZERO_MODE_BAND,
    NoIsolation,
    PivotBreakdown,
    cosine,
    eigenvalue_k,
    eigenvalues_below,
    eigenvector,
    gershgorin,
    inertia_below,
    linearised_operator,
    morse_index,
    sign_changes,
)


def _op(diag, off, grid=None):
    # counts never look at the grid; it only matters for eigenvector normalisation
    grid = grid or Grid(1.0, 2 * (len(diag) // 2 + 1))
    return TridiagonalOperator(np.asarray(diag, float), np.asarray(off, float), grid, "test")


def test_inertia_examples(grid):
    assert inertia_below(assemble_AZ(grid, 0.0), 0.0) == 0
    assert inertia_below(assemble_AZ(grid, 2.0), -1e-3) == 1
    assert inertia_below(assemble_AZ(grid, -2.0), -1e-6) == 0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), frac=st.floats(0.05, 0.95))
def test_inertia_matches_characteristic_polynomial(seed, frac):
    rng = np.random.default_rng(seed)
    d, e = rng.uniform(-3, 3, 12), rng.uniform(-2, 2, 11)
    op = _op(d, e)
    lo, hi = gershgorin(op)
    shift = lo + frac * (hi - lo)
    mesh = np.linspace(lo - 1.0, shift, 20001)
    ev = np.linalg.eigvalsh(op.dense())  # only to keep the mesh oracle well posed
    assume(np.min(np.diff(ev)) > 4 * (mesh[1] - mesh[0]) and np.min(np.abs(ev - shift)) > 1e-6)
    T = op.dense()
    dets = np.array([np.linalg.det(T - m * np.eye(12)) for m in mesh])
    changes = int(np.count_nonzero(np.sign(dets[1:]) != np.sign(dets[:-1])))
    assert inertia_below(op, shift) == changes


def test_pivot_breakdown_retry_and_error():
    op = _op([1.0, 1.0, 1.0], [1.0, 1.0])
    # the first pivot vanishes at shift 1
    assert inertia_below(op, 1.0) == int(np.sum(np.linalg.eigvalsh(op.dense()) < 1.0 + 1e-10))
    with pytest.raises(PivotBreakdown):
        inertia_below(op, 1.0, retries=0)


def test_dirichlet_spectrum_by_bisection():
    g = Grid(20.0, 400)
    op = assemble_AZ(g, 0.0)
    for k in (1, 2, 5, 50, 399):
        exact = (2 / g.h**2) * (1 - math.cos(k * math.pi * g.h / (2 * g.L)))
        assert eigenvalue_k(op, k) == pytest.approx(exact, abs=1e-10 * op.scale)
    with pytest.raises(ValueError):
        eigenvalue_k(op, 0)


def test_bound_state_eigenvector(grid):
    op = assemble_AZ(grid, 2.0)
    lam = eigenvalue_k(op, 1)
    v = eigenvector(op, lam)
    psi = np.exp(-np.abs(grid.x))
    assert cosine(v, psi) >= 0.9999
    assert grid.h * float(v @ v) == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(op @ v - lam * v) <= 1e-8 * np.linalg.norm(v) * op.scale


def test_zero_mode_eigenvector(grid, fig1):
    op, _ = linearised_operator(fig1, grid)
    lam2 = eigenvalue_k(op, 2)
    assert abs(lam2) <= 5e-4
    assert eigenvalue_k(op, 1) < 0
    v = eigenvector(op, lam2)
    d = phi_prime_at(grid.x, make_profile(fig1))
    assert abs(cosine(v, d)) >= 0.999
    # odd mode: sign fixed by the slope at the origin
    assert v[grid.center + 1] - v[grid.center] > 0


def test_noisolation_for_degenerate_pair():
    blk = [2.0, 1.0, 3.0]
    op = _op(blk + blk, [-1.0, -1.0, 0.0, -1.0, -1.0])
    lam = eigenvalue_k(op, 1)
    with pytest.raises(NoIsolation):
        eigenvector(op, lam)


@pytest.mark.parametrize("name", ["fig1", "posb"])
@pytest.mark.parametrize("Z", [-2.0, -1.0, 1.0, 2.0])
def test_morse_index_counts(request, grid, name, Z):
    P = request.getfixturevalue(name).with_Z(Z)
    rep = morse_index(P, grid)
    assert rep.neg_count == (2 if Z < 0 else 1)
    assert rep.neg_count == int(np.sum(rep.eigenvalues < 0))
    assert np.all(rep.eigenvalues < rep.edge)
    assert np.all(np.diff(rep.eigenvalues) > 1e3 * 8 * np.finfo(float).eps * rep.nodes.max())
    assert rep.kernel_gap == pytest.approx(np.min(np.abs(rep.eigenvalues)))
    for v in rep.eigenvectors:
        assert grid.h * float(v @ v) == pytest.approx(1.0, rel=1e-10)
    assert sign_changes(rep.eigenvectors[0]) == 0
    if len(rep.eigenvectors) > 1:
        assert sign_changes(rep.eigenvectors[1]) == 1
    assert set(rep.to_json()) == {"Z", "neg_count", "eigenvalues", "kernel_gap"}


def test_morse_index_zero_defect(grid, fig1, posb):
    for P in (fig1, posb):
        rep = morse_index(P, grid)
        assert rep.neg_count == 1
        assert rep.zero_mode == 1 and abs(rep.eigenvalues[1]) <= ZERO_MODE_BAND


def test_count_consistency(grid, fig1):
    op, _ = linearised_operator(fig1.with_Z(-1.0), grid)
    eps = 1e-8 * op.scale
    for k in (1, 2):
        lam = eigenvalue_k(op, k)
        assert inertia_below(op, lam + eps) - inertia_below(op, lam - eps) == 1
    lams = eigenvalues_below(op, -fig1.w)
    assert np.all(np.diff(lams) > 0)


def test_closed_form_potential_band(grid, fig1):
    rep = morse_index(fig1, grid, potential="closed_form", vectors=False)
    # the O(h^2) zero-mode remnant may fall on either side of 0, inside the band
    assert int(np.sum(rep.eigenvalues < -rep.zero_band)) == 1
    assert abs(rep.eigenvalues[1]) <= rep.zero_band
    assert rep.zero_band >= 10 * (2.0 * 4) ** 2 * grid.h**2 - 1e-15
    assert rep.zero_mode is not None
    with pytest.raises(ValueError):
        linearised_operator(fig1, grid, "bogus")


def test_near_zero_eigenvalue_shrinks_with_h(fig1):
    vals = [abs(eigenvalue_k(assemble_minusLZ(fig1, make_profile(fig1), Grid(20.0, N)), 2)) for N in (1000, 2000, 4000)]
    assert vals[0] / vals[1] > 3.5 and vals[1] / vals[2] > 3.5
