import warnings

import numpy as np
import pytest
import scipy.io
import scipy.sparse.linalg as spla
from hypothesis import given, strategies as st

from machfvm.assembly import (
    AssemblyError,
    MeshQualityWarning,
    apply_stencil,
    assemble_five_point,
    assemble_flux_balance,
    assemble_nine_point,
    cell_kappas,
    five_point_cell_kappas,
    green_gauss_gradient,
    parity_blocks,
    write_matrix_market,
)
from machfvm.materials import MaterialError, simplified_partition
from machfvm.mesh import MeshError, build_grid, build_simplified_grid

UNIT = [(0, 0), (1, 0), (1, 1), (0, 1)]


@pytest.mark.parametrize("values,grad", [
    ((0, 1, 1, 0), (1, 0)),
    ((0, 0, 1, 1), (0, 1)),
    ((3.5, 3.5, 3.5, 3.5), (0, 0)),
])
def test_green_gauss_unit_square(values, grad):
    np.testing.assert_allclose(green_gauss_gradient(UNIT, values), grad, atol=1e-15)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.lists(st.floats(-0.2, 0.2), min_size=8, max_size=8))
def test_green_gauss_exact_for_linear_fields(a, b, c, d):
    P = np.array(UNIT, float) + np.reshape(d, (4, 2))
    vals = a * P[:, 0] + b * P[:, 1] + c
    np.testing.assert_allclose(green_gauss_gradient(P, vals), (a, b), atol=1e-12)


def test_green_gauss_degenerate():
    with pytest.raises(AssemblyError):
        green_gauss_gradient([(0, 0), (1, 0), (2, 0), (3, 0)], (0, 1, 2, 3))


def test_nine_point_rectangular_coefficients():
    g = build_grid((0, 2, 0, 1), 4, 4)  # hx = 2 hy
    op = assemble_nine_point(g, kappa_cells=np.ones((4, 4)))
    a = op.coeffs[:, 2, 2]
    assert a[0] == pytest.approx(-0.625, abs=1e-15)
    assert a[1] == pytest.approx(-0.75, abs=1e-15)
    assert a[4] == pytest.approx(2.5 + g.hx * g.hy, abs=1e-15)


@given(st.integers(3, 12), st.integers(3, 12), st.integers(0, 2**32 - 1))
def test_nine_point_square_mesh_has_no_plus_arms(nx, ny, seed):
    kc = np.random.default_rng(seed).uniform(0.1, 100, (nx, nx))
    op = assemble_nine_point(build_grid((0, 1, 0, 1), nx, nx), kappa_cells=kc)
    assert np.all(op.coeffs[[1, 3, 5, 7]] == 0.0)


def test_nine_point_needs_strategy_for_mixed_cells():
    g = build_simplified_grid(7)
    with pytest.raises(MaterialError, match="strategy"):
        assemble_nine_point(g, simplified_partition(5.0))
    with pytest.raises(AssemblyError):
        assemble_nine_point(g)
    with pytest.raises(AssemblyError):
        assemble_nine_point(g, kappa_cells=-np.ones((7, 7)))


@given(st.integers(1, 15), st.floats(1, 1e6), st.sampled_from(["arithmetic", "harmonic"]))
def test_nine_point_degenerates_to_five_point(M, km, strategy):
    N = 2 * M + 1
    g = build_simplified_grid(N)
    nine = assemble_nine_point(g, simplified_partition(km), strategy, lambda x, y: x + y)
    ks = nine.coeffs  # keep a reference for clarity
    kstar = {"arithmetic": (km + 1) / 2, "harmonic": 2 * km / (km + 1)}[strategy]
    kc = cell_kappas(g, simplified_partition(km), strategy)
    np.testing.assert_allclose(kc, five_point_cell_kappas(N, km, kstar), rtol=1e-12)
    five = assemble_five_point(g, km, kc[M, 0], lambda x, y: x + y)
    # cell averaging of the split column is exact to the last bit here
    nine_exact = assemble_nine_point(g, kappa_cells=five_point_cell_kappas(N, km, kc[M, 0]),
                                     source=lambda x, y: x + y)
    assert np.array_equal(nine_exact.coeffs, five.coeffs)
    assert np.array_equal(nine_exact.rhs, five.rhs)
    np.testing.assert_allclose(ks, five.coeffs, rtol=1e-12, atol=0)


def test_five_point_table_rows():
    g = build_simplified_grid(9)
    op = assemble_five_point(g, 2.0, 1.0)
    h2 = g.h**2
    a = op.coeffs[:, 1, 3]
    assert a[0] == a[2] == a[6] == a[8] == -1.0
    assert a[4] == 4.0 + h2
    op = assemble_five_point(g, 4.0, 1.6)
    M = g.M
    a = op.coeffs[:, M, 3]
    assert (a[0], a[6], a[2], a[8]) == (-2.0, -2.0, -0.8, -0.8)
    assert a[4] == 4.0 + 1.6 + h2
    a = op.coeffs[:, M + 1, 3]
    assert (a[0], a[2], a[4]) == (-0.8, -0.5, 1.6 + 1.0 + h2)
    a = op.coeffs[:, M + 2, 3]
    assert (a[0], a[2], a[4]) == (-0.5, -0.5, 2.0 + h2)


def test_five_point_h_point_one():
    # h = 0.1 needs an even N, so check the row formula directly on N = 11 values
    g = build_simplified_grid(11)
    op = assemble_five_point(g, 2.0, 4.0 / 3.0)
    assert op.coeffs[4, 2, 2] == pytest.approx(2 * 2 + g.h**2)
    h = 0.1
    assert 2 * 2.0 + h * h == pytest.approx(4.01)
    assert 4 + 1.6 + h * h == pytest.approx(5.61)


def test_five_point_single_material_rows_identical():
    g = build_simplified_grid(7)
    op = assemble_five_point(g, 1.0, 1.0)
    inner = op.coeffs[:, 1:-1, 1:-1]
    assert np.all(inner[[0, 2, 6, 8]] == -0.5)
    assert np.all(inner[4] == 2 + g.h**2)


def test_five_point_errors():
    with pytest.raises(MeshError):
        assemble_five_point(build_grid((0, 1, 0, 1), 7, 7), 2.0, 1.0)
    with pytest.raises(AssemblyError):
        assemble_five_point(build_simplified_grid(7), 0.5, 1.0)
    with pytest.raises(AssemblyError):
        assemble_five_point(build_simplified_grid(7), 2.0, 0.0)


def random_five_point(seed, M):
    rng = np.random.default_rng(seed)
    N = 2 * M + 1
    km = float(10 ** rng.uniform(0, 6))
    ks = float(rng.uniform(0.1, km))
    f = rng.normal(size=(N + 1, N + 1))
    op = assemble_five_point(build_simplified_grid(N), km, ks)
    rhs = f.copy()
    rhs[0, :] = rhs[-1, :] = rhs[:, 0] = rhs[:, -1] = 0
    return op, rhs


@given(st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_symmetry_random_fields(M, seed):
    N = 2 * M + 1
    rng = np.random.default_rng(seed)
    kc = 10 ** rng.uniform(-2, 6, (N, N))
    for op in (assemble_nine_point(build_grid((0, 1, 0, 2), N, N), kappa_cells=kc),
               random_five_point(seed, M)[0]):
        A = op.to_sparse()
        assert (A != A.T).nnz == 0


@given(st.integers(2, 12), st.integers(2, 12), st.floats(0.3, 3), st.integers(0, 2**32 - 1))
def test_row_sums(nx, ny, w, seed):
    kc = np.random.default_rng(seed).uniform(0.5, 2.0, (nx, ny))
    g = build_grid((0, w, 0, 1), nx, ny)
    op = assemble_nine_point(g, kappa_cells=kc)
    rs = op.coeffs[:, 1:-1, 1:-1].sum(axis=0)
    np.testing.assert_allclose(rs, g.hx * g.hy, rtol=0, atol=1e-14)


def test_apply_stencil_examples():
    g = build_simplified_grid(9)
    op = assemble_five_point(g, 3.0, 1.5)
    assert np.all(apply_stencil(op, np.zeros(op.shape)) == 0)
    ones = np.zeros(op.shape)
    ones[1:-1, 1:-1] = 1.0
    out = apply_stencil(op, ones)
    np.testing.assert_allclose(out[2:-2, 2:-2], g.h**2, rtol=0, atol=1e-14)
    with pytest.raises(AssemblyError):
        apply_stencil(op, np.zeros((3, 3)))


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_matrix_matches_stencil_on_zero_boundary_fields(M, seed):
    op, rhs = random_five_point(seed, M)
    want = apply_stencil(op, rhs)
    got = (op.to_sparse() @ rhs.ravel()).reshape(op.shape)
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-13 * np.abs(want).max())


def test_square_mesh_dominance_slack():
    g = build_grid((0, 1, 0, 1), 6, 6)
    kc = np.random.default_rng(1).uniform(0.1, 10, (6, 6))
    a = assemble_nine_point(g, kappa_cells=kc).coeffs[:, 1:-1, 1:-1]
    slack = a[4] - np.abs(np.delete(a, 4, axis=0)).sum(axis=0)
    np.testing.assert_allclose(slack, g.hx * g.hy, rtol=1e-12)


@pytest.mark.parametrize("domain,n", [((0, 1, 0, 1), 7), ((0, 2, 0, 1), 6), ((0, 1, 0, 3), 5)])
def test_smallest_eigenvalue_bound(domain, n):
    # inverse-power iteration on the interior block
    g = build_grid(domain, n, n)
    kc = np.random.default_rng(n).uniform(0.5, 50, (n, n))
    op = assemble_nine_point(g, kappa_cells=kc)
    A = op.to_sparse()
    inner = np.zeros(op.shape, bool)
    inner[1:-1, 1:-1] = True
    B = A[inner.ravel()][:, inner.ravel()].tocsc()
    lu = spla.splu(B)
    x = np.random.default_rng(0).normal(size=B.shape[0])
    for _ in range(200):
        x = lu.solve(x)
        x /= np.linalg.norm(x)
    lam = x @ (B @ x)
    assert lam >= g.hx * g.hy * (1 - 1e-10)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_checkerboard_blocks_reproduce_full_solve(M, seed):
    op, rhs = random_five_point(seed, M)
    full = spla.spsolve(op.to_sparse().tocsc(), rhs.ravel())
    x = np.zeros_like(full)
    for idx, B in parity_blocks(op):
        x[idx] = spla.spsolve(B.tocsc(), rhs.ravel()[idx])
    assert np.max(np.abs(x - full)) <= 1e-12 * np.max(np.abs(full))


def test_parity_blocks_reject_nine_point():
    g = build_grid((0, 2, 0, 1), 5, 5)
    with pytest.raises(AssemblyError):
        parity_blocks(assemble_nine_point(g, kappa_cells=np.ones((5, 5))))


@pytest.mark.parametrize("domain,nx,ny", [((0, 1, 0, 1), 6, 6), ((0, 2, 0, 1), 5, 7), ((-1, 1, 0, 3), 4, 6)])
def test_flux_balance_equals_closed_form(domain, nx, ny):
    rng = np.random.default_rng(nx * ny)
    g = build_grid(domain, nx, ny)
    kc = rng.uniform(0.1, 10, (nx, ny))
    f = lambda x, y: np.sin(x) + y**2  # noqa: E731
    closed = assemble_nine_point(g, kappa_cells=kc, source=f)
    geom = assemble_flux_balance(g.nodes(), kc, f)
    np.testing.assert_allclose(geom.coeffs, closed.coeffs, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(geom.rhs, closed.rhs, rtol=1e-12, atol=1e-15)
    # composite and single Gauss rules agree exactly on bicubic sources
    q = lambda x, y: (1 + x**3) * (2 - y + y**3)  # noqa: E731
    geom_avg = assemble_flux_balance(g.nodes(), kc, q, rhs_mode="average")
    closed_avg = assemble_nine_point(g, kappa_cells=kc, source=q, rhs_mode="average")
    np.testing.assert_allclose(geom_avg.rhs, closed_avg.rhs, rtol=1e-12, atol=1e-15)


def test_flux_balance_distorted_mesh():
    g = build_grid((0, 1, 0, 1), 8, 8)
    P = g.nodes().copy()
    rng = np.random.default_rng(3)
    P[1:-1, 1:-1] += rng.uniform(-0.02, 0.02, P[1:-1, 1:-1].shape)
    op = assemble_flux_balance(P, np.ones((8, 8)))
    A = op.to_sparse().toarray()
    # constants are annihilated by the diffusion part
    rs = op.coeffs[:, 1:-1, 1:-1].sum(axis=0) - op.coeffs[4, 1:-1, 1:-1] + op.coeffs[4, 1:-1, 1:-1]
    assert np.all(np.isfinite(A))
    areas = op.coeffs[:, 1:-1, 1:-1].sum(axis=0)
    assert np.all(areas > 0) and rs.shape == areas.shape


def test_flux_balance_warns_on_bad_cells():
    g = build_grid((0, 1, 0, 1), 4, 4)
    P = g.nodes().copy()
    P[2, 2] += (0.2, 0.2)  # drag the node far into one corner cell
    with pytest.warns(MeshQualityWarning):
        assemble_flux_balance(P, np.ones((4, 4)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assemble_flux_balance(g.nodes(), np.ones((4, 4)))


def test_rhs_modes():
    g = build_simplified_grid(9)
    f = lambda x, y: x * y  # noqa: E731
    a = assemble_five_point(g, 1.0, 1.0, f).rhs
    b = assemble_five_point(g, 1.0, 1.0, f, rhs_mode="average").rhs
    # 2x2 Gauss integrates bilinear f exactly, so both agree here
    np.testing.assert_allclose(a, b, atol=1e-16)
    assert a[0].max() == 0 and a[:, -1].max() == 0
    with pytest.raises(AssemblyError):
        assemble_five_point(g, 1.0, 1.0, f, rhs_mode="simpson")


def test_matrix_market_roundtrip(tmp_path):
    op, _ = random_five_point(7, 3)
    path = tmp_path / "op.mtx"
    write_matrix_market(op, str(path), comment="five-point test")
    back = scipy.io.mmread(str(path)).tocsr()
    A = op.to_sparse()
    assert back.shape == A.shape
    np.testing.assert_allclose(back.toarray(), A.toarray(), rtol=1e-15)
    body = [ln for ln in path.read_text().splitlines() if not ln.startswith("%")]
    rows = np.array([ln.split() for ln in body[1:]], float)
    assert rows[:, :2].min() == 1  # 1-based triplets
