import numpy as np
import pytest

from electroconvect import (
    assemble_laplacian,
    build_annulus_mesh,
    build_rectangle_mesh,
    dirichlet_basis,
    lowest_eigenpairs,
)
from electroconvect.eigensolver import DENSE_LIMIT, cache_key, load_basis, save_basis


def closed_form_spectrum(nx, count):
    h = 1.0 / nx
    kl = [(k, l) for k in range(1, 12) for l in range(1, 12)]
    vals = [(4 / h**2) * (np.sin(k * np.pi * h / 2) ** 2 + np.sin(l * np.pi * h / 2) ** 2)
            for k, l in kl]
    return np.sort(vals)[:count]


def test_dense_path_matches_closed_form():
    m = build_rectangle_mesh(24, 24, 1.0, 1.0)  # below DENSE_LIMIT
    assert m.n_interior <= DENSE_LIMIT
    b = lowest_eigenpairs(assemble_laplacian(m), 5)
    exact = closed_form_spectrum(24, 5)
    assert np.abs(b.eigenvalues - exact).max() / exact.max() < 1e-10


def test_sparse_path_matches_closed_form():
    m = build_rectangle_mesh(64, 64, 1.0, 1.0)  # above DENSE_LIMIT
    assert m.n_interior > DENSE_LIMIT
    b = lowest_eigenpairs(assemble_laplacian(m), 5)
    exact = closed_form_spectrum(64, 5)
    assert np.abs(b.eigenvalues - exact).max() / exact.max() < 1e-10


def test_first_eigenvalue_near_continuum():
    b = lowest_eigenpairs(assemble_laplacian(build_rectangle_mesh(64, 64, 1.0, 1.0)), 1)
    assert abs(b.eigenvalues[0] - 2 * np.pi**2) / (2 * np.pi**2) < 0.01


def test_m_larger_than_dimension_rejected():
    op = assemble_laplacian(build_rectangle_mesh(4, 4, 1.0, 1.0))
    with pytest.raises(ValueError):
        lowest_eigenpairs(op, op.dim + 1)


def test_orthonormality_and_residual(square32):
    mesh, op, eb, _ = square32
    G = np.einsum("nk,n,nl->kl", eb.vectors, mesh.weights, eb.vectors)
    assert np.abs(G - np.eye(eb.m)).max() < 1e-10
    res = np.linalg.norm(op.matrix @ eb.vectors - eb.vectors * eb.eigenvalues, axis=0)
    assert (res / eb.eigenvalues).max() < 1e-8
    assert eb.eigenvalues[0] > 0
    assert np.all(np.diff(eb.eigenvalues) >= 0)


def test_degenerate_pair_spans_oracle_eigenspace():
    # modes (1,2)/(2,1) on the square are a degenerate pair; compare projectors
    nx = 32
    m = build_rectangle_mesh(nx, nx, 1.0, 1.0)
    b = lowest_eigenpairs(assemble_laplacian(m), 3)
    assert b.eigenvalues[1] == pytest.approx(b.eigenvalues[2], rel=1e-12)
    x, y = m.points[:, 0], m.points[:, 1]
    oracle = np.stack([np.sin(np.pi * x) * np.sin(2 * np.pi * y),
                       np.sin(2 * np.pi * x) * np.sin(np.pi * y)], axis=1)
    s = np.sqrt(m.weights)[:, None]
    Q1, _ = np.linalg.qr(s * b.vectors[:, 1:3])
    Q2, _ = np.linalg.qr(s * oracle)
    # operator-norm distance of the two rank-2 projectors via principal angles
    sv = np.linalg.svd(Q1.T @ Q2, compute_uv=False)
    dist = np.sqrt(max(0.0, 1.0 - sv.min() ** 2))
    assert dist < 1e-6


def test_domain_monotonicity_of_spectrum():
    wide = lowest_eigenpairs(assemble_laplacian(build_annulus_mesh(24, 32, 1.0, 2.0)), 1)
    narrow = lowest_eigenpairs(assemble_laplacian(build_annulus_mesh(24, 32, 1.0, 1.5)), 1)
    assert narrow.eigenvalues[0] > wide.eigenvalues[0]


def test_determinism():
    m = build_rectangle_mesh(64, 64, 1.0, 1.0)
    op = assemble_laplacian(m)
    b1 = lowest_eigenpairs(op, 8, seed=3)
    b2 = lowest_eigenpairs(op, 8, seed=3)
    assert np.array_equal(b1.eigenvalues, b2.eigenvalues)
    assert np.array_equal(b1.vectors, b2.vectors)


def test_sign_convention():
    m = build_rectangle_mesh(16, 16, 1.0, 1.0)
    b = lowest_eigenpairs(assemble_laplacian(m), 6)
    for j in range(b.m):
        v = b.vectors[:, j]
        assert v[np.argmax(np.abs(v))] > 0


def test_cache_roundtrip(tmp_path):
    m = build_rectangle_mesh(16, 16, 1.0, 1.0)
    op = assemble_laplacian(m)
    b1 = dirichlet_basis(op, 5, cache_dir=tmp_path)
    assert load_basis(tmp_path, m, 5, "dirichlet") is not None
    b2 = dirichlet_basis(op, 5, cache_dir=tmp_path)  # cache hit
    assert np.abs(b1.eigenvalues - b2.eigenvalues).max() < 1e-12
    assert np.abs(b1.vectors - b2.vectors).max() < 1e-12
    # a different mesh misses
    other = build_rectangle_mesh(18, 16, 1.0, 1.0)
    assert load_basis(tmp_path, other, 5, "dirichlet") is None
    assert cache_key(m, 5, "dirichlet") != cache_key(other, 5, "dirichlet")


def test_cache_save_writes_sidecar(tmp_path):
    m = build_rectangle_mesh(16, 16, 1.0, 1.0)
    path = save_basis(tmp_path, m, 3, "test", {"eigenvalues": np.arange(3.0)})
    assert path.exists()
    assert path.with_suffix(".json").exists()
