"""Lowest eigenpairs of weighted-symmetric operators, plus an on-disk cache.

The stiffness action A satisfies W A = A^T W; conjugating with W^(1/2) gives a
plainly symmetric matrix whose Euclidean-orthonormal eigenvectors map back to
weighted-orthonormal fields.  Below ``DENSE_LIMIT`` unknowns we use a dense
LAPACK solve (bit-reproducible); above it, ARPACK's shift-invert Lanczos with
a seeded start vector so repeated runs agree.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import DirichletLaplacian, Mesh

__all__ = ["EigenBasis", "EigenSolveError", "lowest_eigenpairs", "save_basis", "load_basis"]

DENSE_LIMIT = 3000


class EigenSolveError(RuntimeError):
    """Eigensolver failed to converge within its iteration budget."""


@dataclass(frozen=True)
class EigenBasis:
    """Weighted-orthonormal eigenpairs of the Dirichlet Laplacian.

    eigenvalues : (m,) ascending, strictly positive
    vectors     : (n, m); column j satisfies A phi_j = mu_j phi_j and
                  <phi_i, phi_j>_w = delta_ij
    """

    mesh: Mesh
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    def __post_init__(self):
        for name in ("eigenvalues", "vectors"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    flips = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    flips[flips == 0] = 1.0
    return vecs * flips


def symmetrized(op: DirichletLaplacian) -> sp.csr_matrix:
    """W^(1/2) A W^(-1/2), numerically symmetrized."""
    s = np.sqrt(op.weights)
    As = sp.diags(s) @ op.matrix @ sp.diags(1.0 / s)
    return ((As + As.T) * 0.5).tocsr()


def lowest_eigenpairs(op: DirichletLaplacian, m: int, seed: int = 0) -> EigenBasis:
    """The m smallest eigenpairs, weighted-orthonormal, ascending.

    Raises EigenSolveError if the iterative path fails to converge; never
    silently truncates the basis.
    """
    n = op.dim
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= dim, got m={m}, dim={n}")
    As = symmetrized(op)
    s = np.sqrt(op.weights)
    if n <= DENSE_LIMIT:
        vals, vecs = scipy.linalg.eigh(As.toarray())
        vals, vecs = vals[:m], vecs[:, :m]
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            vals, vecs = spla.eigsh(As, k=m, sigma=0.0, which="LM", v0=v0, maxiter=max(50 * m, 2000))
        except spla.ArpackNoConvergence as exc:
            raise EigenSolveError(
                f"Lanczos failed to converge for k={m}, dim={n}: {exc}"
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    phi = _fix_signs(vecs / s[:, None])
    return EigenBasis(op.mesh, vals, phi)


# -- cache --------------------------------------------------------------------

CACHE_FORMAT = 1


def _mesh_descriptor(mesh: Mesh) -> dict:
    return {
        "kind": mesh.kind,
        "params": list(mesh.params),
        "shape": list(mesh.shape),
    }


def cache_key(mesh: Mesh, m: int, flavor: str) -> str:
    blob = json.dumps(
        {"mesh": _mesh_descriptor(mesh), "m": m, "flavor": flavor, "format": CACHE_FORMAT},
        sort_keys=True,
    )
    return f"{flavor}-{hashlib.sha256(blob.encode()).hexdigest()[:16]}"


def save_basis(directory, mesh: Mesh, m: int, flavor: str, arrays: dict[str, np.ndarray]) -> Path:
    """Persist eigen data as a JSON sidecar plus a flat binary array file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = cache_key(mesh, m, flavor)
    np.savez(directory / f"{key}.npz", **arrays)
    meta = {
        "mesh": _mesh_descriptor(mesh),
        "m": m,
        "flavor": flavor,
        "format": CACHE_FORMAT,
        "arrays": sorted(arrays),
    }
    (directory / f"{key}.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    return directory / f"{key}.npz"


def load_basis(directory, mesh: Mesh, m: int, flavor: str) -> dict[str, np.ndarray] | None:
    """Return cached arrays for this (mesh, m, flavor), or None on a miss."""
    directory = Path(directory)
    key = cache_key(mesh, m, flavor)
    meta_path = directory / f"{key}.json"
    data_path = directory / f"{key}.npz"
    if not (meta_path.exists() and data_path.exists()):
        return None
    meta = json.loads(meta_path.read_text())
    if meta.get("format") != CACHE_FORMAT or meta.get("mesh") != _mesh_descriptor(mesh) or meta.get("m") != m:
        return None
    with np.load(data_path) as npz:
        return {k: npz[k] for k in npz.files}


def dirichlet_basis(op: DirichletLaplacian, m: int, seed: int = 0, cache_dir=None) -> EigenBasis:
    """lowest_eigenpairs with an optional cache round trip."""
    if cache_dir is not None:
        hit = load_basis(cache_dir, op.mesh, m, "dirichlet")
        if hit is not None:
            return EigenBasis(op.mesh, hit["eigenvalues"], hit["vectors"])
    basis = lowest_eigenpairs(op, m, seed=seed)
    if cache_dir is not None:
        save_basis(cache_dir, op.mesh, m, "dirichlet",
                   {"eigenvalues": basis.eigenvalues, "vectors": basis.vectors})
    return basis
