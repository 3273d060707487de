"""Divergence-free velocity eigenbasis and the skew-symmetric advection term.

The 2D Stokes eigenproblem is solved in stream-function form: biharmonic with
clamped walls against the Dirichlet Laplacian, which eliminates pressure and
yields velocities w = perp_grad(psi) that are divergence-free to rounding.

Raw perp-gradients of the stream eigenvectors are only O(h^2) orthonormal
(wide vs compact stencil mismatch), so the basis is finished in two exact
steps: Lowdin orthonormalization of the velocities in the weighted inner
product, then rediagonalization of the discrete gradient form on that span.
The reported lambda_j are the Rayleigh-Ritz eigenvalues of the form, making
orthonormality, the Kato identity lambda_j = ||grad w_j||^2, and the diagonal
Stokes action exact instead of truncation-limited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .eigensolver import DENSE_LIMIT, EigenSolveError, _fix_signs
from .mesh import Mesh, assemble_laplacian, clamped_biharmonic, divergence, gradient, perp_gradient

__all__ = ["StokesBasis", "stokes_basis", "leray_project", "reconstruct_velocity",
           "advect", "nonlinear_term", "apply_stokes", "grad_norm"]


@dataclass(frozen=True)
class StokesBasis:
    """Orthonormal divergence-free velocity modes with their stream functions.

    eigenvalues : (m,) ascending Stokes eigenvalues
    velocities  : (m, 2, n) fields, <w_i, w_j>_w = delta_ij
    streams     : (n, m) stream functions generating the same span
    """

    mesh: Mesh
    eigenvalues: np.ndarray
    velocities: np.ndarray
    streams: np.ndarray

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    def __post_init__(self):
        for name in ("eigenvalues", "velocities", "streams"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        n = self.mesh.n_interior
        rec = self.velocities.reshape(self.m, 2 * n)
        proj = rec * np.tile(self.mesh.weights, 2)
        rec.flags.writeable = False
        proj.flags.writeable = False
        object.__setattr__(self, "_rec", rec)
        object.__setattr__(self, "_proj", proj)


def _gradient_form(mesh: Mesh, velocities: np.ndarray) -> np.ndarray:
    """S_ij = sum over components of <grad w_i, grad w_j>_w."""
    m = velocities.shape[0]
    n = mesh.n_interior
    D = np.empty((m, 4, n))
    for k in range(m):
        D[k, 0:2] = gradient(mesh, velocities[k, 0])
        D[k, 2:4] = gradient(mesh, velocities[k, 1])
    S = np.einsum("kan,lan,n->kl", D, D, mesh.weights, optimize=True)
    return (S + S.T) * 0.5


def stokes_basis(mesh: Mesh, m: int, seed: int = 0) -> StokesBasis:
    """The m lowest Stokes modes on the mesh.

    Solves biharmonic(psi) = lambda * (-Laplace)(psi) with clamped walls,
    then orthonormalizes and rediagonalizes as described in the module
    docstring.  m is capped at a quarter of the interior dimension.
    """
    n = mesh.n_interior
    if not 1 <= m <= n // 4:
        raise ValueError(f"need 1 <= m <= dim/4 = {n // 4}, got m={m}")
    K = assemble_laplacian(mesh)
    B = clamped_biharmonic(mesh)
    s = np.sqrt(mesh.weights)
    Sm = sp.diags(s)
    Sinv = sp.diags(1.0 / s)
    Bs = Sm @ B @ Sinv
    Ks = Sm @ K.matrix @ Sinv
    Bs = ((Bs + Bs.T) * 0.5).tocsc()
    Ks = ((Ks + Ks.T) * 0.5).tocsc()
    if n <= DENSE_LIMIT:
        _, vecs = scipy.linalg.eigh(Bs.toarray(), Ks.toarray(), subset_by_index=[0, m - 1])
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            vals, vecs = spla.eigsh(Bs, k=m, M=Ks, sigma=0.0, which="LM", v0=v0,
                                    maxiter=max(50 * m, 2000))
        except spla.ArpackNoConvergence as exc:
            raise EigenSolveError(f"Stokes eigensolve failed for k={m}, dim={n}: {exc}") from exc
        vecs = vecs[:, np.argsort(vals)]
    # back to stream functions; eigh/eigsh give y with y^T Ks y = I
    psi = vecs / s[:, None]

    V = np.stack([perp_gradient(mesh, psi[:, k]) for k in range(m)])  # (m, 2, n)
    G = np.einsum("kcn,lcn,n->kl", V, V, mesh.weights, optimize=True)
    gvals, gvecs = scipy.linalg.eigh((G + G.T) * 0.5)
    if gvals[0] <= 0:
        raise EigenSolveError("velocity Gram matrix not positive definite; increase resolution")
    ginv_half = gvecs @ np.diag(gvals**-0.5) @ gvecs.T
    U = np.einsum("kcn,kl->lcn", V, ginv_half, optimize=True)
    psi_orth = psi @ ginv_half

    S = _gradient_form(mesh, U)
    lam, Q = scipy.linalg.eigh(S)
    W = np.einsum("kcn,kl->lcn", U, Q, optimize=True)
    streams = psi_orth @ Q

    flat = W.reshape(m, -1)
    signs = np.sign(flat[np.arange(m), np.argmax(np.abs(flat), axis=1)])
    signs[signs == 0] = 1.0
    W = W * signs[:, None, None]
    streams = streams * signs
    return StokesBasis(mesh, lam, W, streams)


def leray_project(basis: StokesBasis, v: np.ndarray) -> np.ndarray:
    """Coefficients <v, w_j>_w of the projection onto the velocity span.

    Annihilates discrete gradients to rounding, by the grad/div duality of the
    mesh stencils and exact divergence-freeness of the basis.
    """
    return basis._proj @ np.asarray(v).reshape(-1)


def reconstruct_velocity(basis: StokesBasis, a: np.ndarray) -> np.ndarray:
    return (np.asarray(a) @ basis._rec).reshape(2, -1)


def apply_stokes(basis: StokesBasis, a: np.ndarray) -> np.ndarray:
    """Diagonal action of the Stokes operator on span coefficients."""
    return basis.eigenvalues * np.asarray(a)


def grad_norm(basis: StokesBasis, a: np.ndarray) -> float:
    """||grad u||_{L2} for u in the span, via the exact diagonal form."""
    return float(np.sqrt(np.sum(basis.eigenvalues * np.asarray(a) ** 2)))


def advect(mesh: Mesh, u: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Skew-symmetric advection (u.grad f + div(u f)) / 2, componentwise.

    Exactly antisymmetric in the weighted inner product: <advect(u, f), f>_w
    vanishes to rounding for any u, which is what keeps transport
    energy-neutral without quadrature caveats.
    """
    f = np.asarray(f)
    if f.ndim == 1:
        g = gradient(mesh, f)
        conv = u[0] * g[0] + u[1] * g[1]
        return 0.5 * (conv + divergence(mesh, u * f))
    return np.stack([advect(mesh, u, comp) for comp in f])


def nonlinear_term(basis: StokesBasis, a: np.ndarray) -> np.ndarray:
    """Projected velocity self-advection P_m[(u.grad) u] in coefficients."""
    u = reconstruct_velocity(basis, a)
    return leray_project(basis, advect(basis.mesh, u, u))
