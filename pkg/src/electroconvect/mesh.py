"""Structured meshes, the Dirichlet Laplacian, and discrete vector calculus.

Two geometries are supported: a rectangle with homogeneous Dirichlet data on
all four sides, and an annulus, periodic in theta with Dirichlet walls at both
radii.  Scalar fields live on interior nodes as flat float64 arrays of length
``mesh.n_interior``; vector fields are ``(2, n)`` arrays in the (x, y) frame on
rectangles and the orthonormal (e_r, e_theta) frame on annuli.

All "L2" statements elsewhere in the package mean the weighted quadrature
inner product built here; the annulus weights carry the r dr dtheta metric.
Difference operators use centered stencils with zero extension past Dirichlet
walls and periodic wrap in theta.  With those conventions the discrete duality
<grad g, v>_w = -<g, div v>_w holds to rounding, which downstream energy
identities rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Mesh",
    "DirichletLaplacian",
    "build_rectangle_mesh",
    "build_annulus_mesh",
    "assemble_laplacian",
    "gradient",
    "divergence",
    "perp_gradient",
    "vorticity",
    "integrate",
    "inner",
    "lp_norm",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Mesh:
    """Interior-node discretization of the domain.

    kind      : "rectangle" or "annulus"
    params    : (Lx, Ly) or (r_inner, r_outer)
    shape     : interior grid shape (n1, n2); axis 0 is x (rectangle) or r
                (annulus), axis 1 is y or theta
    spacings  : (hx, hy) or (hr, htheta)
    points    : (n, 2) physical coordinates of interior nodes
    weights   : (n,) strictly positive quadrature weights
    radii     : (n1,) interior radii (annulus only)
    """

    kind: str
    params: tuple[float, float]
    shape: tuple[int, int]
    spacings: tuple[float, float]
    points: np.ndarray
    weights: np.ndarray
    radii: np.ndarray | None = None

    @property
    def n_interior(self) -> int:
        return self.weights.size

    @property
    def h_min(self) -> float:
        """Smallest physical node distance, used for CFL guards."""
        h1, h2 = self.spacings
        if self.kind == "rectangle":
            return min(h1, h2)
        return min(h1, self.params[0] * h2)

    def grid(self, f: np.ndarray) -> np.ndarray:
        """View a flat interior field as its (n1, n2) grid."""
        return np.asarray(f).reshape(self.shape)


def build_rectangle_mesh(nx: int, ny: int, Lx: float = 1.0, Ly: float = 1.0) -> Mesh:
    """Uniform grid on (0, Lx) x (0, Ly) with nx, ny cells per side.

    Interior nodes number (nx-1)(ny-1); each carries weight hx*hy.
    """
    if nx < 3 or ny < 3:
        raise ValueError(f"need nx, ny >= 3, got nx={nx}, ny={ny}")
    if Lx <= 0 or Ly <= 0:
        raise ValueError(f"need positive side lengths, got Lx={Lx}, Ly={Ly}")
    hx, hy = Lx / nx, Ly / ny
    xs = hx * np.arange(1, nx)
    ys = hy * np.arange(1, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    w = np.full(pts.shape[0], hx * hy)
    return Mesh(
        kind="rectangle",
        params=(float(Lx), float(Ly)),
        shape=(nx - 1, ny - 1),
        spacings=(hx, hy),
        points=_frozen(pts),
        weights=_frozen(w),
    )


def build_annulus_mesh(nr: int, ntheta: int, r_inner: float, r_outer: float) -> Mesh:
    """Polar grid on the annulus r_inner < r < r_outer, periodic in theta.

    Dirichlet walls sit at both radii; node weight is r*hr*htheta.
    """
    if not 0 < r_inner < r_outer:
        raise ValueError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    if nr < 3:
        raise ValueError(f"need nr >= 3, got {nr}")
    if ntheta < 8:
        raise ValueError(f"need ntheta >= 8, got {ntheta}")
    hr = (r_outer - r_inner) / nr
    ht = 2.0 * np.pi / ntheta
    radii = r_inner + hr * np.arange(1, nr)
    thetas = ht * np.arange(ntheta)
    R, T = np.meshgrid(radii, thetas, indexing="ij")
    pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    w = (R * hr * ht).ravel()
    return Mesh(
        kind="annulus",
        params=(float(r_inner), float(r_outer)),
        shape=(nr - 1, ntheta),
        spacings=(hr, ht),
        points=_frozen(pts),
        weights=_frozen(w),
        radii=_frozen(radii),
    )


@dataclass(frozen=True)
class DirichletLaplacian:
    """Sparse action of -Laplace with homogeneous Dirichlet data.

    Self-adjoint and positive definite with respect to the weighted inner
    product of its mesh (W A = A^T W), which the eigensolver symmetrizes.
    """

    mesh: Mesh
    matrix: sp.csr_matrix
    weights: np.ndarray

    @property
    def dim(self) -> int:
        return self.weights.size

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f


def _tridiag(n: int) -> sp.csr_matrix:
    return sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


def _periodic_tridiag(n: int) -> sp.csr_matrix:
    m = sp.lil_matrix((n, n))
    m.setdiag(2.0)
    m.setdiag(-1.0, 1)
    m.setdiag(-1.0, -1)
    m[0, n - 1] = -1.0
    m[n - 1, 0] = -1.0
    return m.tocsr()


def assemble_laplacian(mesh: Mesh) -> DirichletLaplacian:
    """Second-order 5-point stencil for -Laplace on interior nodes.

    The annulus uses the conservative form (1/r) d_r (r d_r .) discretized at
    half-points, which keeps the operator self-adjoint under the r-weighted
    quadrature.
    """
    n1, n2 = mesh.shape
    h1, h2 = mesh.spacings
    if mesh.kind == "rectangle":
        A = sp.kron(_tridiag(n1), sp.identity(n2)) / h1**2 + sp.kron(
            sp.identity(n1), _tridiag(n2)
        ) / h2**2
        return DirichletLaplacian(mesh, A.tocsr(), mesh.weights)

    r = mesh.radii
    r_half_lo = r - h1 / 2.0
    r_half_hi = r + h1 / 2.0
    diag = (r_half_lo + r_half_hi) / (r * h1**2)
    lo = -r_half_lo[1:] / (r[1:] * h1**2)   # coupling to the next ring inward
    hi = -r_half_hi[:-1] / (r[:-1] * h1**2)
    R = sp.diags([lo, diag, hi], [-1, 0, 1])
    A = sp.kron(R, sp.identity(n2)) + sp.kron(
        sp.diags(1.0 / (r**2 * h2**2)), _periodic_tridiag(n2)
    )
    return DirichletLaplacian(mesh, A.tocsr(), mesh.weights)


def clamped_biharmonic(mesh: Mesh) -> sp.csr_matrix:
    """Discrete Laplace^2 with clamped walls (f = df/dn = 0).

    Built as the square of the Dirichlet Laplacian plus the diagonal ghost
    correction from the reflection closure f_ghost = f_mirror at each wall;
    the correction lands purely on the diagonal, so W-self-adjointness and
    positivity survive.
    """
    K = assemble_laplacian(mesh).matrix
    n1, n2 = mesh.shape
    h1, h2 = mesh.spacings
    corr = np.zeros(mesh.shape)
    if mesh.kind == "rectangle":
        corr[0, :] += 2.0 / h1**4
        corr[-1, :] += 2.0 / h1**4
        corr[:, 0] += 2.0 / h2**4
        corr[:, -1] += 2.0 / h2**4
    else:
        r = mesh.radii
        corr[0, :] += 2.0 * (r[0] - h1 / 2.0) / (r[0] * h1**4)
        corr[-1, :] += 2.0 * (r[-1] + h1 / 2.0) / (r[-1] * h1**4)
    return (K @ K + sp.diags(corr.ravel())).tocsr()


# -- centered difference helpers; axis 0 uses zero extension, axis 1 is
#    zero-extended on rectangles and periodic on annuli -----------------------


def _d_axis0_zero(g: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(g)
    out[1:-1] = g[2:] - g[:-2]
    out[0] = g[1]
    out[-1] = -g[-2]
    return out / (2.0 * h)


def _d_axis1_zero(g: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(g)
    out[:, 1:-1] = g[:, 2:] - g[:, :-2]
    out[:, 0] = g[:, 1]
    out[:, -1] = -g[:, -2]
    return out / (2.0 * h)


def _d_axis1_periodic(g: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(g, -1, axis=1) - np.roll(g, 1, axis=1)) / (2.0 * h)


def gradient(mesh: Mesh, f: np.ndarray) -> np.ndarray:
    """Centered second-order gradient of an interior scalar field.

    Returns (2, n): (d_x, d_y) on rectangles, (d_r, r^-1 d_theta) on annuli.
    """
    g = mesh.grid(f)
    h1, h2 = mesh.spacings
    if mesh.kind == "rectangle":
        gx = _d_axis0_zero(g, h1)
        gy = _d_axis1_zero(g, h2)
        return np.stack([gx.ravel(), gy.ravel()])
    gr = _d_axis0_zero(g, h1)
    gt = _d_axis1_periodic(g, h2) / mesh.radii[:, None]
    return np.stack([gr.ravel(), gt.ravel()])


def divergence(mesh: Mesh, v: np.ndarray) -> np.ndarray:
    """Centered divergence, adjoint (up to sign) of :func:`gradient`."""
    h1, h2 = mesh.spacings
    v1 = mesh.grid(v[0])
    v2 = mesh.grid(v[1])
    if mesh.kind == "rectangle":
        return (_d_axis0_zero(v1, h1) + _d_axis1_zero(v2, h2)).ravel()
    r = mesh.radii[:, None]
    return (_d_axis0_zero(r * v1, h1) / r + _d_axis1_periodic(v2, h2) / r).ravel()


def perp_gradient(mesh: Mesh, psi: np.ndarray) -> np.ndarray:
    """Rotated gradient of a stream function; exactly divergence-free.

    The component stencils commute, so divergence(perp_gradient(psi)) vanishes
    identically, not just to truncation order.
    """
    g = gradient(mesh, psi)
    return np.stack([-g[1], g[0]])


def vorticity(mesh: Mesh, v: np.ndarray) -> np.ndarray:
    """Scalar curl of a vector field."""
    h1, h2 = mesh.spacings
    v1 = mesh.grid(v[0])
    v2 = mesh.grid(v[1])
    if mesh.kind == "rectangle":
        return (_d_axis0_zero(v2, h1) - _d_axis1_zero(v1, h2)).ravel()
    r = mesh.radii[:, None]
    return (_d_axis0_zero(r * v2, h1) / r - _d_axis1_periodic(v1, h2) / r).ravel()


def integrate(mesh: Mesh, f: np.ndarray) -> float:
    return float(mesh.weights @ np.asarray(f))


def inner(mesh: Mesh, f: np.ndarray, g: np.ndarray) -> float:
    """Weighted inner product; vector fields are summed over components."""
    f = np.asarray(f).reshape(-1, mesh.n_interior)
    g = np.asarray(g).reshape(-1, mesh.n_interior)
    return float(np.einsum("cn,cn,n->", f, g, mesh.weights))


def lp_norm(mesh: Mesh, f: np.ndarray, p: float) -> float:
    """L^p quadrature norm; vector fields use the pointwise Euclidean length."""
    f = np.asarray(f)
    mag = np.abs(f) if f.ndim == 1 else np.sqrt(np.sum(f * f, axis=0))
    if np.isinf(p):
        return float(mag.max(initial=0.0))
    return float((mesh.weights @ mag**p) ** (1.0 / p))
