"""Runtime invariant suite behind the ``verify`` CLI subcommand.

Each check exercises one of the structural identities the scheme is built on
(operator symmetry, orthonormality, exact skew advection, diagonal decay,
...) at a desk-size resolution and returns pass/fail with a measured detail.
The CLI prints them as a table and exits nonzero if anything fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__  # noqa: F401  (stamped into reports by the CLI)
from .config import ConfigError, parse_config
from .dynamics import System, run_simulation
from .eigensolver import lowest_eigenpairs
from .mesh import (assemble_laplacian, build_annulus_mesh, build_rectangle_mesh,
                   divergence, gradient, inner, lp_norm)
from .runio import DIAG_HEADER
from .spectral import (SpectralField, advection_commutator, apply_fractional,
                       convexity_defect, dnorm, from_coeffs, poisson_extension,
                       riesz, to_coeffs)
from .stokes import advect, leray_project, nonlinear_term, reconstruct_velocity, stokes_basis

__all__ = ["CheckResult", "run_all"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _ctx(size: int):
    mesh = build_rectangle_mesh(size, size, 1.0, 0.8)
    op = assemble_laplacian(mesh)
    eb = lowest_eigenpairs(op, min(24, op.dim))
    sb = stokes_basis(mesh, min(10, op.dim // 4))
    am = build_annulus_mesh(max(8, size // 2), max(16, size // 2), 1.0, 2.0)
    aop = assemble_laplacian(am)
    return mesh, op, eb, sb, am, aop


def run_all(size: int = 32, seed: int = 0) -> list[CheckResult]:
    mesh, op, eb, sb, am, aop = _ctx(size)
    rng = np.random.default_rng(seed)
    out = []

    def check(name, passed, detail):
        out.append(CheckResult(name, bool(passed), detail))

    # operator symmetry/positivity in the weighted inner product
    worst_sym, worst_pos = 0.0, np.inf
    for o in (op, aop):
        F = rng.standard_normal((o.dim, 100))
        G = rng.standard_normal((o.dim, 100))
        lf, lg = o.matrix @ F, o.matrix @ G
        num = np.abs(np.einsum("nk,n,nk->k", lf, o.weights, G)
                     - np.einsum("nk,n,nk->k", F, o.weights, lg))
        scale = np.linalg.norm(lf, axis=0) * np.linalg.norm(G, axis=0) * o.weights.max()
        worst_sym = max(worst_sym, float((num / scale).max()))
        quad = np.einsum("nk,n,nk->k", lf, o.weights, F)
        worst_pos = min(worst_pos, float(quad.min()))
    check("laplacian W-symmetry", worst_sym < 1e-12, f"rel asym {worst_sym:.2e}")
    check("laplacian positivity", worst_pos > 0, f"min quad form {worst_pos:.2e}")

    # eigenbasis quality
    Gm = np.einsum("nk,n,nl->kl", eb.vectors, mesh.weights, eb.vectors)
    orth = np.abs(Gm - np.eye(eb.m)).max()
    res = np.linalg.norm(op.matrix @ eb.vectors - eb.vectors * eb.eigenvalues, axis=0)
    rel = float((res / eb.eigenvalues).max())
    check("eigenpair orthonormality", orth < 1e-10, f"max dev {orth:.2e}")
    check("eigenpair residual", rel < 1e-8, f"max rel residual {rel:.2e}")
    check("eigenvalues ascending positive",
          eb.eigenvalues[0] > 0 and np.all(np.diff(eb.eigenvalues) >= 0),
          f"mu1 {eb.eigenvalues[0]:.4f}")

    # spectral round trip and Parseval
    f = from_coeffs(SpectralField(eb, rng.standard_normal(eb.m)))
    sf = to_coeffs(eb, f)
    rt = np.abs(from_coeffs(sf) - f).max()
    par = abs(inner(mesh, f, f) - float(np.sum(sf.coeffs**2)))
    check("span round trip", rt < 1e-12 * max(1, np.abs(f).max()), f"max dev {rt:.2e}")
    check("parseval", par < 1e-10 * max(1.0, inner(mesh, f, f)), f"dev {par:.2e}")

    # fractional calculus identities
    add = np.abs(apply_fractional(apply_fractional(sf, 1.0), -1.0).coeffs - sf.coeffs).max()
    check("exponent additivity", add < 1e-12, f"max dev {add:.2e}")
    e1 = poisson_extension(sf, 0.3).coeffs
    e2 = poisson_extension(poisson_extension(sf, 0.1), 0.2, semigroup_only=True).coeffs
    semi = np.abs(e1 - e2).max()
    check("poisson semigroup", semi < 1e-12, f"max dev {semi:.2e}")
    decays = [dnorm(poisson_extension(sf, z, semigroup_only=True), 0.0)
              for z in (0.0, 0.1, 0.2, 0.5)]
    check("poisson monotone decay", all(b <= a for a, b in zip(decays, decays[1:])),
          f"norms {['%.3f' % d for d in decays]}")

    # riesz transform normalization
    rnorm = lp_norm(mesh, riesz(SpectralField(eb, np.eye(eb.m)[0])), 2)
    check("riesz unit norm", abs(rnorm - 1) < 5 * max(mesh.spacings),
          f"|R phi_1| = {rnorm:.4f}")

    # discrete grad/div duality
    g = rng.standard_normal(mesh.n_interior)
    v = rng.standard_normal((2, mesh.n_interior))
    dual = abs(inner(mesh, gradient(mesh, g), v) + inner(mesh, g, divergence(mesh, v)))
    check("grad/div duality", dual < 1e-10, f"dev {dual:.2e}")

    # convexity defect nearly nonnegative
    worst = 0.0
    for kind in ("square", "quartic"):
        c = np.zeros(eb.m)
        c[:8] = rng.standard_normal(8) * np.exp(-0.4 * np.arange(8))
        fld = from_coeffs(SpectralField(eb, c))
        d = convexity_defect(eb, fld, kind, 1.0)
        lam_f = from_coeffs(apply_fractional(to_coeffs(eb, fld), 1.0))
        scale = np.abs(d).max() + np.abs(lam_f).max() ** 2 * max(mesh.spacings)
        worst = max(worst, max(0.0, -float(d.min())) / scale)
    check("convexity defect", worst < 0.05, f"normalized violation {worst:.2e}")

    # commutator vanishes for zero velocity
    comm = advection_commutator(eb, np.zeros((2, mesh.n_interior)), f)
    check("commutator at u=0", np.abs(comm).max() == 0.0, "exactly zero")

    # stokes basis invariants
    Gs = np.einsum("kcn,n,lcn->kl", sb.velocities, mesh.weights, sb.velocities)
    sorth = np.abs(Gs - np.eye(sb.m)).max()
    sdiv = max(np.abs(divergence(mesh, sb.velocities[j])).max() for j in range(sb.m))
    kato = max(
        abs(inner(mesh, gradient(mesh, sb.velocities[j][0]), gradient(mesh, sb.velocities[j][0]))
            + inner(mesh, gradient(mesh, sb.velocities[j][1]), gradient(mesh, sb.velocities[j][1]))
            - sb.eigenvalues[j]) / sb.eigenvalues[j]
        for j in range(sb.m)
    )
    check("stokes orthonormality", sorth < 1e-8, f"max dev {sorth:.2e}")
    check("stokes divergence-free", sdiv < 1e-10, f"max div {sdiv:.2e}")
    check("kato identity", kato < 1e-10, f"max rel dev {kato:.2e}")
    check("lambda1 >= mu1", sb.eigenvalues[0] >= eb.eigenvalues[0],
          f"{sb.eigenvalues[0]:.3f} >= {eb.eigenvalues[0]:.3f}")
    gphi = gradient(mesh, eb.vectors[:, 0])
    lg = np.abs(leray_project(sb, gphi)).max()
    check("leray kills gradients", lg < 1e-8, f"max coeff {lg:.2e}")

    # advection energy neutrality
    a = rng.standard_normal(sb.m)
    u = reconstruct_velocity(sb, a)
    sc = inner(mesh, advect(mesh, u, f), f)
    bu = float(nonlinear_term(sb, a) @ a)
    scale_adv = (1 + np.abs(u).max()) * (1 + inner(mesh, f, f))
    check("advection skew", abs(sc) < 1e-12 * scale_adv, f"<adv f, f> = {sc:.2e}")
    check("self-advection neutral", abs(bu) < 1e-12 * (1 + float(a @ a)) ** 2,
          f"<P B(u,u), u> = {bu:.2e}")

    # decoupled diagonal decay
    sys_off = System(mesh, eb, sb, coupling_on=False, transport_on=False)
    a0 = rng.standard_normal(sb.m)
    b0 = rng.standard_normal(eb.m)
    result = run_simulation(sys_off, a0, b0, dt=0.02, t_end=0.2)
    aerr = np.abs(result.final_state.a - np.exp(-sb.eigenvalues * 0.2) * a0).max()
    berr = np.abs(result.final_state.b - np.exp(-np.sqrt(eb.eigenvalues) * 0.2) * b0).max()
    check("decoupled exact decay", max(aerr, berr) < 1e-12, f"max dev {max(aerr, berr):.2e}")

    # the pinned output format
    check("diagnostics header pinned",
          DIAG_HEADER.startswith("t,u_H,") and len(DIAG_HEADER.split(",")) == 16,
          f"{len(DIAG_HEADER.split(','))} columns")
    try:
        parse_config('{"mesh": {"kind": "rectangle", "nx": 8, "ny": 8}, '
                     '"modes": {"m_velocity": 2, "n_charge": 2}, '
                     '"time": {"dt": 0.1, "t_end": 0.2}, "viscosty": 1}')
        strict = False
    except ConfigError as exc:
        strict = "viscosty" in str(exc)
    check("config strict parsing", strict, "unknown key rejected by name")

    return out
