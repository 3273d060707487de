"""Measured-constant sweeps: commutator ratio and the inequality suite.

The underlying engine gives no numeric constants for these inequalities, so
they are measured over random span samples and reported; acceptance asserts
boundedness across resolutions rather than specific values.  Sweep jobs for
different grids are independent and may run concurrently; the
ELECTROCONVECT_THREADS environment variable caps that parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .eigensolver import lowest_eigenpairs
from .mesh import assemble_laplacian, build_rectangle_mesh, gradient, lp_norm
from .spectral import (SpectralField, advection_commutator, apply_fractional,
                       bspace_norm, dnorm, from_coeffs, riesz, to_coeffs)
from .stokes import advect, grad_norm, leray_project, reconstruct_velocity, stokes_basis

__all__ = ["SweepResult", "commutator_sweep", "inequality_sweep", "max_workers"]


def max_workers(n_jobs: int) -> int:
    cap = os.environ.get("ELECTROCONVECT_THREADS")
    if cap:
        try:
            return max(1, min(n_jobs, int(cap)))
        except ValueError:
            pass
    return max(1, min(n_jobs, os.cpu_count() or 1))


@dataclass
class SweepResult:
    name: str
    grid: int
    ratios: np.ndarray

    @property
    def max(self) -> float:
        return float(self.ratios.max())


def _bases(grid: int, n_modes: int, m_modes: int, seed: int):
    mesh = build_rectangle_mesh(grid, grid, 1.0, 0.8)
    eb = lowest_eigenpairs(assemble_laplacian(mesh), n_modes, seed=seed)
    sb = stokes_basis(mesh, m_modes, seed=seed)
    return mesh, eb, sb


def commutator_sweep(grid: int, samples: int = 200, seed: int = 0,
                     n_modes: int = 64, m_modes: int = 16,
                     field_modes: int = 16) -> SweepResult:
    """Max of ||[u.grad, Lambda] f||_{1/2,D} / (||u||_B ||f||_{3/2,D}).

    Velocities are random Stokes-span fields (tangent to the wall by
    construction); f are random low-mode span fields, comparable across grids
    because the coefficient draws are seed-fixed.
    """
    mesh, eb, sb = _bases(grid, n_modes, m_modes, seed)
    rng = np.random.default_rng(seed)
    ratios = np.empty(samples)
    for i in range(samples):
        a = rng.standard_normal(m_modes) * np.exp(-0.3 * np.arange(m_modes))
        c = np.zeros(n_modes)
        c[:field_modes] = rng.standard_normal(field_modes) * np.exp(-0.3 * np.arange(field_modes))
        u = reconstruct_velocity(sb, a)
        f = from_coeffs(SpectralField(eb, c))
        comm = advection_commutator(eb, u, f)
        num = dnorm(to_coeffs(eb, comm), 0.5)
        den = bspace_norm(mesh, u) * dnorm(to_coeffs(eb, f), 1.5)
        ratios[i] = num / den
    return SweepResult("commutator", grid, ratios)


INEQUALITIES = ("lfour", "ulfour", "naulfour", "buuau", "abuu", "force_bound")


def inequality_sweep(grid: int, samples: int = 100, seed: int = 0,
                     n_modes: int = 48, m_modes: int = 12) -> dict[str, SweepResult]:
    """Measured constants for the embedding/bilinear-term inequalities.

    lfour       ||f||_L4 / ||f||_{1/2,D}
    ulfour      ||u||_L4 / (||u||^{1/2} ||grad u||^{1/2})
    naulfour    ||grad u||_L4 / (||grad u||^{1/2} ||Au||^{1/2})
    buuau       ||P B(u,u)|| / (||u||^{1/2} ||grad u|| ||Au||^{1/2})
    abuu        ||A^{1/2} P B(u,u)|| / (||u||^{1/2}||Au||^{3/2} + ||grad u|| ||Au||)
    force_bound ||P(-q R q)|| / (||q||_Linf ||q||_L2)
    """
    mesh, eb, sb = _bases(grid, n_modes, m_modes, seed)
    rng = np.random.default_rng(seed)
    lam = sb.eigenvalues
    out = {k: np.empty(samples) for k in INEQUALITIES}
    for i in range(samples):
        c = rng.standard_normal(n_modes) * np.exp(-0.2 * np.arange(n_modes))
        f = from_coeffs(SpectralField(eb, c))
        out["lfour"][i] = lp_norm(mesh, f, 4) / dnorm(to_coeffs(eb, f), 0.5)

        a = rng.standard_normal(m_modes) * np.exp(-0.2 * np.arange(m_modes))
        u = reconstruct_velocity(sb, a)
        uh = float(np.sqrt(a @ a))
        gu = grad_norm(sb, a)
        au = float(np.sqrt(np.sum(lam**2 * a**2)))
        gu_field = np.concatenate([gradient(mesh, u[0]), gradient(mesh, u[1])])
        gu4 = float((mesh.weights @ (np.sum(gu_field**2, axis=0) ** 2)) ** 0.25)
        out["ulfour"][i] = lp_norm(mesh, u, 4) / (uh**0.5 * gu**0.5)
        out["naulfour"][i] = gu4 / (gu**0.5 * au**0.5)
        bc = leray_project(sb, advect(mesh, u, u))
        bn = float(np.sqrt(bc @ bc))
        out["buuau"][i] = bn / (uh**0.5 * gu * au**0.5)
        ab = float(np.sqrt(np.sum(lam * bc**2)))
        out["abuu"][i] = ab / (uh**0.5 * au**1.5 + gu * au)

        q = SpectralField(eb, c)
        qg = from_coeffs(q)
        force = leray_project(sb, -(qg * riesz(q)))
        out["force_bound"][i] = float(np.sqrt(force @ force)) / (
            lp_norm(mesh, qg, np.inf) * lp_norm(mesh, qg, 2)
        )
    return {k: SweepResult(k, grid, v) for k, v in out.items()}


def run_sweeps_over_grids(kind: str, grids, samples: int, seed: int):
    """Run one sweep kind over several grids, concurrently up to the cap."""
    if kind == "commutator":
        fn = lambda g: commutator_sweep(g, samples=samples, seed=seed)
    elif kind == "inequalities":
        fn = lambda g: inequality_sweep(g, samples=samples, seed=seed)
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    grids = list(grids)
    with ThreadPoolExecutor(max_workers=max_workers(len(grids))) as pool:
        return dict(zip(grids, pool.map(fn, grids)))
