"""Time integration of the coupled Galerkin system with its diagnostics ledger.

State is the pair of coefficient vectors (a for velocity in the Stokes basis,
b for charge in the Dirichlet basis).  The stiff diagonal dissipation is
integrated exactly by the factors exp(-lambda_j dt) and exp(-sqrt(mu_j) dt);
the nonlinear coupling terms advance with an explicit two-stage midpoint rule
under the integrating factor, so the scheme is second order overall and exact
when the couplings are switched off.

Tracked balances:
  velocity:  d||u||^2/dt = -2||grad u||^2 + 2<force, u>   (self-advection is
             energy-neutral to rounding)
  charge:    d||q||^2/dt = -2||Lambda^(1/2) q||^2         (transport neutral)
The per-run energy residual and the cumulative dissipation integrals are
accumulated with midpoint quadrature, matching the scheme's order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .eigensolver import EigenBasis
from .mesh import Mesh, lp_norm
from .spectral import SpectralField, apply_fractional, from_coeffs, riesz, to_coeffs
from .stokes import StokesBasis, advect, leray_project, nonlinear_term, reconstruct_velocity

__all__ = [
    "SimState",
    "DiagnosticsRecord",
    "System",
    "CFLError",
    "BlowUpError",
    "force_term",
    "transport_term",
    "step",
    "diagnostics",
    "run_simulation",
    "RunResult",
]

CFL_LIMIT = 0.5
DEFAULT_BLOWUP_FACTOR = 1e8


class CFLError(RuntimeError):
    """Advective CFL guard tripped; carries a suggested stable dt."""

    def __init__(self, dt, umax, h, suggested):
        super().__init__(
            f"CFL violation: dt*|u|_inf/h = {dt * umax / h:.3g} > {CFL_LIMIT}; "
            f"try dt <= {suggested:.3g}"
        )
        self.suggested_dt = suggested


class BlowUpError(RuntimeError):
    """A tracked norm left the admissible range; carries the last good record."""

    def __init__(self, message, last_record):
        super().__init__(message)
        self.last_record = last_record


@dataclass(frozen=True)
class SimState:
    """Galerkin coefficients at one instant; q_grid only in full-grid mode."""

    t: float
    a: np.ndarray
    b: np.ndarray
    q_grid: np.ndarray | None = None

    def require_finite(self):
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise FloatingPointError(f"non-finite coefficients at t={self.t}")
        if self.q_grid is not None and not np.all(np.isfinite(self.q_grid)):
            raise FloatingPointError(f"non-finite charge grid at t={self.t}")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    u_H: float
    grad_u_L2: float
    Au_H: float
    q_L1: float
    q_L2: float
    q_L4: float
    q_Linf: float
    q_D05: float
    q_D1: float
    q_D15: float
    q_D2: float
    lam_q_L4: float
    energy_residual: float
    dissipation_u: float
    dissipation_q: float


@dataclass(frozen=True)
class System:
    """Mesh, bases, and toggles bundled for the stepping loop."""

    mesh: Mesh
    dirichlet: EigenBasis
    stokes: StokesBasis
    coupling_on: bool = True
    transport_on: bool = True
    full_grid_charge: bool = False

    @property
    def sqrt_mu(self) -> np.ndarray:
        return np.sqrt(self.dirichlet.eigenvalues)


def force_term(q: SpectralField, sbasis: StokesBasis) -> np.ndarray:
    """Projected electrical body force P_m(-q R q) in velocity coefficients.

    Quadratic in q, so force(-q) = force(q).
    """
    qg = from_coeffs(q)
    return leray_project(sbasis, -(qg * riesz(q)))


def transport_term(q: SpectralField, a: np.ndarray, system: System) -> np.ndarray:
    """P_n of the skew-form advection of the charge by the span velocity."""
    u = reconstruct_velocity(system.stokes, a)
    return to_coeffs(system.dirichlet, advect(system.mesh, u, from_coeffs(q))).coeffs


@dataclass
class _StepLedger:
    umax: float = 0.0
    dissipation_u: float = 0.0
    dissipation_q: float = 0.0
    force_work: float = 0.0


def _rhs(system: System, a, b, ledger: _StepLedger | None = None):
    """Non-stiff part of the right-hand side (couplings only)."""
    ra = np.zeros_like(a)
    rb = np.zeros_like(b)
    need_u = system.coupling_on or system.transport_on
    if need_u:
        u = reconstruct_velocity(system.stokes, a)
        if ledger is not None:
            ledger.umax = max(ledger.umax, float(np.abs(u).max(initial=0.0)))
    q = SpectralField(system.dirichlet, b)
    if system.coupling_on:
        f = force_term(q, system.stokes)
        ra = f - nonlinear_term(system.stokes, a)
        if ledger is not None:
            ledger.force_work += float(f @ a)
    if system.transport_on:
        rb = -transport_term(q, a, system)
    return ra, rb


def _check_cfl(system: System, dt, a):
    if not (system.coupling_on or system.transport_on):
        return
    u = reconstruct_velocity(system.stokes, a)
    umax = float(np.abs(u).max(initial=0.0))
    h = system.mesh.h_min
    if dt * umax / h > CFL_LIMIT:
        raise CFLError(dt, umax, h, CFL_LIMIT * h / umax)


def step(state: SimState, dt: float, system: System) -> tuple[SimState, _StepLedger]:
    """One integrating-factor midpoint step.

    Exact on the diagonal dissipation for any dt; the CFL guard applies only
    to the explicit advective couplings.
    """
    if dt <= 0:
        raise ValueError(f"need dt > 0, got {dt}")
    state.require_finite()
    if system.full_grid_charge:
        return _step_full_grid(state, dt, system)
    _check_cfl(system, dt, state.a)
    lam = system.stokes.eigenvalues
    smu = system.sqrt_mu
    Ea, Eha = np.exp(-lam * dt), np.exp(-lam * dt / 2.0)
    Eb, Ehb = np.exp(-smu * dt), np.exp(-smu * dt / 2.0)

    ledger = _StepLedger()
    ra, rb = _rhs(system, state.a, state.b)
    a_half = Eha * (state.a + 0.5 * dt * ra)
    b_half = Ehb * (state.b + 0.5 * dt * rb)

    half_ledger = _StepLedger()
    ra_h, rb_h = _rhs(system, a_half, b_half, half_ledger)
    a_new = Ea * state.a + dt * Eha * ra_h
    b_new = Eb * state.b + dt * Ehb * rb_h

    ledger.umax = half_ledger.umax
    ledger.dissipation_u = dt * float(np.sum(lam * a_half**2))
    ledger.dissipation_q = dt * float(np.sum(smu * b_half**2))
    ledger.force_work = dt * half_ledger.force_work
    new = SimState(state.t + dt, a_new, b_new)
    new.require_finite()
    return new, ledger


def _lambda_field(system: System, qg: np.ndarray) -> np.ndarray:
    """Lambda applied through the span; the out-of-span tail is untouched."""
    sf = to_coeffs(system.dirichlet, qg)
    return from_coeffs(apply_fractional(sf, 1.0))


def _step_full_grid(state: SimState, dt: float, system: System):
    """Comparison mode: charge kept on the grid, classical explicit midpoint.

    Transport skips the P_n projection; dissipation acts on the span
    component only, so the tail decays through transport mixing alone.
    """
    _check_cfl(system, dt, state.a)
    lam = system.stokes.eigenvalues
    Ea, Eha = np.exp(-lam * dt), np.exp(-lam * dt / 2.0)

    def rhs_q(a, qg):
        out = -_lambda_field(system, qg)
        if system.transport_on:
            u = reconstruct_velocity(system.stokes, a)
            out = out - advect(system.mesh, u, qg)
        return out

    def rhs_a(a, qg):
        if not system.coupling_on:
            return np.zeros_like(a)
        q = to_coeffs(system.dirichlet, qg)
        return force_term(q, system.stokes) - nonlinear_term(system.stokes, a)

    qg = state.q_grid if state.q_grid is not None else from_coeffs(
        SpectralField(system.dirichlet, state.b)
    )
    a_half = Eha * (state.a + 0.5 * dt * rhs_a(state.a, qg))
    q_half = qg + 0.5 * dt * rhs_q(state.a, qg)
    a_new = Ea * state.a + dt * Eha * rhs_a(a_half, q_half)
    q_new = qg + dt * rhs_q(a_half, q_half)

    ledger = _StepLedger()
    ledger.dissipation_u = dt * float(np.sum(lam * a_half**2))
    b_new = to_coeffs(system.dirichlet, q_new).coeffs
    new = SimState(state.t + dt, a_new, b_new, q_grid=q_new)
    new.require_finite()
    return new, ledger


def diagnostics(state: SimState, system: System,
                energy_residual: float = 0.0,
                dissipation_u: float = 0.0,
                dissipation_q: float = 0.0) -> DiagnosticsRecord:
    """All tracked norms of the current state, via quadrature and spectra."""
    state.require_finite()
    mesh = system.mesh
    lam = system.stokes.eigenvalues
    mu = system.dirichlet.eigenvalues
    a, b = state.a, state.b
    qg = state.q_grid if state.q_grid is not None else from_coeffs(
        SpectralField(system.dirichlet, b)
    )
    lam_q = from_coeffs(apply_fractional(SpectralField(system.dirichlet, b), 1.0))
    return DiagnosticsRecord(
        t=state.t,
        u_H=float(np.sqrt(np.sum(a**2))),
        grad_u_L2=float(np.sqrt(np.sum(lam * a**2))),
        Au_H=float(np.sqrt(np.sum(lam**2 * a**2))),
        q_L1=lp_norm(mesh, qg, 1),
        q_L2=lp_norm(mesh, qg, 2),
        q_L4=lp_norm(mesh, qg, 4),
        q_Linf=lp_norm(mesh, qg, np.inf),
        q_D05=float(np.sqrt(np.sum(mu**0.5 * b**2))),
        q_D1=float(np.sqrt(np.sum(mu * b**2))),
        q_D15=float(np.sqrt(np.sum(mu**1.5 * b**2))),
        q_D2=float(np.sqrt(np.sum(mu**2 * b**2))),
        lam_q_L4=lp_norm(mesh, lam_q, 4),
        energy_residual=energy_residual,
        dissipation_u=dissipation_u,
        dissipation_q=dissipation_q,
    )


@dataclass
class RunResult:
    records: list
    snapshots: list  # (time, name, field) triples
    final_state: SimState
    charge_residual: float  # cumulative |d||q||^2 + 2 dissipation| ledger


def composite_norm(state: SimState, system: System) -> float:
    lam = system.stokes.eigenvalues
    mu = system.dirichlet.eigenvalues
    return float(
        np.sqrt(np.sum(lam**2 * state.a**2))
        + np.sqrt(np.sum(mu**2 * state.b**2))
        + np.sqrt(np.sum(state.a**2))
        + np.sqrt(np.sum(state.b**2))
    )


def run_simulation(system: System, a0: np.ndarray, b0: np.ndarray, dt: float,
                   t_end: float, diag_every: int = 1, snapshot_times=(),
                   blowup_factor: float = DEFAULT_BLOWUP_FACTOR) -> RunResult:
    """March the system to t_end, recording diagnostics every diag_every steps.

    Aborts with BlowUpError (carrying the last good record) if the composite
    tracked norm exceeds blowup_factor times its initial value; the bound
    ledger says this must never happen for valid runs.
    """
    if dt <= 0 or t_end < 0:
        raise ValueError(f"need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")
    if diag_every < 1:
        raise ValueError(f"need diag_every >= 1, got {diag_every}")
    n_steps = max(1, math.ceil(round(t_end / dt, 9))) if t_end > 0 else 0
    state = SimState(0.0, np.asarray(a0, dtype=float), np.asarray(b0, dtype=float))
    if system.full_grid_charge:
        state = replace(state, q_grid=from_coeffs(SpectralField(system.dirichlet, state.b)))
    limit = blowup_factor * max(composite_norm(state, system), 1.0)

    snap_steps = {int(round(ts / dt)): ts for ts in snapshot_times}
    records = [diagnostics(state, system)]
    snapshots = []
    if 0 in snap_steps:
        snapshots.extend(_take_snapshots(state, system))
    energy_residual = 0.0
    diss_u = 0.0
    diss_q = 0.0
    charge_residual = 0.0
    last_record = records[0]
    for k in range(1, n_steps + 1):
        u_h2_prev = float(np.sum(state.a**2))
        q_h2_prev = float(np.sum(state.b**2))
        try:
            state, ledger = step(state, dt, system)
        except FloatingPointError as exc:
            raise BlowUpError(f"non-finite state: {exc}", last_record) from exc
        diss_u += ledger.dissipation_u
        diss_q += ledger.dissipation_q
        energy_residual += (
            float(np.sum(state.a**2)) - u_h2_prev
            + 2.0 * ledger.dissipation_u
            - 2.0 * ledger.force_work
        )
        if not system.full_grid_charge:
            charge_residual += abs(
                float(np.sum(state.b**2)) - q_h2_prev + 2.0 * ledger.dissipation_q
            )
        if composite_norm(state, system) > limit:
            raise BlowUpError(
                f"tracked norms exceeded {blowup_factor:g} x initial composite at t={state.t:.6g}",
                last_record,
            )
        if k % diag_every == 0 or k == n_steps:
            last_record = diagnostics(state, system, energy_residual, diss_u, diss_q)
            records.append(last_record)
        if k in snap_steps:
            snapshots.extend(_take_snapshots(state, system))
    return RunResult(records, snapshots, state, charge_residual)


def _take_snapshots(state: SimState, system: System):
    from .mesh import vorticity as _vort

    qg = state.q_grid if state.q_grid is not None else from_coeffs(
        SpectralField(system.dirichlet, state.b)
    )
    u = reconstruct_velocity(system.stokes, state.a)
    return [
        (state.t, "charge", qg),
        (state.t, "vorticity", _vort(system.mesh, u)),
    ]
