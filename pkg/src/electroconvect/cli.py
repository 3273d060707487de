"""Command-line entry point.

Subcommands:
    run     integrate a configured simulation, writing diagnostics + snapshots
    eig     compute (and optionally cache) eigenbases, print the spectra
    verify  execute the invariant suite and print a pass/fail table
    sweep   measure commutator / inequality constants over random samples

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 blow-up.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, MeshConfig, RunConfig, parse_config
from .dynamics import BlowUpError, System, run_simulation
from .eigensolver import dirichlet_basis, lowest_eigenpairs
from .mesh import assemble_laplacian, build_annulus_mesh, build_rectangle_mesh
from .presets import charge_coeffs, parse_preset, velocity_coeffs
from .runio import write_diagnostics, write_snapshot
from .stokes import stokes_basis
from .sweeps import run_sweeps_over_grids
from .verify import run_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_BLOWUP = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_mesh(cfg: MeshConfig):
    if cfg.kind == "rectangle":
        return build_rectangle_mesh(cfg.nx, cfg.ny, cfg.Lx, cfg.Ly)
    return build_annulus_mesh(cfg.nr, cfg.ntheta, cfg.r_inner, cfg.r_outer)


def _named_mesh(name: str, size: int):
    if name == "square":
        return build_rectangle_mesh(size, size, 1.0, 1.0)
    if name == "annulus":
        return build_annulus_mesh(size, size, 1.0, 2.0)
    raise UsageError(f"unknown mesh name {name!r} (expected 'square' or 'annulus')")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    from dataclasses import replace

    if args.mesh:
        size = args.size or 32
        if args.mesh == "square":
            cfg = replace(cfg, mesh=MeshConfig(kind="rectangle", nx=size, ny=size))
        elif args.mesh == "annulus":
            cfg = replace(cfg, mesh=MeshConfig(kind="annulus", nr=size, ntheta=size))
        else:
            raise UsageError(f"unknown mesh override {args.mesh!r}")
    if args.m:
        cfg = replace(cfg, modes=replace(cfg.modes, m_velocity=args.m))
    if args.n:
        cfg = replace(cfg, modes=replace(cfg.modes, n_charge=args.n))
    if args.out:
        cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    return cfg


def cmd_run(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    cfg = _apply_overrides(cfg, args)
    mesh = build_mesh(cfg.mesh)
    op = assemble_laplacian(mesh)
    eb = lowest_eigenpairs(op, cfg.modes.n_charge, seed=args.seed)
    sb = stokes_basis(mesh, cfg.modes.m_velocity, seed=args.seed)
    system = System(mesh, eb, sb,
                    coupling_on=cfg.toggles.coupling_on,
                    transport_on=cfg.toggles.transport_on,
                    full_grid_charge=cfg.toggles.full_grid_charge)
    a0 = velocity_coeffs(sb, parse_preset(cfg.initial_data.velocity))
    b0 = charge_coeffs(eb, parse_preset(cfg.initial_data.charge))
    outdir = Path(cfg.output.directory)
    try:
        result = run_simulation(system, a0, b0, cfg.time.dt, cfg.time.t_end,
                                diag_every=cfg.time.diag_every,
                                snapshot_times=cfg.time.snapshot_times,
                                blowup_factor=args.blowup_factor)
    except BlowUpError as exc:
        print(f"BLOW-UP: {exc}", file=sys.stderr)
        write_diagnostics([exc.last_record], outdir / "diagnostics.csv")
        return EXIT_BLOWUP
    write_diagnostics(result.records, outdir / "diagnostics.csv")
    for t, name, field in result.snapshots:
        write_snapshot(field, mesh, outdir / f"snap_{name}_t{t:.6f}.csv", t, name)
    print(f"wrote {len(result.records)} diagnostics rows and "
          f"{len(result.snapshots)} snapshots to {outdir}")
    return EXIT_OK


def cmd_eig(args) -> int:
    mesh = _named_mesh(args.mesh, args.size)
    op = assemble_laplacian(mesh)
    basis = dirichlet_basis(op, args.m, seed=args.seed, cache_dir=args.cache)
    print(f"# dirichlet eigenvalues ({args.mesh} size={args.size} m={args.m})")
    for j, mu in enumerate(basis.eigenvalues, start=1):
        print(f"mu_{j} = {mu:.17g}")
    if args.stokes:
        sb = stokes_basis(mesh, args.m, seed=args.seed)
        print(f"# stokes eigenvalues (m={args.m})")
        for j, lam in enumerate(sb.eigenvalues, start=1):
            print(f"lambda_{j} = {lam:.17g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(size=args.size, seed=args.seed)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failures += not r.passed
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed "
          f"(electroconvect {__version__})")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_sweep(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    results = run_sweeps_over_grids(args.kind, args.grid, args.samples, args.seed)
    for grid, res in results.items():
        if args.kind == "commutator":
            path = outdir / f"commutator_grid{grid}.csv"
            lines = ["sample,ratio"]
            lines += [f"{i},{r:.17g}" for i, r in enumerate(res.ratios)]
            path.write_text("\n".join(lines) + "\n")
            print(f"grid {grid}: max ratio {res.max:.6g} -> {path}")
        else:
            path = outdir / f"inequalities_grid{grid}.csv"
            names = sorted(res)
            lines = ["sample," + ",".join(names)]
            n = len(res[names[0]].ratios)
            for i in range(n):
                lines.append(f"{i}," + ",".join(f"{res[k].ratios[i]:.17g}" for k in names))
            path.write_text("\n".join(lines) + "\n")
            summary = ", ".join(f"{k}={res[k].max:.4g}" for k in names)
            print(f"grid {grid}: {summary} -> {path}")
    return EXIT_OK


def make_parser() -> _Parser:
    p = _Parser(prog="electroconvect", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="integrate a configured simulation")
    pr.add_argument("--config", required=True, help="JSON run configuration")
    pr.add_argument("--out", help="override output directory")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--mesh", help="override mesh: 'square' or 'annulus'")
    pr.add_argument("--size", type=int, help="cells per side for --mesh override")
    pr.add_argument("--m", type=int, help="override velocity mode count")
    pr.add_argument("--n", type=int, help="override charge mode count")
    pr.add_argument("--blowup-factor", type=float, default=1e8,
                    help="abort threshold as a multiple of the initial composite norm")
    pr.set_defaults(fn=cmd_run)

    pe = sub.add_parser("eig", help="compute/cache eigenbases and print spectra")
    pe.add_argument("--mesh", default="square", help="'square' or 'annulus'")
    pe.add_argument("--size", type=int, default=32)
    pe.add_argument("--m", type=int, default=5)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--stokes", action="store_true", help="also print Stokes eigenvalues")
    pe.add_argument("--cache", help="eigenpair cache directory")
    pe.set_defaults(fn=cmd_eig)

    pv = sub.add_parser("verify", help="run the invariant suite")
    pv.add_argument("--size", type=int, default=32)
    pv.add_argument("--seed", type=int, default=0)
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("sweep", help="measure commutator/inequality constants")
    ps.add_argument("--kind", choices=["commutator", "inequalities"], default="commutator")
    ps.add_argument("--grid", type=int, nargs="+", default=[32])
    ps.add_argument("--samples", type=int, default=100)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default="sweeps")
    ps.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
