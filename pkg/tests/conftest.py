import numpy as np
import pytest

from electroconvect import (
    assemble_laplacian,
    build_annulus_mesh,
    build_rectangle_mesh,
    lowest_eigenpairs,
    stokes_basis,
)


@pytest.fixture(scope="session")
def square32():
    """Unit-square 32x32 mesh with moderate Dirichlet and Stokes bases."""
    mesh = build_rectangle_mesh(32, 32, 1.0, 1.0)
    op = assemble_laplacian(mesh)
    eb = lowest_eigenpairs(op, 24)
    sb = stokes_basis(mesh, 10)
    return mesh, op, eb, sb


@pytest.fixture(scope="session")
def rect32():
    """Nondegenerate rectangle (1.0 x 0.8) for cross-resolution comparisons."""
    mesh = build_rectangle_mesh(32, 32, 1.0, 0.8)
    op = assemble_laplacian(mesh)
    eb = lowest_eigenpairs(op, 24)
    sb = stokes_basis(mesh, 10)
    return mesh, op, eb, sb


@pytest.fixture(scope="session")
def annulus24():
    """Annulus [1, 2] mesh with bases."""
    mesh = build_annulus_mesh(24, 32, 1.0, 2.0)
    op = assemble_laplacian(mesh)
    eb = lowest_eigenpairs(op, 20)
    sb = stokes_basis(mesh, 8)
    return mesh, op, eb, sb


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {status}")
