"""Small dense linear algebra for two-qubit problems.

Everything here works on plain ``numpy`` arrays of shape ``(2, 2)`` or
``(4, 4)``. Two-qubit operators use the computational basis ordering
``|00>, |01>, |10>, |11>`` with the first factor as subsystem A.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)

HERMITIAN_TOL = 1e-10


class HermitianEigensystem(NamedTuple):
    """Eigenvalues in ascending order and matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _square(a, name="matrix", dims=(2, 4)) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise ValueError(f"{name} must be square with dimension in {dims}, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 operators."""
    a = _square(a, "a", dims=(2,))
    b = _square(b, "b", dims=(2,))
    return np.kron(a, b)


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    return bool(np.max(np.abs(a - dagger(a))) <= tol * scale)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced state of a two-qubit operator.

    Parameters
    ----------
    rho : array_like, shape (4, 4)
        Two-qubit operator.
    keep : {"A", "B"}
        Subsystem to keep; the other one is traced out.
    """
    rho = _square(rho, "rho", dims=(4,))
    t = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEigensystem:
    """Eigendecomposition of a 2x2 or 4x4 Hermitian matrix.

    The input is symmetrized as (A + A^dagger)/2 before solving. Inputs that
    are further than ``tol`` (relative to their largest entry) from Hermitian
    are rejected.

    Raises
    ------
    ValueError
        If the input is not square of size 2 or 4, or not Hermitian.
    numpy.linalg.LinAlgError
        If the LAPACK driver fails to converge.
    """
    a = _square(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (a + dagger(a))
    w, v = np.linalg.eigh(h)
    return HermitianEigensystem(w, v)


def func_of_hermitian(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral function ``V f(diag(w)) V^dagger`` of a Hermitian matrix.

    ``f`` is applied to the real eigenvalue array and must return finite real
    values; ``np.log`` of a non-positive eigenvalue, say, is an error.
    """
    w, v = hermitian_eig(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape or np.iscomplexobj(fw) or not np.all(np.isfinite(fw)):
        raise ValueError("f is undefined on the spectrum of the matrix")
    out = (v * fw) @ dagger(v)
    return 0.5 * (out + dagger(out))


def validate_density_matrix(rho, tol: float = 1e-10, renormalize: bool = False) -> np.ndarray:
    """Check that ``rho`` is a valid 2x2 or 4x4 density matrix and return it.

    With ``renormalize=True`` a trace within ``tol`` of one is rescaled to one
    exactly and the Hermitian part is taken; otherwise the input is returned
    as a complex array unchanged.
    """
    rho = _square(rho, "density matrix")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix contains non-finite entries")
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValueError(f"density matrix trace is {tr.real:.6g}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if w[0] < -max(tol, 1e-10):
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3g}")
    if renormalize:
        rho = 0.5 * (rho + dagger(rho))
        rho = rho / np.trace(rho).real
    return rho


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
