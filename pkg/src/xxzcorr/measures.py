"""Correlation measures for arbitrary two-qubit density matrices.

These are generic numerical routines (no model structure is assumed) and
serve as the reference for the closed-form expressions in
:mod:`xxzcorr.closedform`.

Conventions
-----------
Measurements act on subsystem B, and the conditional entropy is taken on
the post-measurement states of A. The projective family is
``B_k = V|k><k|V^dagger`` with

    V = [[cos t,            e^{-i p} sin t],
         [e^{i p} sin t,   -cos t        ]]

so outcome 0 projects B onto the Bloch direction
``(sin 2t cos p, sin 2t sin p, cos 2t)``. Entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .qmat import (
    I2,
    PAULI,
    SY,
    hermitian_eig,
    kron,
    partial_trace,
    validate_density_matrix,
)

LN2 = math.log(2.0)
EIG_CLAMP = 1e-12
MIN_PROBABILITY = 1e-14
GRID_SIZE = 64
REFINE_STARTS = 3
_SYSY = kron(SY, SY)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Rank-one projective measurement on qubit B, labelled by two angles."""

    theta: float
    phi: float

    def unitary(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[c, s / e], [e * s, -c]], dtype=complex)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.unitary()
        return tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(2))

    def direction(self) -> np.ndarray:
        return _directions(np.asarray(self.theta), np.asarray(self.phi))

    def canonical(self) -> "ProjectiveMeasurement":
        """Same measurement with theta in [0, pi/2] and phi in [0, 2pi)."""
        th = math.fmod(self.theta, math.pi)
        ph = self.phi
        if th < 0:
            th, ph = -th, ph + math.pi
        if th > math.pi / 2:
            th, ph = math.pi - th, ph + math.pi
        ph = math.fmod(ph, 2 * math.pi)
        if ph < 0:
            ph += 2 * math.pi
        return ProjectiveMeasurement(th, ph)


@dataclass(frozen=True)
class BlochDecomposition:
    """Local Bloch vectors ``x`` (A), ``y`` (B) and correlation matrix ``T``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def reconstruct(self) -> np.ndarray:
        rho = kron(I2, I2).astype(complex)
        for i in range(3):
            rho = rho + self.x[i] * kron(PAULI[i + 1], I2) + self.y[i] * kron(I2, PAULI[i + 1])
            for j in range(3):
                rho = rho + self.T[i, j] * kron(PAULI[i + 1], PAULI[j + 1])
        return rho / 4


@dataclass(frozen=True)
class CorrelationSet:
    """Concurrence, classical correlation, quantum discord and rescaled geometric discord."""

    C: float
    CC: float
    QD: float
    GMD2: float
    flags: tuple[str, ...] = field(default=(), compare=False)

    QUANTITIES = ("C", "CC", "QD", "GMD2")

    def values(self) -> dict[str, float]:
        return {q: getattr(self, q) for q in self.QUANTITIES}

    def as_dict(self) -> dict:
        return asdict(self)


def _clamp0(v: float) -> float:
    return 0.0 if v < 0 else float(v)


def _directions(theta, phi) -> np.ndarray:
    s2 = np.sin(2 * theta)
    return np.stack(np.broadcast_arrays(s2 * np.cos(phi), s2 * np.sin(phi), np.cos(2 * theta)), axis=-1)


def binary_entropy_bloch(r) -> np.ndarray:
    """Entropy in bits of a qubit whose Bloch vector has length ``r``."""
    r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    return (entr(0.5 * (1 + r)) + entr(0.5 * (1 - r))) / LN2


def entropy(rho) -> float:
    """Von Neumann entropy ``-Tr rho log2 rho`` of a 2x2 or 4x4 state."""
    w = hermitian_eig(rho).eigenvalues
    w = np.where(w < EIG_CLAMP, 0.0, w)
    return _clamp0(float(np.sum(entr(w)) / LN2))


def mutual_information(rho) -> float:
    rho = validate_density_matrix(rho)
    total = entropy(partial_trace(rho, "A")) + entropy(partial_trace(rho, "B")) - entropy(rho)
    return _clamp0(total)


def concurrence(rho) -> float:
    """Wootters concurrence.

    The square roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``
    are taken as the singular values of ``tau = Psi^T (sy x sy) Psi``, where
    the columns of ``Psi`` are the eigenvectors of ``rho`` scaled by the
    square roots of their eigenvalues. Working with singular values keeps
    tiny lambdas accurate; squaring them first would bury them in rounding.
    """
    rho = validate_density_matrix(rho)
    w, v = hermitian_eig(rho)
    psi = v * np.sqrt(np.clip(w, 0.0, None))
    tau = psi.T @ _SYSY @ psi
    lam = np.linalg.svd(tau, compute_uv=False)
    return _clamp0(lam[0] - lam[1] - lam[2] - lam[3])


def concurrence_x(rho, tol: float = 1e-10) -> float:
    """Concurrence of an X-shaped state from its diagonal and anti-diagonal."""
    rho = validate_density_matrix(rho)
    mask = np.ones((4, 4), dtype=bool)
    mask[np.arange(4), np.arange(4)] = False
    mask[np.arange(4), 3 - np.arange(4)] = False
    if np.max(np.abs(rho[mask])) > tol:
        raise ValueError("state is not of X form; use concurrence()")
    d = np.clip(np.real(np.diag(rho)), 0.0, None)
    c1 = 2 * (abs(rho[3, 0]) - math.sqrt(d[2] * d[1]))
    c2 = 2 * (abs(rho[2, 1]) - math.sqrt(d[3] * d[0]))
    return max(c1, c2, 0.0)


def bloch_decompose(rho) -> BlochDecomposition:
    rho = np.asarray(rho, dtype=complex)
    x = np.array([np.trace(rho @ kron(PAULI[i], I2)).real for i in (1, 2, 3)])
    y = np.array([np.trace(rho @ kron(I2, PAULI[i])).real for i in (1, 2, 3)])
    t = np.array(
        [[np.trace(rho @ kron(PAULI[i], PAULI[j])).real for j in (1, 2, 3)] for i in (1, 2, 3)]
    )
    return BlochDecomposition(x, y, t)


def _conditional_entropy_bloch(bd: BlochDecomposition, n: np.ndarray) -> np.ndarray:
    # n: (..., 3) unit directions of outcome 0 on B
    ny = n @ bd.y
    tn = n @ bd.T.T
    out = np.zeros(ny.shape)
    for s in (1.0, -1.0):
        q = 1 + s * ny  # twice the outcome probability
        r_vec = bd.x + s * tn
        r = np.linalg.norm(r_vec, axis=-1)
        ok = q > 2 * MIN_PROBABILITY
        ratio = np.where(ok, r / np.where(ok, q, 1.0), 0.0)
        out = out + np.where(ok, 0.5 * q * binary_entropy_bloch(ratio), 0.0)
    return out


def conditional_entropy(rho, m: ProjectiveMeasurement) -> float:
    """Average entropy of A after measuring ``m`` on B."""
    rho = validate_density_matrix(rho)
    bd = bloch_decompose(rho)
    return _clamp0(float(_conditional_entropy_bloch(bd, m.direction())))


def _grid_then_refine(objective_grid, objective_point, grid: int, starts: int = REFINE_STARTS):
    """Minimize a function of (theta, phi) over the measurement family.

    A ``grid x grid`` scan over theta in [0, pi/2] (endpoints included) and
    phi in [0, 2pi) picks the starting points; each of the best ``starts``
    grid points is refined by Nelder-Mead. Returns ``(value, measurement)``.
    """
    thetas = np.linspace(0.0, math.pi / 2, grid)
    phis = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    vals = objective_grid(tt, pp)
    flat = np.argsort(vals, axis=None, kind="stable")[:starts]
    best_val = float(vals.flat[flat[0]])
    best = (float(tt.flat[flat[0]]), float(pp.flat[flat[0]]))
    step = (thetas[1] - thetas[0], phis[1] - phis[0])
    for idx in flat:
        x0 = np.array([tt.flat[idx], pp.flat[idx]])
        simplex = np.array([x0, x0 + [step[0], 0.0], x0 + [0.0, step[1]]])
        res = minimize(
            lambda v: objective_point(v[0], v[1]),
            x0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
        )
        if res.fun < best_val:
            best_val, best = float(res.fun), (float(res.x[0]), float(res.x[1]))
    return best_val, ProjectiveMeasurement(*best).canonical()


def min_conditional_entropy(rho, grid: int = GRID_SIZE) -> tuple[float, ProjectiveMeasurement]:
    """Smallest conditional entropy over projective measurements on B."""
    rho = validate_density_matrix(rho)
    bd = bloch_decompose(rho)

    def on_grid(tt, pp):
        return _conditional_entropy_bloch(bd, _directions(tt, pp))

    def at(th, ph):
        return float(_conditional_entropy_bloch(bd, _directions(np.asarray(th), np.asarray(ph))))

    val, m = _grid_then_refine(on_grid, at, grid)
    return _clamp0(val), m


def classical_correlation(rho, grid: int = GRID_SIZE) -> tuple[float, ProjectiveMeasurement]:
    """Maximal information about A gained by a projective measurement on B.

    Returns the value and the optimal measurement.
    """
    rho = validate_density_matrix(rho)
    s_min, m = min_conditional_entropy(rho, grid)
    return _clamp0(entropy(partial_trace(rho, "A")) - s_min), m


def discord_paths(rho, grid: int = GRID_SIZE) -> tuple[float, float]:
    """Quantum discord computed two ways from one minimization.

    Returns ``(I - CC, S(rho_B) - S(rho_AB) + S_min)``.
    """
    rho = validate_density_matrix(rho)
    s_min, _ = min_conditional_entropy(rho, grid)
    s_a = entropy(partial_trace(rho, "A"))
    s_b = entropy(partial_trace(rho, "B"))
    s_ab = entropy(rho)
    cc = _clamp0(s_a - s_min)
    return _clamp0(mutual_information(rho) - cc), _clamp0(s_b - s_ab + s_min)


def quantum_discord(rho, grid: int = GRID_SIZE) -> float:
    return discord_paths(rho, grid)[0]


def gmd(rho) -> float:
    """Geometric discord (rescaled by 2) from the Bloch representation, measuring on B."""
    rho = validate_density_matrix(rho)
    bd = bloch_decompose(rho)
    k = np.outer(bd.y, bd.y) + bd.T.T @ bd.T
    k_max = float(np.linalg.eigvalsh(k)[-1])
    return _clamp0(0.5 * (bd.y @ bd.y + np.sum(bd.T**2) - k_max))


def _dephased_distance(rho: np.ndarray, theta, phi) -> np.ndarray:
    """``Tr rho^2 - Tr Pi(rho)^2`` with Pi the dephasing in the measured basis on B.

    For a fixed basis on B the closest classical-quantum state in
    Hilbert-Schmidt distance is the dephased state, and the squared distance
    reduces to this difference of purities.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    v = np.empty(theta.shape + (2, 2), dtype=complex)
    v[..., 0, 0], v[..., 0, 1] = c, s / e
    v[..., 1, 0], v[..., 1, 1] = e * s, -c
    purity = np.real(np.trace(rho @ rho))
    kept = np.zeros(theta.shape)
    for k in range(2):
        b = np.einsum("...i,...j->...ij", v[..., :, k], v[..., :, k].conj())
        p = np.einsum("ac,...bd->...abcd", I2, b).reshape(theta.shape + (4, 4))
        m = p @ rho @ p
        kept = kept + np.sum(np.abs(m) ** 2, axis=(-2, -1))
    return purity - kept


def gmd_bruteforce(rho, grid: int = GRID_SIZE) -> float:
    """Geometric discord (rescaled by 2) by direct minimization over classical-quantum states."""
    rho = validate_density_matrix(rho)
    val, _ = _grid_then_refine(
        lambda tt, pp: _dephased_distance(rho, tt, pp),
        lambda th, ph: float(_dephased_distance(rho, th, ph)),
        grid,
    )
    return _clamp0(2 * val)


def correlation_set(rho, grid: int = GRID_SIZE) -> CorrelationSet:
    rho = validate_density_matrix(rho)
    s_min, _ = min_conditional_entropy(rho, grid)
    s_a = entropy(partial_trace(rho, "A"))
    cc = _clamp0(s_a - s_min)
    return CorrelationSet(
        C=concurrence(rho),
        CC=cc,
        QD=_clamp0(mutual_information(rho) - cc),
        GMD2=gmd(rho),
    )
