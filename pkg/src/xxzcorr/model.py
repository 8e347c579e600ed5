"""Two-qubit XXZ chain with Dzyaloshinskii-Moriya coupling.

Natural units are used throughout (k = hbar = 1), so every parameter is a
plain float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import (
    I2,
    SX,
    SY,
    SZ,
    HermitianEigensystem,
    dagger,
    kron,
    projector,
    validate_density_matrix,
)

# relative gap below which two levels count as degenerate for the ground state
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class SpinParams:
    """Couplings of the chain: exchange ``J``, anisotropy ``Jz``, field ``B``, DM ``D``."""

    J: float = 0.0
    Jz: float = 0.0
    B: float = 0.0
    D: float = 0.0

    @property
    def mu(self) -> float:
        return math.hypot(self.J, self.D)

    def replace(self, **changes) -> "SpinParams":
        vals = {"J": self.J, "Jz": self.Jz, "B": self.B, "D": self.D}
        unknown = set(changes) - set(vals)
        if unknown:
            raise ValueError(f"unknown spin parameter(s): {sorted(unknown)}")
        vals.update({k: float(v) for k, v in changes.items()})
        return SpinParams(**vals)


def build_hamiltonian(p: SpinParams) -> np.ndarray:
    """Hamiltonian matrix, assembled from Pauli products.

    Diagonal ``((Jz+2B)/2, -Jz/2, -Jz/2, (Jz-2B)/2)``, with ``<10|H|01> = J + iD``
    and ``<01|H|10> = J - iD``.

    Notes
    -----
    This element convention is the transpose of ``D(XY - YX)`` with the
    first factor on qubit A, so the DM term is written as ``D(YX - XY)``.
    Transposing H conjugates every thermal and evolved state, which leaves
    all four correlation measures unchanged.
    """
    h = 0.5 * (
        p.J * (kron(SX, SX) + kron(SY, SY))
        + p.Jz * kron(SZ, SZ)
        + p.B * (kron(SZ, I2) + kron(I2, SZ))
        + p.D * (kron(SY, SX) - kron(SX, SY))
    )
    # Pauli products are exact in floating point; force exact Hermiticity anyway
    return 0.5 * (h + dagger(h))


def analytic_eigensystem(p: SpinParams) -> HermitianEigensystem:
    """Closed-form spectrum of :func:`build_hamiltonian`, ascending.

    Levels are ``(Jz+2B)/2`` on |00>, ``(Jz-2B)/2`` on |11> and
    ``-Jz/2 +- mu`` on ``(|01> +- e^{i chi}|10>)/sqrt(2)`` with
    ``e^{i chi} = (J + iD)/mu``. For ``mu == 0`` the degenerate block uses
    |01>, |10> directly.
    """
    mu = p.mu
    vecs = np.zeros((4, 4), dtype=complex)
    vals = np.array(
        [(p.Jz + 2 * p.B) / 2, (p.Jz - 2 * p.B) / 2, -p.Jz / 2 + mu, -p.Jz / 2 - mu]
    )
    vecs[0, 0] = 1.0
    vecs[3, 1] = 1.0
    if mu > 0:
        phase = complex(p.J / mu, p.D / mu)
        phase /= abs(phase)  # exact unit modulus even for subnormal couplings
        s = 1 / math.sqrt(2)
        vecs[1, 2], vecs[2, 2] = s, s * phase
        vecs[1, 3], vecs[2, 3] = s, -s * phase
    else:
        vecs[1, 2] = 1.0
        vecs[2, 3] = 1.0
    order = np.argsort(vals, kind="stable")
    return HermitianEigensystem(vals[order], vecs[:, order])


def gibbs_state(p: SpinParams, T: float) -> np.ndarray:
    """Thermal state ``exp(-H/T)/Z``.

    The Boltzmann weights are shifted by the largest exponent before
    exponentiation, so very low temperatures do not overflow.
    """
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"temperature must be positive and finite, got {T}")
    w, v = analytic_eigensystem(p)
    a = -w / T
    weights = np.exp(a - a.max())
    weights /= weights.sum()
    rho = (v * weights) @ dagger(v)
    return 0.5 * (rho + dagger(rho))


def ground_state(p: SpinParams) -> np.ndarray:
    """Zero-temperature limit: equal mixture over the lowest eigenspace."""
    w, v = analytic_eigensystem(p)
    scale = max(1.0, float(np.max(np.abs(w))))
    low = np.abs(w - w[0]) <= DEGENERACY_TOL * scale
    vs = v[:, low]
    rho = vs @ dagger(vs) / low.sum()
    return 0.5 * (rho + dagger(rho))


def milburn_evolve(p: SpinParams, gamma: float, t: float, initial) -> np.ndarray:
    """Evolve ``initial`` under intrinsic decoherence for time ``t``.

    In the energy eigenbasis the coherence between levels m and n is
    multiplied by ``exp(-gamma*t*(E_m-E_n)**2/2 - i*(E_m-E_n)*t)``;
    populations are untouched. With ``gamma == 0`` this is plain unitary
    evolution.
    """
    if gamma < 0 or not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma}")
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    rho0 = validate_density_matrix(initial)
    if t == 0:
        return rho0.copy()
    w, v = analytic_eigensystem(p)
    dE = w[:, None] - w[None, :]
    factor = np.exp(-0.5 * gamma * t * dE**2 - 1j * dE * t)
    in_eig = dagger(v) @ rho0 @ v
    rho = v @ (in_eig * factor) @ dagger(v)
    return 0.5 * (rho + dagger(rho))


def bell_state(which: str) -> np.ndarray:
    """Projector onto ``psi1 = (|01>+|10>)/sqrt2`` or ``psi2 = (|00>+|11>)/sqrt2``."""
    key = which.lower()
    if key == "psi1":
        return projector([0, 1, 1, 0])
    if key == "psi2":
        return projector([1, 0, 0, 1])
    raise ValueError(f"unknown Bell state {which!r}; expected 'psi1' or 'psi2'")
