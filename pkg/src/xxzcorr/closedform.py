"""Analytic correlation formulas for the XXZ+DM chain.

Thermal results are expressed through the four Boltzmann weights of the
spectrum, shifted by their largest exponent. Every quantity below is a
ratio that is homogeneous in these weights, so the shift cancels and
temperatures far below the level spacings do not overflow.

Each function takes ``variant``:

``"printed"``
    the expressions in their original form, typos included;
``"corrected"``
    the same expressions with the typographical slips repaired so that
    they agree with a direct evaluation on the density matrix.

The repaired terms are: the concurrence offset ``2 e^{-Jz/2T}`` (printed
without the factor 2), the conditional-state Bloch length ``delta``
(printed twice too large), the numerator of ``nu_2`` (printed with
``Jz+B`` instead of ``Jz-B``); for the psi1 dynamics, ``cos^2(2 mu t)`` in
the concurrence (printed ``cos``), ``1 + cos(4 mu t)`` in the geometric
discord (printed ``1 + cos^2``) and ``e^{4 mu^2 gamma t}`` inside
``alpha_{3,4}`` (printed ``e^{2 mu^2 gamma t}``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .measures import CorrelationSet
from .model import SpinParams

LN2 = math.log(2.0)
LN4 = math.log(4.0)
VARIANTS = ("printed", "corrected")
THERMAL_DEFAULT = "corrected"
PSI1_DEFAULT = "printed"

FLAG_C1_RADICAND = "C1-negative-radicand"


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _check_T(T: float) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"temperature must be positive and finite, got {T}")


def _shannon_bits(ps) -> float:
    return float(np.sum(entr(np.asarray(ps, dtype=float))) / LN2)


def partition_function(p: SpinParams, T: float) -> float:
    """``Z`` in its original closed form (unshifted; overflows for tiny T)."""
    _check_T(T)
    return math.exp(-(2 * p.B + p.Jz) / (2 * T)) * (
        1 + math.exp(2 * p.B / T) + 2 * math.exp((p.B + p.Jz) / T) * math.cosh(p.mu / T)
    )


def log_partition_function(p: SpinParams, T: float) -> float:
    a, shift = _log_weights(p, T)
    return shift + math.log(float(np.sum(np.exp(a - shift))))


def _log_weights(p: SpinParams, T: float):
    # -E/T for |00>, |11>, the lower and the upper singlet-block level
    mu = p.mu
    a = np.array(
        [
            -(p.Jz + 2 * p.B) / (2 * T),
            -(p.Jz - 2 * p.B) / (2 * T),
            (p.Jz / 2 + mu) / T,
            (p.Jz / 2 - mu) / T,
        ]
    )
    return a, float(a.max())


@dataclass(frozen=True)
class _Weights:
    w00: float
    w11: float
    w_lo: float
    w_hi: float
    e_minus: float  # e^{-Jz/2T}, shifted

    @property
    def Z(self) -> float:
        return self.w00 + self.w11 + self.w_lo + self.w_hi

    @property
    def ch(self) -> float:  # e^{Jz/2T} cosh(mu/T)
        return 0.5 * (self.w_lo + self.w_hi)

    @property
    def sh(self) -> float:  # e^{Jz/2T} sinh(mu/T)
        return 0.5 * (self.w_lo - self.w_hi)

    @property
    def cB(self) -> float:  # e^{-Jz/2T} cosh(B/T)
        return 0.5 * (self.w00 + self.w11)

    @property
    def sB(self) -> float:  # e^{-Jz/2T} sinh(B/T)
        return 0.5 * (self.w11 - self.w00)


def _weights(p: SpinParams, T: float) -> _Weights:
    _check_T(T)
    a, shift = _log_weights(p, T)
    w = np.exp(a - shift)
    return _Weights(*map(float, w), math.exp(-p.Jz / (2 * T) - shift))


@dataclass(frozen=True)
class ThermalIntermediates:
    """Helper quantities of the thermal discord formulas, for inspection."""

    Z: float  # shifted partition function (true Z = Z * exp(shift))
    log_Z: float
    lambda_pm: tuple[float, float]
    eta: tuple[float, float, float, float]
    delta: float
    Lambda1: float
    Lambda2: float
    xi_pm: tuple[float, float]
    zeta_pm: tuple[float, float]
    omega: float
    nu: tuple[float, float]
    S_A: float
    S_AB: float
    branch: str  # "Lambda1" or "Lambda2", whichever is smaller
    Omega: float = math.nan
    Gamma1: float = math.nan
    Gamma2: float = math.nan


def thermal_concurrence(p: SpinParams, T: float, variant: str = THERMAL_DEFAULT) -> float:
    _check_variant(variant)
    w = _weights(p, T)
    offset = 2 * w.e_minus if variant == "corrected" else w.e_minus
    return max((2 * w.sh - offset) / w.Z, 0.0)


def thermal_intermediates(p: SpinParams, T: float, variant: str = THERMAL_DEFAULT) -> ThermalIntermediates:
    _check_variant(variant)
    w = _weights(p, T)
    Z = w.Z
    lam_p = (w.w00 + w.ch) / Z
    lam_m = (w.w11 + w.ch) / Z
    eta = (w.w00 / Z, w.w11 / Z, w.w_lo / Z, w.w_hi / Z)
    s_a = _shannon_bits([lam_m, lam_p])
    s_ab = _shannon_bits(eta)

    delta = 2 * math.hypot(w.sB, w.sh) / Z
    if variant == "printed":
        delta *= 2
    lam1 = (LN4 + entr_nat(1 - delta) + entr_nat(1 + delta)) / LN4

    omega = w.ch / Z
    nu1 = abs(w.ch - w.w00) / (w.ch + w.w00)
    if variant == "corrected":
        nu2 = abs(w.ch - w.w11) / (w.ch + w.w11)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            nu2 = float(np.float64(abs(w.ch - w.w00)) * w.w11 / (np.float64(w.w00) * (w.w11 + w.ch)))
    xi = _pair(nu1)
    zeta = _pair(nu2)
    lam2 = (eta[0] + omega) * (xi[0] + xi[1]) + (eta[1] + omega) * (zeta[0] + zeta[1])

    gamma1 = 4 * ((w.cB - w.ch) ** 2 + w.sB**2) / Z**2
    gamma2 = 4 * w.sh**2 / Z**2
    omega_g = (
        w.w00**2
        + w.w11**2
        - (w.w00 + w.w11) * (w.w_lo + w.w_hi)
        + 1.5 * (w.w_lo**2 + w.w_hi**2)
        - w.w_lo * w.w_hi
    ) / Z**2

    if math.isnan(lam1) or math.isnan(lam2):
        branch = "undefined"
    else:
        branch = "Lambda1" if lam1 <= lam2 else "Lambda2"
    return ThermalIntermediates(
        Z=Z,
        log_Z=log_partition_function(p, T),
        lambda_pm=(lam_p, lam_m),
        eta=eta,
        delta=delta,
        Lambda1=lam1,
        Lambda2=lam2,
        xi_pm=xi,
        zeta_pm=zeta,
        omega=omega,
        nu=(nu1, nu2),
        S_A=s_a,
        S_AB=s_ab,
        branch=branch,
        Omega=omega_g,
        Gamma1=gamma1,
        Gamma2=gamma2,
    )


def entr_nat(x: float) -> float:
    """``-x ln x`` with ``0 ln 0 = 0``; NaN for negative ``x``."""
    if x < 0:
        return math.nan
    return float(entr(x))


def _pair(nu: float) -> tuple[float, float]:
    # (xi_+, xi_-) = -(1 +- nu)/ln4 * ln((1 +- nu)/2)
    if not math.isfinite(nu):
        return (math.nan, math.nan)
    out = []
    for s in (1, -1):
        x = 0.5 * (1 + s * nu)
        out.append(math.nan if x < 0 else float(entr(x)) / LN2)
    return tuple(out)


def thermal_cc_qd(
    p: SpinParams, T: float, variant: str = THERMAL_DEFAULT
) -> tuple[float, float, ThermalIntermediates]:
    """Classical correlation and quantum discord of the thermal state.

    Returns ``(CC, QD, intermediates)``. Under ``variant="printed"`` the
    result is NaN wherever the original helpers leave their domain.
    """
    it = thermal_intermediates(p, T, variant)
    s_min = float(np.minimum(it.Lambda1, it.Lambda2))
    cc = it.S_A - s_min
    qd = it.S_A - it.S_AB + s_min  # S(rho_B) == S(rho_A) for this model
    if math.isfinite(cc):
        cc, qd = max(cc, 0.0), max(qd, 0.0)
    return cc, qd, it


def thermal_gmd(p: SpinParams, T: float, variant: str = THERMAL_DEFAULT) -> float:
    """Rescaled geometric discord ``Omega - max(Gamma1, Gamma2)/2`` (identical in both variants)."""
    it = thermal_intermediates(p, T, variant)
    return max(it.Omega - 0.5 * max(it.Gamma1, it.Gamma2), 0.0)


def thermal_correlations(p: SpinParams, T: float, variant: str = THERMAL_DEFAULT) -> CorrelationSet:
    cc, qd, it = thermal_cc_qd(p, T, variant)
    return CorrelationSet(
        C=thermal_concurrence(p, T, variant),
        CC=cc,
        QD=qd,
        GMD2=max(it.Omega - 0.5 * max(it.Gamma1, it.Gamma2), 0.0),
    )


@dataclass(frozen=True)
class DynIntermediates:
    alpha: tuple[float, float, float, float] | None = None
    beta: tuple[float, float] | None = None


def _check_dyn(gamma: float, t: float) -> None:
    if not (gamma >= 0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma}")
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"t must be finite and >= 0, got {t}")


def psi1_alphas(p: SpinParams, gamma: float, t: float, variant: str = PSI1_DEFAULT) -> DynIntermediates:
    _check_variant(variant)
    _check_dyn(gamma, t)
    mu = p.mu
    if mu == 0:
        raise ValueError("psi1 closed forms need mu = sqrt(J^2 + D^2) > 0; use milburn_evolve with measures")
    x = mu**2 * gamma * t
    damp = math.exp(-2 * x)
    a1 = 0.5 * (1 + p.D * damp * math.sin(2 * mu * t) / mu)
    # printed: sqrt(D^2 + J^2 e^{2x}); e^{4x} is what the evolved state gives
    grow = 4 * x if variant == "corrected" else 2 * x
    # damp * sqrt(D^2 + J^2 e^{grow}) evaluated without overflow
    r = math.sqrt(p.D**2 * damp**2 + p.J**2 * math.exp(grow - 4 * x)) / mu
    a3 = 0.5 * (1 + r)
    return DynIntermediates(alpha=(a1, 1 - a1, a3, 1 - a3))


def dynamics_psi1(p: SpinParams, gamma: float, t: float, variant: str = PSI1_DEFAULT) -> CorrelationSet:
    """Correlations at time ``t`` for the initial state (|01> + |10>)/sqrt2.

    Components are clamped to [0, 1]. With ``variant="printed"`` a negative
    radicand in the concurrence is clamped to zero and reported in
    ``flags``.
    """
    alpha = psi1_alphas(p, gamma, t, variant).alpha
    mu = p.mu
    g2 = math.exp(-4 * mu**2 * gamma * t)
    flags = []
    if variant == "corrected":
        rad = p.J**2 + p.D**2 * g2 * math.cos(2 * mu * t) ** 2
        gmd_bracket = 2 * p.J**2 + p.D**2 * g2 * (1 + math.cos(4 * mu * t))
    else:
        rad = p.J**2 + p.D**2 * g2 * math.cos(2 * mu * t)
        gmd_bracket = 2 * p.J**2 + p.D**2 * g2 * (1 + math.cos(4 * mu * t) ** 2)
    if rad < 0:
        flags.append(FLAG_C1_RADICAND)
        rad = 0.0
    s_a = _shannon_bits(alpha[:2])
    s_ab = _shannon_bits(alpha[2:])
    clip = lambda v: min(max(v, 0.0), 1.0)  # noqa: E731
    return CorrelationSet(
        C=clip(math.sqrt(rad) / mu),
        CC=clip(s_a),
        QD=clip(s_a - s_ab),
        GMD2=clip(gmd_bracket / (2 * mu**2)),
        flags=tuple(flags),
    )


def psi2_betas(p: SpinParams, gamma: float, t: float) -> DynIntermediates:
    _check_dyn(gamma, t)
    c = math.exp(-2 * p.B**2 * gamma * t)
    return DynIntermediates(beta=(0.5 * (1 + c), 0.5 * (1 - c)))


def dynamics_psi2(p: SpinParams, gamma: float, t: float, variant: str = PSI1_DEFAULT) -> CorrelationSet:
    """Correlations at time ``t`` for the initial state (|00> + |11>)/sqrt2.

    ``variant`` is accepted for symmetry with :func:`dynamics_psi1`; the
    original expressions need no repair.
    """
    _check_variant(variant)
    beta = psi2_betas(p, gamma, t).beta
    x = p.B**2 * gamma * t
    return CorrelationSet(
        C=math.exp(-2 * x),
        CC=1.0,
        QD=max(1.0 - _shannon_bits(beta), 0.0),
        GMD2=math.exp(-4 * x),
    )


def dynamics(which: str, p: SpinParams, gamma: float, t: float, variant: str = PSI1_DEFAULT) -> CorrelationSet:
    key = which.lower()
    if key == "psi1":
        return dynamics_psi1(p, gamma, t, variant)
    if key == "psi2":
        return dynamics_psi2(p, gamma, t, variant)
    raise ValueError(f"closed forms exist only for psi1 and psi2, got {which!r}")
