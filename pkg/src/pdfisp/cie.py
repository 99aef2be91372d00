"""Contraction-integral-equation algebra.

The state equation is rewritten in terms of the modified contrast
R = beta*chi / (beta*chi + 1), which for physical media (Re{chi} >= 0,
beta > 0) satisfies |R| < 1 everywhere, weakening the nonlinearity at high
contrast. This module holds the chi <-> R mappings, the rewritten state
residual, and the per-pixel least-squares recovery of chi from spectral
current coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forward import GreensOperators, apply_gd
from .spectral import SpectralBasis, expand


class PoleError(ValueError):
    """Raised when a mapping is evaluated at (numerically) its pole."""


def chi_to_r(chi: np.ndarray, beta: complex) -> np.ndarray:
    """Modified contrast R = beta*chi / (beta*chi + 1)."""
    chi = np.asarray(chi, dtype=np.complex128)
    den = beta * chi + 1.0
    if (np.abs(den) < 1e-14).any():
        raise PoleError("beta*chi + 1 vanishes at some pixel")
    return beta * chi / den


def r_to_chi(r: np.ndarray, beta: complex) -> np.ndarray:
    """Inverse mapping chi = R / (beta * (1 - R))."""
    r = np.asarray(r, dtype=np.complex128)
    den = 1.0 - r
    if (np.abs(den) < 1e-14).any():
        raise PoleError("1 - R vanishes at some pixel")
    return r / (beta * den)


def default_eps_reg(e_views: np.ndarray) -> float:
    """Regularizer floor 1e-10 * max_view ||E||^2 / n_cells.

    Keeps the per-pixel least squares finite at field nulls without biasing
    bright pixels.
    """
    m = e_views.shape[-1] * e_views.shape[-2]
    power = np.einsum("nij,nij->n", np.conj(e_views), e_views).real
    return float(1e-10 * power.max() / m)


@dataclass
class ContrastRecovery:
    """recover_contrast with its reusable intermediates."""

    chi: np.ndarray           # (m1, m2)
    j_views: np.ndarray       # (n, m1, m2) currents expand(alpha)
    e_views: np.ndarray       # (n, m1, m2) total fields E_inc + G_D J
    numerator: np.ndarray     # (m1, m2) sum_i J_i conj(E_i)
    denominator: np.ndarray   # (m1, m2) real, sum_i |E_i|^2 + eps_reg
    eps_reg: float
    degenerate: np.ndarray    # (m1, m2) bool, denominator <= 10*eps_reg


def pixel_least_squares(j_views: np.ndarray, e_views: np.ndarray,
                        eps_reg: float | None = None) -> ContrastRecovery:
    """Per-pixel LS contrast from paired current/field views.

    chi[m] = sum_i J_i[m] conj(E_i[m]) / (sum_i |E_i[m]|^2 + eps_reg), the
    least-squares solution of J_i = chi * E_i across views at each pixel.
    """
    if eps_reg is None:
        eps_reg = default_eps_reg(e_views)
    num = np.einsum("nij,nij->ij", j_views, np.conj(e_views))
    den = np.einsum("nij,nij->ij", e_views, np.conj(e_views)).real + eps_reg
    chi = num / den
    return ContrastRecovery(chi=chi, j_views=j_views, e_views=e_views, numerator=num,
                            denominator=den, eps_reg=eps_reg,
                            degenerate=den <= 10.0 * eps_reg)


def recover_contrast(alpha: np.ndarray, e_inc: np.ndarray, ops: GreensOperators,
                     basis: SpectralBasis, eps_reg: float | None = None,
                     full: bool = False):
    """Contrast implied by spectral current coefficients.

    Expands each view's coefficients into a current image, forms the total
    field E_inc + G_D J, and solves the per-pixel least squares across
    views. With full=True returns the ContrastRecovery record (used by the
    loss/gradient pipeline); otherwise just the contrast image.
    """
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.complex128))
    if alpha.shape[0] != e_inc.shape[0]:
        raise ValueError("need one coefficient vector per incidence view")
    j_views = expand(basis, alpha)
    e_views = e_inc + apply_gd(ops, j_views)
    rec = pixel_least_squares(j_views, e_views, eps_reg)
    return rec if full else rec.chi


def cie_state_residual(alpha: np.ndarray, r_hat: np.ndarray, e_inc: np.ndarray,
                       ops: GreensOperators, basis: SpectralBasis,
                       beta: complex) -> np.ndarray:
    """Residual of the contraction-form state equation, per view.

    With J = expand(alpha) and P = E_inc + G_D J + beta*J, the rewritten
    state equation asks R*P = beta*J; the residual R*P - beta*J vanishes
    exactly when J, R are mutually consistent.
    """
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.complex128))
    j_views = expand(basis, alpha)
    p = e_inc + apply_gd(ops, j_views) + beta * j_views
    return r_hat * p - beta * j_views
