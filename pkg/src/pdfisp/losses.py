"""Composite physics loss over spectral current coefficients.

The scalar objective is

    total = state + data + lambda1*bound + lambda2*tv + lambda3*bridge

where `state` penalizes the contraction-form state-equation residual,
`data` the measurement residual, `bound` negative real contrast, `tv` the
(smoothed) total variation of the contrast, and `bridge` high-amplitude
flat regions that spuriously connect nearby scatterers. State and data
terms are normalized by the total incident / measured power over all views
jointly, so view weighting is uniform and global field scaling cancels.

`pipeline_forward` evaluates everything once and keeps the intermediates
the hand-derived reverse pass needs; the per-term functions expose the same
formulas standalone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit as _sigmoid

from .cie import ContrastRecovery, chi_to_r, pixel_least_squares
from .forward import GreensOperators, ScatteredData, apply_gd
from .spectral import SpectralBasis, expand

EPS_TV = 1e-12  # smoothing inside the TV square root


class ZeroDataError(ValueError):
    """Raised when a normalizer (measured or incident power) is zero."""


@dataclass(frozen=True)
class LossBreakdown:
    """One evaluation of the composite loss; bound/tv/bridge are pre-weighting."""

    total: float
    state: float
    data: float
    bound: float
    tv: float
    bridge: float
    weights: tuple[float, float, float]

    def as_row(self) -> tuple[float, ...]:
        return (self.state, self.data, self.bound, self.tv, self.bridge, self.total)


@dataclass
class LossContext:
    """Everything a loss evaluation needs besides the coefficients."""

    data: ScatteredData
    e_inc: np.ndarray          # (n_views, m1, m2)
    ops: GreensOperators
    basis: SpectralBasis
    beta: float
    lambdas: tuple[float, float, float]
    tau_b: float
    r_fixed: np.ndarray | None = None   # freeze the modified contrast here
    c_sca: float = 0.0
    c_inc: float = 0.0

    def __post_init__(self):
        mat = self.data.matrix
        if self.data.mask is not None:
            mat = mat * self.data.mask
        self.c_sca = float(np.vdot(mat, mat).real)
        self.c_inc = float(np.vdot(self.e_inc, self.e_inc).real)
        if self.c_sca <= 0:
            raise ZeroDataError("measured scattered power is zero")
        if self.c_inc <= 0:
            raise ZeroDataError("incident power is zero")

    @property
    def n_views(self) -> int:
        return self.e_inc.shape[0]


# ----------------------------------------------------------------------
# Individual terms


def loss_data(alpha: np.ndarray, data: ScatteredData, ops: GreensOperators,
              basis: SpectralBasis, normalizer: float | None = None) -> float:
    """Measurement misfit ||G_S J - E_sca||^2 / ||E_sca||^2, summed over views."""
    alpha = np.atleast_2d(alpha)
    j = expand(basis, alpha).reshape(alpha.shape[0], -1)
    res = j @ ops.gs_matrix.T - data.matrix
    if data.mask is not None:
        res = res * data.mask
    mat = data.matrix if data.mask is None else data.matrix * data.mask
    c = float(np.vdot(mat, mat).real) if normalizer is None else normalizer
    if c <= 0:
        raise ZeroDataError("measured scattered power is zero")
    return float(np.vdot(res, res).real / c)


def loss_state(alpha: np.ndarray, r_hat: np.ndarray, e_inc: np.ndarray,
               ops: GreensOperators, basis: SpectralBasis, beta: float,
               normalizer: float | None = None) -> float:
    """Contraction-form state residual power over incident power."""
    from .cie import cie_state_residual

    res = cie_state_residual(alpha, r_hat, e_inc, ops, basis, beta)
    c = float(np.vdot(e_inc, e_inc).real) if normalizer is None else normalizer
    if c <= 0:
        raise ZeroDataError("incident power is zero")
    return float(np.vdot(res, res).real / c)


def loss_bound(chi: np.ndarray) -> float:
    """Squared hinge on negative real contrast."""
    neg = np.minimum(chi.real, 0.0)
    return float(np.sum(neg * neg))


def loss_tv(chi: np.ndarray, eps_tv: float = EPS_TV) -> float:
    """Smoothed isotropic total variation, forward differences.

    The last row/column differences are zero (replicate boundary); complex
    images contribute |dx|^2 + |dy|^2.
    """
    dx, dy = _forward_diffs(chi)
    s = np.sqrt(np.abs(dx) ** 2 + np.abs(dy) ** 2 + eps_tv)
    return float(s.sum())


def loss_bridge(chi: np.ndarray, tau_b: float) -> float:
    """Penalty on bright flat regions: sigmoid((|chi|-tau_b)/tau_b) * exp(-|grad|chi||^2)."""
    a = np.abs(chi)
    gx, gy = _forward_diffs(a)
    return float(np.sum(_sigmoid((a - tau_b) / tau_b) * np.exp(-(gx * gx + gy * gy))))


def _forward_diffs(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dx = np.zeros_like(img)
    dy = np.zeros_like(img)
    dx[:, :-1] = img[:, 1:] - img[:, :-1]
    dy[:-1, :] = img[1:, :] - img[:-1, :]
    return dx, dy


# ----------------------------------------------------------------------
# Regularizer gradients with respect to the contrast image
# (convention: g = dL/dRe + i*dL/dIm, unweighted)


def bound_chi_grad(chi: np.ndarray) -> np.ndarray:
    return (2.0 * np.minimum(chi.real, 0.0)).astype(np.complex128)


def tv_chi_grad(chi: np.ndarray, eps_tv: float = EPS_TV) -> np.ndarray:
    dx, dy = _forward_diffs(chi)
    s = np.sqrt(np.abs(dx) ** 2 + np.abs(dy) ** 2 + eps_tv)
    wx, wy = dx / s, dy / s
    g = np.zeros_like(chi)
    g[:, 1:] += wx[:, :-1]
    g[:, :-1] -= wx[:, :-1]
    g[1:, :] += wy[:-1, :]
    g[:-1, :] -= wy[:-1, :]
    return g


def bridge_chi_grad(chi: np.ndarray, tau_b: float) -> np.ndarray:
    a = np.abs(chi)
    gx, gy = _forward_diffs(a)
    sig = _sigmoid((a - tau_b) / tau_b)
    damp = np.exp(-(gx * gx + gy * gy))
    ga = sig * (1.0 - sig) / tau_b * damp
    cx = sig * damp * (-2.0 * gx)
    cy = sig * damp * (-2.0 * gy)
    ga[:, 1:] += cx[:, :-1]
    ga[:, :-1] -= cx[:, :-1]
    ga[1:, :] += cy[:-1, :]
    ga[:-1, :] -= cy[:-1, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(a > 0, chi / np.where(a > 0, a, 1.0), 0.0)
    return ga * phase


def regularizer_chi_grad(chi: np.ndarray, lambdas: tuple[float, float, float],
                         tau_b: float) -> np.ndarray:
    l1, l2, l3 = lambdas
    g = np.zeros_like(chi)
    if l1:
        g += l1 * bound_chi_grad(chi)
    if l2:
        g += l2 * tv_chi_grad(chi)
    if l3:
        g += l3 * bridge_chi_grad(chi, tau_b)
    return g


# ----------------------------------------------------------------------
# Shared forward pipeline


@dataclass
class PipelineState:
    """Intermediates of one composite-loss evaluation at coefficients alpha_hat."""

    alpha_hat: np.ndarray      # (n, m0)
    rec: ContrastRecovery
    r_hat: np.ndarray          # (m1, m2)
    p_views: np.ndarray        # (n, m1, m2) E + beta*J
    state_res: np.ndarray      # (n, m1, m2)
    data_res: np.ndarray       # (n, n_rx), masked
    breakdown: LossBreakdown


def pipeline_forward(alpha_hat: np.ndarray, ctx: LossContext) -> PipelineState:
    """Evaluate the composite loss, keeping what the reverse pass reuses."""
    alpha_hat = np.atleast_2d(np.asarray(alpha_hat, dtype=np.complex128))
    n = alpha_hat.shape[0]
    j = expand(ctx.basis, alpha_hat)
    e = ctx.e_inc + apply_gd(ctx.ops, j)
    rec = pixel_least_squares(j, e)
    chi = rec.chi
    r_hat = ctx.r_fixed if ctx.r_fixed is not None else chi_to_r(chi, ctx.beta)

    p = e + ctx.beta * j
    sres = r_hat * p - ctx.beta * j
    l_state = float(np.vdot(sres, sres).real / ctx.c_inc)

    dres = j.reshape(n, -1) @ ctx.ops.gs_matrix.T - ctx.data.matrix
    if ctx.data.mask is not None:
        dres = dres * ctx.data.mask
    l_data = float(np.vdot(dres, dres).real / ctx.c_sca)

    l_bound = loss_bound(chi)
    l_tv = loss_tv(chi)
    l_bridge = loss_bridge(chi, ctx.tau_b)
    l1, l2, l3 = ctx.lambdas
    total = l_state + l_data + l1 * l_bound + l2 * l_tv + l3 * l_bridge
    if not np.isfinite(total):
        parts = {"state": l_state, "data": l_data, "bound": l_bound, "tv": l_tv,
                 "bridge": l_bridge}
        bad = [k for k, v in parts.items() if not np.isfinite(v)]
        raise FloatingPointError(f"nonfinite loss term(s): {bad}")
    bd = LossBreakdown(total=total, state=l_state, data=l_data, bound=l_bound,
                       tv=l_tv, bridge=l_bridge, weights=ctx.lambdas)
    return PipelineState(alpha_hat=alpha_hat, rec=rec, r_hat=r_hat, p_views=p,
                         state_res=sres, data_res=dres, breakdown=bd)


def loss_total(alpha: np.ndarray, ctx: LossContext) -> LossBreakdown:
    """Composite loss at coefficients alpha (no network in the path)."""
    return pipeline_forward(alpha, ctx).breakdown


# ----------------------------------------------------------------------
# Reverse pass
#
# Gradients of complex quantities use the convention
# g(u) = dL/dRe{u} + i*dL/dIm{u}; for a product v = w*u the contribution is
# g(u) += conj(w)*g(v), for a linear operator v = A u it is g(u) += A^H g(v),
# and for the squared norm L = ||u||^2/c it starts as g(u) = 2u/c. The
# regularizer eps_reg inside the per-pixel least squares is treated as a
# constant (its drift with the fields is ~1e-10 relative, far below the
# finite-difference gate).


def pipeline_backward(state: PipelineState, ctx: LossContext) -> np.ndarray:
    """Gradient of the composite loss with respect to alpha_hat, shape (n, m0)."""
    from .forward import apply_gd_adjoint, apply_gs_adjoint
    from .spectral import truncate

    beta = ctx.beta
    j = state.rec.j_views
    e = state.rec.e_views
    chi = state.rec.chi
    den = state.rec.denominator

    # state term: res = R*P - beta*J with P = E + beta*J
    g_sres = (2.0 / ctx.c_inc) * state.state_res
    g_p = np.conj(state.r_hat) * g_sres
    g_j = beta * g_p - beta * g_sres
    g_e = g_p

    # data term: res rows = G_S j - d (masked)
    g_rows = (2.0 / ctx.c_sca) * state.data_res
    if ctx.data.mask is not None:
        g_rows = g_rows * ctx.data.mask
    g_j = g_j + apply_gs_adjoint(ctx.ops, g_rows)

    # contrast chain: regularizers plus (unless frozen) the modified-contrast map
    g_chi = regularizer_chi_grad(chi, ctx.lambdas, ctx.tau_b)
    if ctx.r_fixed is None:
        g_r = np.einsum("nij,nij->ij", np.conj(state.p_views), g_sres)
        g_chi = g_chi + np.conj(beta / (beta * chi + 1.0) ** 2) * g_r

    # chi = num/den with num = sum_i J_i conj(E_i), den real
    g_num = g_chi / den
    g_den = -(np.conj(g_chi) * chi).real / den
    g_j = g_j + e * g_num
    g_e = g_e + np.conj(g_num) * j + 2.0 * g_den * e

    # E = E_inc + G_D J
    g_j = g_j + apply_gd_adjoint(ctx.ops, g_e)

    # J = expand(alpha): adjoint of expand is truncate/(m1*m2)
    return truncate(ctx.basis, g_j) / (ctx.basis.m1 * ctx.basis.m2)


def grad_alpha(alpha: np.ndarray, ctx: LossContext) -> tuple[np.ndarray, LossBreakdown]:
    """Loss and its gradient with respect to the coefficients themselves."""
    st = pipeline_forward(alpha, ctx)
    return pipeline_backward(st, ctx), st.breakdown
