"""Truncated Fourier parameterization of induced-current images.

Currents are represented by the four m_f x m_f corner blocks of their 2-D
DFT plane (the lowest spatial frequencies, positive and negative). The DFT
convention is forward-unnormalized / inverse-scaled-by-1/(M1*M2), which
makes truncate(expand(alpha)) the exact identity and keeps coefficient
magnitudes grid-size-stable.

Block order is fixed (network weights are ordering-sensitive): top-left,
top-right, bottom-left, bottom-right in DFT index space, row-major inside
each block.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft


@dataclass(frozen=True)
class SpectralBasis:
    m1: int
    m2: int
    m_f: int
    rows: np.ndarray = field(init=False)
    cols: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.m_f < 1 or 2 * self.m_f > min(self.m1, self.m2):
            raise ValueError("corner blocks must not overlap: need 2*m_f <= min(m1, m2)")
        f = self.m_f
        lo_r = np.arange(f)
        hi_r = np.arange(self.m1 - f, self.m1)
        lo_c = np.arange(f)
        hi_c = np.arange(self.m2 - f, self.m2)
        rows, cols = [], []
        for rblk in (lo_r, hi_r):
            for cblk in (lo_c, hi_c):
                rr, cc = np.meshgrid(rblk, cblk, indexing="ij")
                rows.append(rr.ravel())
                cols.append(cc.ravel())
        object.__setattr__(self, "rows", np.concatenate(rows))
        object.__setattr__(self, "cols", np.concatenate(cols))

    @property
    def m0(self) -> int:
        """Coefficient count 4*m_f**2."""
        return 4 * self.m_f * self.m_f

    @property
    def n_cells(self) -> int:
        return self.m1 * self.m2


def truncate(basis: SpectralBasis, j_view: np.ndarray) -> np.ndarray:
    """Corner-block DFT coefficients of one or more current images.

    Accepts (..., m1, m2); returns (..., m0). Forward DFT is unnormalized.
    """
    j_view = np.asarray(j_view)
    if j_view.shape[-2:] != (basis.m1, basis.m2):
        raise ValueError(f"expected trailing dims ({basis.m1}, {basis.m2})")
    spec = sfft.fft2(j_view, axes=(-2, -1))
    return spec[..., basis.rows, basis.cols]


def expand(basis: SpectralBasis, alpha: np.ndarray) -> np.ndarray:
    """Current image(s) whose DFT is alpha on the corner blocks, zero elsewhere.

    Accepts (..., m0); returns (..., m1, m2). Inverse DFT carries the
    1/(M1*M2) factor, so truncate(expand(alpha)) == alpha.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    if alpha.shape[-1] != basis.m0:
        raise ValueError(f"expected trailing dim {basis.m0}")
    spec = np.zeros(alpha.shape[:-1] + (basis.m1, basis.m2), dtype=np.complex128)
    spec[..., basis.rows, basis.cols] = alpha
    return sfft.ifft2(spec, axes=(-2, -1))


def truncate_adjoint_scale(basis: SpectralBasis) -> float:
    """Constant c with <expand(alpha), x> = c * <alpha, truncate(x)>.

    Under the fixed convention c = 1/(m1*m2); gradient code relies on it.
    """
    return 1.0 / (basis.m1 * basis.m2)
