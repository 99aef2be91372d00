"""Low-frequency spectral basis: truncation, expansion, adjoint scaling."""
import numpy as np
import pytest

import oracles
from pdfisp.spectral import SpectralBasis, expand, truncate, truncate_adjoint_scale


def test_basis_validation():
    SpectralBasis(16, 16, 8)
    with pytest.raises(ValueError):
        SpectralBasis(16, 16, 9)      # corner blocks would overlap
    with pytest.raises(ValueError):
        SpectralBasis(16, 16, 0)


def test_coefficient_count():
    basis = SpectralBasis(16, 12, 3)
    assert basis.m0 == 36
    assert basis.rows.shape == basis.cols.shape == (36,)


def test_truncate_picks_corner_spectrum():
    rng = np.random.default_rng(0)
    basis = SpectralBasis(10, 8, 3)
    img = rng.standard_normal((10, 8)) + 1j * rng.standard_normal((10, 8))
    spec = oracles.dft2_direct(img)
    mask = oracles.corner_mask(10, 8, 3)
    # same multiset of coefficients regardless of internal ordering
    got = np.sort_complex(truncate(basis, img))
    want = np.sort_complex(spec[mask])
    assert np.abs(got - want).max() < 1e-10


def test_expand_then_truncate_round_trip():
    rng = np.random.default_rng(1)
    basis = SpectralBasis(16, 16, 4)
    alpha = rng.standard_normal((5, basis.m0)) + 1j * rng.standard_normal((5, basis.m0))
    back = truncate(basis, expand(basis, alpha))
    assert np.abs(back - alpha).max() < 1e-12


def test_expansion_matches_corner_limited_inverse_dft():
    rng = np.random.default_rng(2)
    basis = SpectralBasis(12, 10, 3)
    img = rng.standard_normal((12, 10)) + 1j * rng.standard_normal((12, 10))
    low = expand(basis, truncate(basis, img))
    spec = oracles.dft2_direct(img)
    spec[~oracles.corner_mask(12, 10, 3)] = 0.0
    assert np.abs(low - oracles.idft2_direct(spec)).max() < 1e-10


def test_projection_idempotent():
    rng = np.random.default_rng(3)
    basis = SpectralBasis(16, 16, 5)
    img = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    once = expand(basis, truncate(basis, img))
    twice = expand(basis, truncate(basis, once))
    assert np.abs(twice - once).max() < 1e-12


def test_adjoint_scale_identity():
    rng = np.random.default_rng(4)
    basis = SpectralBasis(14, 14, 4)
    alpha = rng.standard_normal(basis.m0) + 1j * rng.standard_normal(basis.m0)
    x = rng.standard_normal((14, 14)) + 1j * rng.standard_normal((14, 14))
    lhs = np.vdot(x, expand(basis, alpha))
    rhs = truncate_adjoint_scale(basis) * np.vdot(truncate(basis, x), alpha)
    assert abs(lhs - rhs) / abs(lhs) < 1e-12
    assert truncate_adjoint_scale(basis) == pytest.approx(1.0 / (14 * 14))


def test_shape_errors():
    basis = SpectralBasis(8, 8, 2)
    with pytest.raises(ValueError):
        truncate(basis, np.zeros((8, 9), dtype=complex))
    with pytest.raises(ValueError):
        expand(basis, np.zeros(basis.m0 + 1, dtype=complex))
