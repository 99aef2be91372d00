"""Cylinder-function evaluations against arbitrary-precision references."""
import mpmath
import numpy as np
import pytest

from pdfisp.special import (bessel_j0, bessel_j1, bessel_y0, bessel_y1,
                            hankel1_0, hankel1_1)

mpmath.mp.dps = 30

# sample both evaluation regions densely, hug the region boundary near 8,
# and include very small and fairly large arguments
XS = np.concatenate([
    np.linspace(1e-8, 7.9, 120),
    np.linspace(7.9, 8.1, 40),
    np.linspace(8.1, 60.0, 160),
    np.array([0.0, 1e-300, 8.0, 127.0]),
])


def _ref(fn, xs):
    return np.array([float(fn(x)) for x in xs])


def _close(got, want, tol=1e-10):
    err = np.abs(got - want) / np.maximum(1.0, np.abs(want))
    return float(err.max())


def test_j0_matches_reference():
    want = _ref(lambda x: mpmath.besselj(0, x), XS)
    assert _close(bessel_j0(XS), want) < 1e-10


def test_j1_matches_reference():
    want = _ref(lambda x: mpmath.besselj(1, x), XS)
    assert _close(bessel_j1(XS), want) < 1e-10


def test_y0_matches_reference():
    xs = XS[XS > 0]
    want = _ref(lambda x: mpmath.bessely(0, x), xs)
    assert _close(bessel_y0(xs), want) < 1e-10


def test_y1_matches_reference():
    xs = XS[XS > 0]
    want = _ref(lambda x: mpmath.bessely(1, x), xs)
    assert _close(bessel_y1(xs), want) < 1e-10


def test_negative_argument_continuations():
    xs = np.linspace(0.1, 20.0, 50)
    assert np.allclose(bessel_j0(-xs), bessel_j0(xs), rtol=0, atol=1e-14)
    assert np.allclose(bessel_j1(-xs), -bessel_j1(xs), rtol=0, atol=1e-14)


@pytest.mark.parametrize("fn", [bessel_y0, bessel_y1, hankel1_0, hankel1_1])
def test_singular_family_rejects_negative(fn):
    with pytest.raises(ValueError):
        fn(np.array([1.0, -0.5]))


def test_outgoing_wave_combination():
    xs = np.linspace(0.05, 40.0, 97)
    h0 = hankel1_0(xs)
    h1 = hankel1_1(xs)
    assert np.array_equal(h0.real, bessel_j0(xs))
    assert np.array_equal(h0.imag, bessel_y0(xs))
    assert np.array_equal(h1.real, bessel_j1(xs))
    assert np.array_equal(h1.imag, bessel_y1(xs))


def test_wronskian_identity():
    # J1(x) Y0(x) - J0(x) Y1(x) = 2 / (pi x)
    xs = np.linspace(0.2, 50.0, 300)
    w = bessel_j1(xs) * bessel_y0(xs) - bessel_j0(xs) * bessel_y1(xs)
    assert np.abs(w - 2.0 / (np.pi * xs)).max() < 1e-11


def test_scalar_inputs_accepted():
    assert bessel_j0(0.0) == pytest.approx(1.0)
    assert np.shape(hankel1_0(2.5)) == ()
