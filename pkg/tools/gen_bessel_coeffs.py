"""Generate Chebyshev coefficients for the in-package Bessel evaluators.

Fits J0, J1, Y0, Y1 on [0, SPLIT] (power region, after peeling off the
logarithmic parts of the Y's) and the modulus/phase functions P, Q on
[SPLIT, inf) (asymptotic region), using high-precision mpmath samples at
Gauss-Chebyshev nodes. Writes src/pdfisp/_bessel_coeffs.py and prints the
observed max abs error of a double-precision mirror of the runtime
evaluator against mpmath on dense grids.

Run from the repository root:  python tools/gen_bessel_coeffs.py
"""
from __future__ import annotations

import pathlib

import mpmath as mp
import numpy as np

mp.mp.dps = 50

SPLIT = 17.0
N_INNER_NODES, N_INNER_KEEP = 96, 60
N_OUTER_NODES, N_OUTER_KEEP = 40, 24
TAIL_CUT = 1e-19


def cheb_fit(f, n_nodes: int, n_keep: int) -> list[float]:
    """Chebyshev coefficients of f on [-1, 1] via Gauss-Chebyshev quadrature."""
    xs = [mp.cos(mp.pi * (j + mp.mpf(1) / 2) / n_nodes) for j in range(n_nodes)]
    fs = [f(x) for x in xs]
    cs = []
    for k in range(n_keep):
        s = mp.fsum(fs[j] * mp.cos(k * mp.pi * (j + mp.mpf(1) / 2) / n_nodes)
                    for j in range(n_nodes))
        cs.append(float((2 if k else 1) * s / n_nodes))
    # drop the negligible tail but keep at least 8 terms
    while len(cs) > 8 and abs(cs[-1]) < TAIL_CUT and abs(cs[-2]) < TAIL_CUT:
        cs.pop()
    return cs


# ---------------------------------------------------------------- inner
def x_inner(t):
    return SPLIT * mp.sqrt((t + 1) / 2)


def f_j0(t):
    return mp.besselj(0, x_inner(t))


def f_j1(t):
    x = x_inner(t)
    if x == 0:
        return mp.mpf(1) / 2
    return mp.besselj(1, x) / x


def f_y0(t):
    x = x_inner(t)
    return mp.bessely(0, x) - (2 / mp.pi) * mp.log(x / 2) * mp.besselj(0, x)


def f_y1(t):
    x = x_inner(t)
    return (mp.bessely(1, x) + 2 / (mp.pi * x)
            - (2 / mp.pi) * mp.log(x / 2) * mp.besselj(1, x)) / x


# ---------------------------------------------------------------- outer
def _pq(t, order):
    z = mp.sqrt((t + 1) / 2)
    x = SPLIT / z
    chi = x - (mp.pi / 4 if order == 0 else 3 * mp.pi / 4)
    j, y = mp.besselj(order, x), mp.bessely(order, x)
    amp = mp.sqrt(mp.pi * x / 2)
    p = amp * (j * mp.cos(chi) + y * mp.sin(chi))
    q = amp * (y * mp.cos(chi) - j * mp.sin(chi)) / z
    return p, q


def f_p0(t):
    return _pq(t, 0)[0]


def f_q0(t):
    return _pq(t, 0)[1]


def f_p1(t):
    return _pq(t, 1)[0]


def f_q1(t):
    return _pq(t, 1)[1]


# ---------------------------------------------------------------- emit
def main() -> None:
    fits = {
        "J0_INNER": cheb_fit(f_j0, N_INNER_NODES, N_INNER_KEEP),
        "J1_INNER": cheb_fit(f_j1, N_INNER_NODES, N_INNER_KEEP),
        "Y0_INNER": cheb_fit(f_y0, N_INNER_NODES, N_INNER_KEEP),
        "Y1_INNER": cheb_fit(f_y1, N_INNER_NODES, N_INNER_KEEP),
        "P0_OUTER": cheb_fit(f_p0, N_OUTER_NODES, N_OUTER_KEEP),
        "Q0_OUTER": cheb_fit(f_q0, N_OUTER_NODES, N_OUTER_KEEP),
        "P1_OUTER": cheb_fit(f_p1, N_OUTER_NODES, N_OUTER_KEEP),
        "Q1_OUTER": cheb_fit(f_q1, N_OUTER_NODES, N_OUTER_KEEP),
    }

    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "pdfisp" / "_bessel_coeffs.py"
    lines = [
        '"""Chebyshev coefficients for the Bessel evaluators.',
        "",
        "Generated by tools/gen_bessel_coeffs.py; do not edit by hand.",
        '"""',
        "",
        f"SPLIT = {SPLIT!r}",
        "",
    ]
    for name, cs in fits.items():
        lines.append(f"{name} = (")
        for c in cs:
            lines.append(f"    {c!r},")
        lines.append(")")
        lines.append("")
    out.write_text("\n".join(lines))
    print(f"wrote {out} ({sum(len(c) for c in fits.values())} coefficients)")
    for name, cs in fits.items():
        print(f"  {name}: {len(cs)} terms, tail {cs[-1]:.2e}")

    # ------------------------------------------------------------ verify
    def clenshaw(t, cs):
        b1 = np.zeros_like(t)
        b2 = np.zeros_like(t)
        for c in cs[:0:-1]:
            b1, b2 = 2 * t * b1 - b2 + c, b1
        return t * b1 - b2 + cs[0]

    def eval_all(x):
        x = np.asarray(x, dtype=float)
        out = {k: np.empty_like(x) for k in ("j0", "j1", "y0", "y1")}
        lo = x <= SPLIT
        if lo.any():
            xl = x[lo]
            t = 2 * (xl / SPLIT) ** 2 - 1
            j0 = clenshaw(t, fits["J0_INNER"])
            j1 = xl * clenshaw(t, fits["J1_INNER"])
            ln = (2 / np.pi) * np.log(xl / 2)
            out["j0"][lo] = j0
            out["j1"][lo] = j1
            out["y0"][lo] = ln * j0 + clenshaw(t, fits["Y0_INNER"])
            out["y1"][lo] = ln * j1 - 2 / (np.pi * xl) + xl * clenshaw(t, fits["Y1_INNER"])
        hi = ~lo
        if hi.any():
            xh = x[hi]
            z = SPLIT / xh
            t = 2 * z ** 2 - 1
            amp = np.sqrt(2 / (np.pi * xh))
            for order, (pk, qk) in ((0, ("P0_OUTER", "Q0_OUTER")),
                                    (1, ("P1_OUTER", "Q1_OUTER"))):
                chi = xh - (np.pi / 4 if order == 0 else 3 * np.pi / 4)
                p, q = clenshaw(t, fits[pk]), clenshaw(t, fits[qk])
                c, s = np.cos(chi), np.sin(chi)
                out[f"j{order}"][hi] = amp * (p * c - q * z * s)
                out[f"y{order}"][hi] = amp * (p * s + q * z * c)
        return out

    rng = np.random.default_rng(7)
    grids = {
        "inner": np.concatenate([rng.uniform(1e-6, SPLIT, 1500),
                                 np.linspace(1e-3, SPLIT, 500)]),
        "outer": np.concatenate([rng.uniform(SPLIT, 600.0, 1500),
                                 np.linspace(SPLIT, 200.0, 500)]),
    }
    for region, xs in grids.items():
        got = eval_all(xs)
        for name, fn in (("j0", lambda v: mp.besselj(0, v)),
                         ("j1", lambda v: mp.besselj(1, v)),
                         ("y0", lambda v: mp.bessely(0, v)),
                         ("y1", lambda v: mp.bessely(1, v))):
            ref = np.array([float(fn(v)) for v in xs])
            err = np.abs(got[name] - ref)
            print(f"  verify {region} {name}: max abs err {err.max():.3e}")


if __name__ == "__main__":
    main()
