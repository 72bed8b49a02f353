"""Brute-force reference values for the closed-form bias-probability map.

Marginals come from position-space wavefunctions (see states_oracle.py); the
Gaussian smoothing is an explicit discrete convolution on a fine grid and the
steady-state probability is a plain Riemann tail sum.  No error functions are
used except for the normal-CDF reference values printed at the top.

Run: python3 analytics_oracle.py
"""

import numpy as np
from scipy.special import ndtr

from states_oracle import XS, DX, coherent_wf, hermite_functions


def sigma2(lam, xi):
    return (1 + xi * (1 - lam)) / (2 * (lam - 1))


def smooth(dens, s2):
    if s2 == 0:
        return dens.copy()
    k = np.exp(-(XS ** 2) / (2 * s2)) / np.sqrt(2 * np.pi * s2)
    return np.convolve(dens, k, mode="same") * DX


def tail_prob(dens, lam, xi, b):
    sm = smooth(dens, sigma2(lam, xi))
    xstar = -np.sqrt(2) * b / (lam - 1)
    # trapezoid on the fine grid, exact linear piece at the boundary
    mask = XS > xstar
    idx = np.argmax(mask)
    total = np.trapezoid(sm[idx:], XS[idx:])
    frac = XS[idx] - xstar
    f_star = np.interp(xstar, XS, sm)
    total += 0.5 * (f_star + sm[idx]) * frac
    return total


def q_marg(psi):
    dens = np.abs(psi) ** 2
    return smooth(dens, 0.5)


def w_marg(psi):
    return np.abs(psi) ** 2


def cat_psi():
    c = coherent_wf(1 + 0j) + coherent_wf(-1 + 0j)
    return c / np.sqrt(np.sum(np.abs(c) ** 2) * DX)


def main():
    print("== normal CDF references ==")
    print("Phi(sqrt2*0.5)          ", ndtr(np.sqrt(2) * 0.5))
    print("Phi(0.8485/sqrt(1.5))   ", ndtr(np.sqrt(2) * 0.3 / 0.5 / np.sqrt(1.5)))
    print("Phi(0.5)                ", ndtr(0.5))

    vac = coherent_wf(0j)
    h = hermite_functions(6)
    print("== brute-force tail integrals ==")
    print("vac Q, lam2 xi1 b0      ", tail_prob(q_marg(vac), 2.0, 1, 0.0))
    print("vac Q, lam2 xi1 b0.5    ", tail_prob(q_marg(vac), 2.0, 1, 0.5))
    print("vac W, lam1.5 xi0 b0.3  ", tail_prob(w_marg(vac), 1.5, 0, 0.3))
    print("vac Q, lam1.2 xi1 b0.1  ", tail_prob(q_marg(vac), 1.2, 1, 0.1))
    for lam in (2.0, 1.5):
        for b in (-0.5, 0.3, 1.0):
            print(f"fock1 Q lam{lam} b{b}     ", tail_prob(q_marg(h[1]), lam, 1, b))
            print(f"fock5 Q lam{lam} b{b}     ", tail_prob(q_marg(h[5]), lam, 1, b))
    cat = cat_psi()
    for lam in (2.0, 1.5, 1.2):
        print(f"cat Q lam{lam} b0.2      ", tail_prob(q_marg(cat), lam, 1, 0.2))

    print("== smoothed cat marginals (reconstruction targets) ==")
    cq = q_marg(cat)
    for lam in (2.0, 1.5, 1.2):
        s2 = sigma2(lam, 1)
        sm = smooth(cq, s2)
        print(f"lam{lam} s2={s2:.3f} at x=0,1.5,3 ", np.interp([0.0, 1.5, 3.0], XS, sm))

    print("== max slope of cat p(b) ==")
    for lam in (2.0, 1.5, 1.2):
        sm = smooth(cq, sigma2(lam, 1))
        # dp/db = sqrt2/(lam-1) * smoothed(x*)
        print(f"lam{lam} max dp/db       ", np.sqrt(2) / (lam - 1) * sm.max())


if __name__ == "__main__":
    main()
