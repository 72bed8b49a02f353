"""Brute-force reference values for the state constructors and phase-space maps.

Everything here works in the position representation (wavefunctions on a fine
x-grid) or in a large Fock basis with scipy's expm, so none of it shares code
paths with the Rust crate (Fock-basis overlaps and Laguerre recurrences).

Conventions: X = (a + a^dag)/sqrt(2), Y = (a - a^dag)/(i sqrt(2)),
alpha = (X + iY)/sqrt(2).  Phase-space densities are per unit dX dY.

Run: python3 states_oracle.py
"""

import numpy as np
from scipy.linalg import expm
from scipy.integrate import quad

XS = np.linspace(-25.0, 25.0, 20001)
DX = XS[1] - XS[0]


def coherent_wf(alpha, x=XS):
    x0 = np.sqrt(2.0) * alpha.real
    p0 = np.sqrt(2.0) * alpha.imag
    return np.pi ** -0.25 * np.exp(-((x - x0) ** 2) / 2 + 1j * p0 * x - 0.5j * x0 * p0)


def hermite_functions(nmax, x=XS):
    out = np.zeros((nmax + 1, len(x)))
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(2, nmax + 1):
        out[n] = np.sqrt(2.0 / n) * x * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def normalize(psi):
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * DX)


def husimi_point(psi, X, Y):
    """Q(X,Y) = |<alpha|psi>|^2 / (2 pi) by direct overlap integral."""
    alpha = (X + 1j * Y) / np.sqrt(2.0)
    ov = np.sum(np.conj(coherent_wf(alpha)) * psi) * DX
    return abs(ov) ** 2 / (2 * np.pi)


def wigner_point(psi_fn, X, Y):
    """W(X,Y) = (1/pi) int psi*(X+s) psi(X-s) e^{2iYs} ds."""
    s = np.linspace(-20, 20, 40001)
    ds = s[1] - s[0]
    integrand = np.conj(psi_fn(X + s)) * psi_fn(X - s) * np.exp(2j * Y * s)
    return float(np.real(np.sum(integrand) * ds) / np.pi)


def q_marginal(psi, x_eval):
    """Q X-marginal = |psi|^2 convolved with N(0, 1/2)."""
    dens = np.abs(psi) ** 2
    out = []
    for x in x_eval:
        kern = np.exp(-((x - XS) ** 2)) / np.sqrt(np.pi)
        out.append(np.sum(dens * kern) * DX)
    return np.array(out)


def fock_matrices(dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    return a, a.conj().T


def squeezed_coherent_ket(amp, z, dim=160, keep=None):
    a, ad = fock_matrices(dim)
    s = expm((np.conj(z) * a @ a - z * ad @ ad) / 2)
    d = expm(amp * ad - np.conj(amp) * a)
    vac = np.zeros(dim, complex)
    vac[0] = 1
    ket = d @ s @ vac
    if keep is not None:
        ket = ket[:keep]
    return ket / np.linalg.norm(ket)


def quad_moments(ket):
    dim = len(ket)
    a, ad = fock_matrices(dim)
    X = (a + ad) / np.sqrt(2)
    Y = (a - ad) / (1j * np.sqrt(2))
    ev = lambda op: np.vdot(ket, op @ ket)
    mx, my = ev(X).real, ev(Y).real
    vx = ev(X @ X).real - mx ** 2
    vy = ev(Y @ Y).real - my ** 2
    cxy = (ev((X @ Y + Y @ X) / 2)).real - mx * my
    return mx, my, vx, vy, cxy


def main():
    np.set_printoptions(precision=12)
    print("== point values ==")
    vac = coherent_wf(0j)
    print("Q vacuum (0,0)           ", husimi_point(vac, 0.0, 0.0))
    h = hermite_functions(6)
    print("Q fock1 (0,0)            ", husimi_point(h[1], 0.0, 0.0))
    print("Q fock1 (1,0.5)          ", husimi_point(h[1], 1.0, 0.5))
    print("W vacuum (0,0)           ", wigner_point(lambda x: coherent_wf(0j, x), 0.0, 0.0))
    fock1 = lambda x: np.sqrt(2.0) * x * np.pi ** -0.25 * np.exp(-x * x / 2)
    print("W fock1 (0,0)            ", wigner_point(fock1, 0.0, 0.0))
    print("W fock1 (0.7,-0.4)       ", wigner_point(fock1, 0.7, -0.4))
    alpha = 1.0 + 0.5j
    print("Q coh(1+0.5i) (1,0.3)    ", husimi_point(coherent_wf(alpha), 1.0, 0.3))
    print("W coh(1+0.5i) (1,0.3)    ", wigner_point(lambda x: coherent_wf(alpha, x), 1.0, 0.3))
    cat = lambda x: coherent_wf(1 + 0j, x) + coherent_wf(-1 + 0j, x)
    catn = np.sqrt(np.sum(np.abs(cat(XS)) ** 2) * DX)
    catf = lambda x: cat(x) / catn
    print("W cat(1) (0,0)           ", wigner_point(catf, 0.0, 0.0))
    print("W cat(1) (0,0.8)         ", wigner_point(catf, 0.0, 0.8))
    print("Q cat(1) (1.2,0.4)       ", husimi_point(catf(XS), 1.2, 0.4))

    print("== X marginals ==")
    print("Q-marg vacuum at 0       ", q_marginal(vac, [0.0])[0])
    print("Q-marg fock1 at 0        ", q_marginal(h[1], [0.0])[0])
    print("Q-marg fock1 at 1.3      ", q_marginal(h[1], [1.3])[0])
    print("Q-marg fock5 at 0, 2     ", q_marginal(h[5], [0.0, 2.0]))
    print("Q-marg cat(1) at 0, 1.5  ", q_marginal(catf(XS), [0.0, 1.5]))
    print("W-marg cat(1) at 0, 1.5  ", np.interp([0.0, 1.5], XS, np.abs(catf(XS)) ** 2))
    # closed form check for fock(1)
    cf = lambda x: (x * x + 1) * np.exp(-x * x / 2) / (2 * np.sqrt(2 * np.pi))
    print("closed-form fock1 at 0,1.3", cf(0.0), cf(1.3))

    # Extrema of the fock(5) Q marginal.
    xs = np.linspace(-9, 9, 3601)
    m5 = q_marginal(h[5], xs)
    d = np.diff(m5)
    ext = np.sum(np.sign(d[1:]) != np.sign(d[:-1]))
    print("fock5 Q-marginal extrema ", ext)
    w5 = np.interp(xs, XS, h[5] ** 2)
    d = np.diff(w5)
    print("fock5 W-marginal extrema ", np.sum(np.sign(d[1:]) != np.sign(d[:-1])))

    print("== constructor moments ==")
    ket = squeezed_coherent_ket(0j, 0.5j, keep=32)
    print("sq(0,0.5i) mx,my,vx,vy,cxy", quad_moments(np.pad(ket, (0, 40))))
    r, th = 0.5, np.pi / 2
    print("  gaussian formula vx,vy,cxy",
          0.5 * (np.cosh(2 * r) - np.sinh(2 * r) * np.cos(th)),
          0.5 * (np.cosh(2 * r) + np.sinh(2 * r) * np.cos(th)),
          -0.5 * np.sinh(2 * r) * np.sin(th))
    ket = squeezed_coherent_ket(0j, 0.5 + 0j, keep=32)
    print("sq(0,0.5) mx,my,vx,vy,cxy ", quad_moments(np.pad(ket, (0, 40))))
    ket = squeezed_coherent_ket(2 + 0.5j, 1.0 + 0j, keep=48)
    print("sq(2+0.5i,1) moments      ", quad_moments(np.pad(ket, (0, 40))))
    print("sq(2+0.5i,1) <n>          ", np.sum(np.arange(48) * np.abs(ket) ** 2))
    print("sq(2+0.5i,1) top-10% pop  ", np.sum(np.abs(ket[43:]) ** 2))
    ket = squeezed_coherent_ket(1 + 0j, 0j, keep=32)
    print("coh(1) <n> (cutoff 32)    ", np.sum(np.arange(32) * np.abs(ket) ** 2))
    ket = squeezed_coherent_ket(0.5 + 0j, 0j, keep=32)
    print("displaced vac 0.5 moments ", quad_moments(np.pad(ket, (0, 40))))
    print("(|0>-|1>)/sqrt2 <n>       ", 0.5)


if __name__ == "__main__":
    main()
