"""Root-finding and ODE references for the oscillator drift.

Uses scipy's brentq/fsolve and an adaptive RK45 integrator on the real 2-D
system, independent of the Euler-Maruyama stepper in the crate.

Run: python3 dynamics_oracle.py
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, fsolve


def drift(alpha, lam, g, b, kind):
    nl = g * g * abs(alpha) ** 2 * alpha
    if kind == "opo":
        return -alpha + lam * np.conj(alpha) - nl + b
    return -alpha + lam * np.conj(alpha) + 1j * nl + b


def real_rhs(lam, g, b, kind):
    def f(_t, v):
        d = drift(v[0] + 1j * v[1], lam, g, b, kind)
        return [d.real, d.imag]
    return f


def jac(v, lam, g, b, kind, h=1e-6):
    f = real_rhs(lam, g, b, kind)
    J = np.zeros((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        J[:, k] = (np.array(f(0, v + e)) - np.array(f(0, v - e))) / (2 * h)
    return J


def main():
    print("== OPO real roots ==")
    for lam, g, b in [(2.0, 0.1, 0.0), (1.5, 0.05, 0.0), (2.0, 0.1, 0.5), (1.5, 0.05, 0.3)]:
        f = lambda x: (lam - 1) * x - g * g * x ** 3 + b
        xp = brentq(f, 0.5 * np.sqrt(lam - 1) / g, 10 / g)
        xn = brentq(f, -10 / g, -0.5 * np.sqrt(lam - 1) / g)
        print(f"lam={lam} g={g} b={b}: +{xp:.12f}  {xn:.12f}")

    print("== drift point values ==")
    print("OPO drift(10; 2, 0.1, 0)", drift(10 + 0j, 2, 0.1, 0, "opo"))
    print("JPO drift(10; 2, 0.1, 0)", drift(10 + 0j, 2, 0.1, 0, "jpo"))
    print("OPO drift(1+2i; 1.5,0.2,0.3)", drift(1 + 2j, 1.5, 0.2, 0.3, "opo"))
    print("JPO drift(1+2i; 1.5,0.2,0.3)", drift(1 + 2j, 1.5, 0.2, 0.3, "jpo"))

    print("== JPO fixed points ==")
    for lam, g, b in [(2.0, 0.1, 0.0), (1.5, 0.1, 0.0), (1.5, 0.01, 0.0), (1.5, 0.05, 0.3)]:
        f = real_rhs(lam, g, b, "jpo")
        pts = []
        for seed in (+1, -1):
            # settle by integrating the flow, then polish with fsolve
            sol = solve_ivp(f, (0, 400), [seed * np.sqrt(lam - 1) / g, 0.0], rtol=1e-10, atol=1e-10)
            v = fsolve(lambda v: f(0, v), sol.y[:, -1], xtol=1e-14)
            ev = np.linalg.eigvals(jac(v, lam, g, b, "jpo"))
            pts.append(v)
            r = np.hypot(*v)
            print(f"lam={lam} g={g} b={b} seed {seed:+d}: ({v[0]:.10f}, {v[1]:.10f}) |a|={r:.10f}"
                  f" phase={np.arctan2(v[1], v[0]):.10f} eig re max={ev.real.max():.4f}")
        print("   closed form |a| = (lam^2-1)^(1/4)/g =", (lam * lam - 1) ** 0.25 / g,
              " phase = atan(sqrt(lam^2-1))/2 =", np.arctan(np.sqrt(lam * lam - 1)) / 2)

    print("== deterministic relaxation (RK45) ==")
    f = real_rhs(2.0, 0.1, 0.0, "opo")
    for a0 in (50.0, -0.1):
        sol = solve_ivp(f, (0, 15), [a0, 0.0], rtol=1e-11, atol=1e-12)
        print(f"alpha0={a0}: alpha(15) = {sol.y[0, -1]:.10f} + {sol.y[1, -1]:.3e}i")


if __name__ == "__main__":
    main()
