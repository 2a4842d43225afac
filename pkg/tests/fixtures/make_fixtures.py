"""Regenerate derived_constants.json from independent high-precision oracles.

Run from the repository root:  python tests/fixtures/make_fixtures.py

Nothing here imports the package under test.
"""

import json
from fractions import Fraction
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).with_name("derived_constants.json")


def harmonic_digamma(k):
    # -gamma + sum_{j<k} 1/j, rational part exact
    h = sum((Fraction(1, j) for j in range(1, k)), Fraction(0))
    return mp.mpf(h.numerator) / h.denominator - mp.euler


def trigamma_by_recurrence(k):
    # Psi'(k) = pi^2/6 - sum_{j<k} 1/j^2
    s = sum((Fraction(1, j * j) for j in range(1, k)), Fraction(0))
    return mp.pi**2 / 6 - mp.mpf(s.numerator) / s.denominator


def normal_upper_quantile(p):
    # Bisection on the normal CDF.
    lo, hi = mp.mpf(-40), mp.mpf(40)
    target = 1 - mp.mpf(p)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mp.ncdf(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def mvt_entropy_radial(d, rho):
    # -int f log f over R^d reduced to the radius; f normalised numerically too.
    sd = 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)
    p = (mp.mpf(rho) + d) / 2
    kernel = lambda r: (1 + r * r / rho) ** (-p)
    z = mp.quad(lambda r: kernel(r) * sd * r ** (d - 1), [0, 1, 10, mp.inf])
    f = lambda r: kernel(r) / z
    return -mp.quad(lambda r: f(r) * mp.log(f(r)) * sd * r ** (d - 1), [0, 1, 10, mp.inf])


def gamma_logdensity_variance_quad(a):
    a = mp.mpf(a)
    logf = lambda x: (a - 1) * mp.log(x) - x - mp.loggamma(a)
    f = lambda x: mp.exp(logf(x))
    m1 = mp.quad(lambda x: f(x) * logf(x), [0, 1, 10, mp.inf])
    m2 = mp.quad(lambda x: f(x) * logf(x) ** 2, [0, 1, 10, mp.inf])
    return m2 - m1 * m1


def gaussian_lambda1_cartesian(d):
    # Integrate (|x|^2 - d) f^{1-2/d} as a product of 1-D Gaussian moments.
    beta = 1 - mp.mpf(2) / d
    c = (2 * mp.pi) ** (-(mp.mpf(d) / 2) * beta)
    g0 = mp.quad(lambda x: mp.exp(-beta * x * x / 2), [-mp.inf, mp.inf])
    g2 = mp.quad(lambda x: x * x * mp.exp(-beta * x * x / 2), [-mp.inf, mp.inf])
    integral = c * (d * g2 * g0 ** (d - 1) - d * g0**d)
    vd = mp.pi ** (mp.mpf(d) / 2) / mp.gamma(1 + mp.mpf(d) / 2)
    return -integral / (2 * (d + 2) * vd ** (mp.mpf(2) / d))


def weights_8_4():
    # w2 + w4 = 1, w2 G(2.5)/G(2) + w4 G(4.5)/G(4) = 0
    g2 = mp.gamma(2.5) / mp.gamma(2)
    g4 = mp.gamma(4.5) / mp.gamma(4)
    w2 = g4 / (g4 - g2)
    return w2, 1 - w2


def t_k_literal(r, s, t, alpha, k):
    # The displayed triple sum, term by term, at 40 digits.
    r, s, t, a = (mp.mpf(v) for v in (r, s, t, alpha))
    I = k - 1 - (1 if r < s else 0)
    J = k - 1 - (1 if r < t else 0)
    L = k - 1 - (1 if r < max(s, t) else 0)
    joint = mp.mpf(0)
    for l in range(L + 1):
        for i in range(I - l + 1):
            for j in range(J - l + 1):
                joint += (s - a) ** i * (t - a) ** j * a**l / (mp.factorial(i) * mp.factorial(j) * mp.factorial(l))
    prod = mp.mpf(0)
    for i in range(I + 1):
        for j in range(J + 1):
            prod += s**i * t**j / (mp.factorial(i) * mp.factorial(j))
    return mp.exp(a) * joint - prod


# (r, s, t, alpha, k): alpha is supplied directly so the oracle exercises the sums alone.
T_K_CASES = [
    (0.3, 1.0, 2.0, 0.6, 1),
    (1.5, 1.0, 2.0, 0.4, 1),
    (0.5, 0.8, 0.7, 0.55, 2),
    (0.75, 0.5, 1.25, 0.3, 2),
    (2.5, 1.0, 2.0, 0.1, 2),
    (0.1, 3.0, 2.5, 2.2, 3),
    (2.75, 3.0, 2.5, 1.0, 3),
    (4.0, 3.0, 2.5, 0.25, 3),
    (0.0, 0.0, 0.0, 0.0, 3),
]


def inflation_constant_oracle(k):
    k = int(k)
    out = mp.psi(1, k) - 1
    if k == 1:
        return out + 2 * mp.log(2)
    out += mp.mpf(2) ** (-(2 * k - 2)) * mp.binomial(2 * k - 2, k - 1) * (mp.psi(0, 2 * k - 1) - mp.psi(0, k) - mp.log(2))
    acc = mp.mpf(0)
    for j in range(k - 1):
        acc += mp.mpf(2) ** (-k - j) * mp.binomial(k + j - 1, j) * (1 - (k - j) * (mp.psi(0, k + j) - mp.log(2) - mp.psi(0, k)))
    return out + acc / (k - 1)


def main():
    w2, w4 = weights_8_4()
    data = {
        "digamma_5": float(harmonic_digamma(5)),
        "trigamma_10": float(trigamma_by_recurrence(10)),
        "gamma_ratio_2_0.5": float(mp.gamma(2.5) / mp.gamma(2)),
        "normal_quantile_0.025": float(normal_upper_quantile(0.025)),
        "weights_k8_d4": {"w2": float(w2), "w4": float(w4)},
        "mvt_entropy": {f"d={d},rho={rho}": float(mvt_entropy_radial(d, rho)) for d, rho in ((1, 3), (2, 5), (3, 10))},
        "gamma_logdensity_variance": {f"a={a}": float(gamma_logdensity_variance_quad(a)) for a in (0.5, 2.5, 4)},
        "t_k_cases": [list(c) + [float(t_k_literal(*c))] for c in T_K_CASES],
        "inflation_constant": {f"k={k}": float(inflation_constant_oracle(k)) for k in range(1, 8)},
        "gaussian_lambda1": {f"d={d}": float(gaussian_lambda1_cartesian(d)) for d in (3, 4, 6)},
    }
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()
