"""Analytic formulas: moments and entropies in closed form, plus the special
functions they need. These are the oracles the quadrature routes are tested
against, and vice versa.

Combinatorial prefactors are computed with exact integer/rational arithmetic
wherever feasible; everything else runs in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import (
    BadExponent,
    DomainError,
    NoConvergence,
    WrongSpin,
    ZeroVector,
)
from .spin_core import HalfInt, SpinState, check_pair, norm, spin

LN2 = math.log(2.0)


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not (x > 0.0):
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return float(gammaln(x))


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b)."""
    a, b = float(a), float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"log_beta needs positive arguments, got ({a}, {b})")
    return float(gammaln(a) + gammaln(b) - gammaln(a + b))


@dataclass(frozen=True)
class HypergeomSeriesConfig:
    """Stopping policy for the 2F1(-p, -p; 1; t) power series."""

    rel_tol: float = 1e-13
    max_terms: int = 10**6

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0):
            raise DomainError("rel_tol must be positive")


_DEFAULT_CFG = HypergeomSeriesConfig()

# Within 1e-6 of t = 1 the series would need ~1/(1-t) terms, so the endpoint
# value (the Gauss sum) stands in for the whole neighborhood.
_GAUSS_CUTOFF = 1.0 - 1e-6


def _gauss_value(p: float) -> float:
    return math.exp(ln_gamma(1.0 + 2.0 * p) - 2.0 * ln_gamma(1.0 + p))


def _hyp_series(p: float, t: np.ndarray, cfg: HypergeomSeriesConfig) -> np.ndarray:
    """Series on points strictly below the Gauss cutoff; terms are all >= 0.

    Term recursion: c_{k+1} = c_k ((k-p)/(k+1))^2 t. Past k > p the term
    ratio is below t, so the tail is bounded by both the geometric sum and
    (for t near 1) a ~k * c_k envelope from the squared-Pochhammer decay.
    """
    total = np.ones_like(t)
    term = np.ones_like(t)
    k = 0
    while True:
        term = term * ((k - p) / (k + 1.0)) ** 2 * t
        total = total + term
        k += 1
        if k > p:
            tail = term * np.minimum(t / (1.0 - t), float(k + 1))
            if np.all(tail <= cfg.rel_tol * total):
                return total
        if k >= cfg.max_terms:
            raise NoConvergence(
                f"series did not meet rel_tol={cfg.rel_tol} in {cfg.max_terms} terms"
            )


def _hyp_f_values(
    p: float, t: np.ndarray, cfg: HypergeomSeriesConfig = _DEFAULT_CFG
) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    endpoint = t >= _GAUSS_CUTOFF
    if endpoint.any():
        out[endpoint] = _gauss_value(p)
    rest = ~endpoint
    if rest.any():
        if float(p).is_integer():
            # exactly p+1 nonzero terms; the recursion hits (p-p) and stops
            total = np.ones_like(t[rest])
            term = np.ones_like(t[rest])
            for k in range(int(p)):
                term = term * ((k - p) / (k + 1.0)) ** 2 * t[rest]
                total = total + term
            out[rest] = total
        else:
            out[rest] = _hyp_series(p, t[rest], cfg)
    return out


def hyp_f(p: float, t: float, cfg: HypergeomSeriesConfig = _DEFAULT_CFG) -> float:
    """Gauss series 2F1(-p, -p; 1; t) on t in [0, 1]; t = 1 is the Gauss value."""
    p, t = float(p), float(t)
    if p < 0.0 or not math.isfinite(p):
        raise DomainError(f"need p >= 0, got {p}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"need t in [0, 1], got {t}")
    return float(_hyp_f_values(p, np.array([t]), cfg)[0])


def legendre_poly(n: int, x: float) -> float:
    """Legendre polynomial by the three-term recurrence; P_n(1) = 1 exactly."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    x = float(x)
    if n == 0:
        return 1.0
    p_prev, p_cur = 1.0, x
    for k in range(1, n):
        p_prev, p_cur = p_cur, ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
    return p_cur


def legendre_func(p: float, z: float, cfg: HypergeomSeriesConfig = _DEFAULT_CFG) -> float:
    """Degree-p Legendre function on the ray z >= 1.

    P_p(z) = ((1+z)/2)^p 2F1(-p, -p; 1; (z-1)/(z+1)); coincides with the
    polynomial at integer degrees.
    """
    p, z = float(p), float(z)
    if p < 0.0:
        raise DomainError(f"need p >= 0, got {p}")
    if z < 1.0:
        raise DomainError(f"this branch needs z >= 1, got {z}")
    t = (z - 1.0) / (z + 1.0)
    return ((1.0 + z) / 2.0) ** p * hyp_f(p, t, cfg)


@dataclass(frozen=True)
class OrbitParamA:
    """Rotation-orbit parameter for spin-1 states: 0 is coherent, 1 is the m=0 orbit."""

    a: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        if not (0.0 <= self.a <= 1.0):
            raise DomainError(f"orbit parameter must lie in [0, 1], got {self.a}")


def orbit_param_a(u: SpinState) -> OrbitParamA:
    """|c_0^2 - 2 c_{-1} c_{+1}| of the unit-normalized spin-1 state.

    Rotation invariant; 0 on the coherent orbit, 1 on the orbit of v_0.
    """
    if u.j.twice != 2:
        raise WrongSpin(f"orbit parameter is defined for spin 1, got {u.j}")
    n = norm(u)
    if n == 0.0:
        raise ZeroVector("orbit parameter needs a nonzero state")
    c = u.vector / n
    raw = abs(c[1] ** 2 - 2.0 * c[0] * c[2])
    return OrbitParamA(min(float(raw), 1.0))


def stratum_representative(a: float) -> SpinState:
    """Unit spin-1 state sqrt(1-a) v_{-1} + sqrt(a) v_0 with orbit parameter a."""
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    return SpinState(spin(2), (complex(math.sqrt(1.0 - a)), complex(math.sqrt(a)), 0j))


def _check_exponent(p: float) -> float:
    p = float(p)
    if not (p > 0.0) or not math.isfinite(p):
        raise BadExponent(f"need p > 0, got {p}")
    return p


def i_p_o0(p: float) -> float:
    """Moment of the spin-1 coherent orbit: 3/(2p+1)."""
    p = _check_exponent(p)
    return 3.0 / (2.0 * p + 1.0)


def i_p_o1(p: float) -> float:
    """Moment of the spin-1 orbit of v_0: 3/(2p+1) * 2^p Gamma(p+1)^2 / Gamma(2p+1)."""
    p = _check_exponent(p)
    return (
        3.0
        / (2.0 * p + 1.0)
        * math.exp(p * LN2 + 2.0 * ln_gamma(p + 1.0) - ln_gamma(2.0 * p + 1.0))
    )


@lru_cache(maxsize=8)
def _unit_gauss(n: int = 96):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def i_p_oa_integral_rep(
    p: float, a: float, cfg: HypergeomSeriesConfig = _DEFAULT_CFG
) -> float:
    """Spin-1 moment on the orbit with parameter a in (0, 1), via the
    singularity-free one-dimensional representation

        3 [ (1-a)^(p+1)/(2a) * G_minus + (2a)^(2p+1)/(1-a)^(p+1) * G_plus ]

    with G_minus = Int_0^1 ((1-a)/(2a) t + 1)^(-2(p+1)) F(t) dt and
    G_plus = Int_0^1 (1 + 2a/(1-a) t)^(-2(p+1)) t^p F(t) dt,
    F(t) = 2F1(-p,-p;1;t). The overall constant is fixed by the p = 1
    normalization I_1 = 1 (see notes on the factor-2 slip in the source
    derivation). Endpoints a = 0, 1 have their own closed forms.
    """
    p, a = float(p), float(a)
    if p < 1.0:
        raise DomainError(f"representation needs p >= 1, got {p}")
    if not (0.0 < a < 1.0):
        raise DomainError("a must lie strictly inside (0, 1); use the endpoint forms")
    t, w = _unit_gauss()
    f_vals = _hyp_f_values(p, t, cfg)
    c_minus = (1.0 - a) / (2.0 * a)
    g_minus = float(np.sum(w * (c_minus * t + 1.0) ** (-2.0 * (p + 1.0)) * f_vals))
    c_plus = 2.0 * a / (1.0 - a)
    g_plus = float(np.sum(w * (1.0 + c_plus * t) ** (-2.0 * (p + 1.0)) * t**p * f_vals))
    return 3.0 * (
        (1.0 - a) ** (p + 1.0) / (2.0 * a) * g_minus
        + (2.0 * a) ** (2.0 * p + 1.0) / (1.0 - a) ** (p + 1.0) * g_plus
    )


def s_cl_j1(a: float) -> float:
    """Classical entropy of the spin-1 orbit with parameter a: 2/3 + a - ln(1+a)."""
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    return 2.0 / 3.0 + a - math.log1p(a)


def i_p_basis_closed(j: HalfInt, m: HalfInt, p: float) -> float:
    """Closed-form moment of a canonical basis state:

        (2j+1)/(2pj+1) * binom(2j, j+m)^p
            * Gamma(p(j-m)+1) Gamma(p(j+m)+1) / Gamma(2pj+1)

    computed wholly in log space. Exactly symmetric under m -> -m (the two
    factorial arguments are combined in a canonical order).
    """
    check_pair(j, m)
    p = _check_exponent(p)
    two_j = j.twice
    k_hi = (two_j + abs(m.twice)) // 2  # max(j+m, j-m)
    k_lo = (two_j - abs(m.twice)) // 2  # min(j+m, j-m)
    log_val = (
        math.log(two_j + 1.0)
        - math.log(p * two_j + 1.0)
        + p * (ln_gamma(two_j + 1.0) - ln_gamma(k_hi + 1.0) - ln_gamma(k_lo + 1.0))
        + ln_gamma(p * k_hi + 1.0)
        + ln_gamma(p * k_lo + 1.0)
        - ln_gamma(p * two_j + 1.0)
    )
    return math.exp(log_val)


@lru_cache(maxsize=None)
def harmonic_number(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n as an exact rational."""
    if n < 0:
        raise DomainError(f"harmonic number needs n >= 0, got {n}")
    if n == 0:
        return Fraction(0)
    return harmonic_number(n - 1) + Fraction(1, n)


def s_cl_basis(j: HalfInt, m: HalfInt) -> float:
    """Classical entropy of a canonical basis state via exact harmonic sums:

        (j+m)(H_{2j} - H_{j+m}) + (j-m)(H_{2j} - H_{j-m})
            - ln binom(2j, j+m) + 2j/(2j+1).

    Equals 2j/(2j+1) at m = +/-j and peaks at the central label.
    """
    check_pair(j, m)
    two_j = j.twice
    k = (two_j + m.twice) // 2  # j + m
    l = (two_j - m.twice) // 2  # j - m
    h2j = harmonic_number(two_j)
    rational = (
        k * (h2j - harmonic_number(k))
        + l * (h2j - harmonic_number(l))
        + Fraction(two_j, two_j + 1)
    )
    return float(rational) - math.log(math.comb(two_j, k))


@lru_cache(maxsize=None)
def i_n_oa_coefficients(n: int) -> tuple[Fraction, ...]:
    """Exact coefficients of the degree-n moment polynomial in a (spin 1).

    Entry k multiplies a^k. The triple sum runs over the even cosine power
    2s of the angular average, the index r of the binomial expansion of the
    x-dependent base, and the power t from expanding (1-a)^(n-s-r); each
    x-integral is an exact Beta value, so every coefficient is an exact
    rational. Odd powers cancel.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= 10:
        raise DomainError(f"integer exponent must lie in 1..10, got {n!r}")
    coeffs = [Fraction(0)] * (n + 1)
    for s in range(n // 2 + 1):
        for r in range(n - 2 * s + 1):
            base = Fraction(
                2 ** (s + r)
                * math.factorial(2 * n - s - r)
                * math.factorial(s + r)
                * math.factorial(n)
                * math.factorial(n - s - r),
                math.factorial(s) ** 2
                * math.factorial(r)
                * math.factorial(n - 2 * s - r)
                * math.factorial(2 * n),
            )
            for t in range(n - s - r + 1):
                term = base / (math.factorial(n - s - r - t) * math.factorial(t))
                if t % 2:
                    term = -term
                coeffs[s + r + t] += term
    pref = Fraction(3, 2 * n + 1)
    return tuple(pref * c for c in coeffs)


def i_n_oa_triple_sum(n: int, a: float) -> float:
    """Integer-exponent spin-1 moment from the exact coefficient polynomial."""
    coeffs = i_n_oa_coefficients(n)
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * a + float(c)
    return acc


def i_n_oa_legendre(n: int, a: float) -> float:
    """Integer-exponent spin-1 moment in Legendre form:

        3/(2n+1) * 2^n (n!)^2 / (2n)! * a^n P_n(1/a),

    continuous at a = 0 with limit 3/(2n+1).
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"need a positive integer exponent, got {n!r}")
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    if a == 0.0:
        return 3.0 / (2.0 * n + 1.0)
    scale = math.exp(n * LN2 + 2.0 * math.lgamma(n + 1.0) - math.lgamma(2.0 * n + 1.0))
    return 3.0 / (2.0 * n + 1.0) * scale * a**n * legendre_poly(int(n), 1.0 / a)


def i_p_oa_hypothesis(
    p: float, a: float, cfg: HypergeomSeriesConfig = _DEFAULT_CFG
) -> float:
    """Candidate closed form for the spin-1 moment at real p >= 1:

        3/(2p+1) * 2^p Gamma(p+1)^2 / Gamma(2p+1)
            * ((1+a)/2)^p 2F1(-p, -p; 1; (1-a)/(1+a)).

    Interpolates the proven integer-degree formula; a = 0 gives 3/(2p+1)
    through the Gauss value and a = 1 gives the v_0 closed form.
    """
    p, a = float(p), float(a)
    if p < 1.0:
        raise DomainError(f"need p >= 1, got {p}")
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    t = (1.0 - a) / (1.0 + a)
    scale = math.exp(p * LN2 + 2.0 * ln_gamma(p + 1.0) - ln_gamma(2.0 * p + 1.0))
    return 3.0 / (2.0 * p + 1.0) * scale * ((1.0 + a) / 2.0) ** p * hyp_f(p, t, cfg)


def entropy_from_hypothesis(a: float, h: float = 1e-3) -> float:
    """Entropy as minus the p-derivative of the hypothesis moment at p = 1.

    Third-order forward difference: the hypothesis formula starts at p = 1,
    so a central stencil is unavailable.
    """
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"need a in [0, 1], got {a}")
    h = float(h)
    if not (0.0 < h <= 0.1):
        raise DomainError(f"step must satisfy 0 < h <= 0.1, got {h}")
    f0 = i_p_oa_hypothesis(1.0, a)
    f1 = i_p_oa_hypothesis(1.0 + h, a)
    f2 = i_p_oa_hypothesis(1.0 + 2.0 * h, a)
    f3 = i_p_oa_hypothesis(1.0 + 3.0 * h, a)
    return -(-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h)
