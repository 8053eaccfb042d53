"""Rotation matrix elements for spin representations.

The polar-angle factor is evaluated in the standard real convention. Other
conventions differ from it by unimodular phases only, so everything promised
downstream is at the level of moduli, which is all the sphere integrals
consume. Factorial ratios are computed in log space with signs tracked
separately; the alternating sum runs in ascending order with compensated
accumulation. Double precision keeps the matrices orthogonal to ~1e-11 up to
j = 25/2; larger spins are rejected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .spin_core import (
    EulerAngles,
    HalfInt,
    SpinState,
    basis_state,
    check_pair,
    check_spin_label,
    dimension,
)

MAX_TWO_J = 25


@lru_cache(maxsize=None)
def log_factorial(n: int) -> float:
    """ln(n!) via log-Gamma."""
    if n < 0:
        raise DomainError(f"factorial needs n >= 0, got {n}")
    return math.lgamma(n + 1)


def _check_supported(j: HalfInt) -> None:
    check_spin_label(j)
    if j.twice > MAX_TWO_J:
        raise DomainError(
            f"spins above {MAX_TWO_J}/2 exceed the double-precision accuracy budget"
        )


def _d_element(two_j: int, two_m: int, two_n: int, theta: float) -> float:
    # row index m, column index n; all exponents provably nonnegative
    j_p_n = (two_j + two_n) // 2
    j_m_n = (two_j - two_n) // 2
    j_p_m = (two_j + two_m) // 2
    j_m_m = (two_j - two_m) // 2
    mn = (two_m - two_n) // 2  # m - n

    s_min = max(0, -mn)
    s_max = min(j_p_n, j_m_m)
    if s_max < s_min:
        return 0.0

    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    pref = 0.5 * (
        log_factorial(j_p_m)
        + log_factorial(j_m_m)
        + log_factorial(j_p_n)
        + log_factorial(j_m_n)
    )

    total = 0.0
    comp = 0.0  # Kahan compensation
    for k in range(s_min, s_max + 1):
        mag = pref - (
            log_factorial(j_p_n - k)
            + log_factorial(k)
            + log_factorial(mn + k)
            + log_factorial(j_m_m - k)
        )
        term = math.exp(mag) * c ** (two_j - mn - 2 * k) * s ** (mn + 2 * k)
        if (mn + k) % 2:
            term = -term
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def wigner_d(j: HalfInt, m: HalfInt, n: HalfInt, theta: float) -> float:
    """Polar-angle matrix element d^j_{mn}(theta), theta in [0, pi]."""
    check_pair(j, m)
    check_pair(j, n)
    _check_supported(j)
    theta = float(theta)
    if not (0.0 <= theta <= math.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    return _d_element(j.twice, m.twice, n.twice, theta)


@dataclass(frozen=True)
class LittleDMatrix:
    """All d^j_{mn}(theta) at once; rows and columns ordered m, n ascending."""

    j: HalfInt
    theta: float
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_supported(self.j)
        theta = float(self.theta)
        if not (0.0 <= theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "theta", theta)
        two_j = self.j.twice
        dim = two_j + 1
        mat = np.empty((dim, dim))
        for a, two_m in enumerate(range(-two_j, two_j + 1, 2)):
            for b, two_n in enumerate(range(-two_j, two_j + 1, 2)):
                mat[a, b] = _d_element(two_j, two_m, two_n, theta)
        mat.setflags(write=False)
        object.__setattr__(self, "values", mat)


def rotation_element(j: HalfInt, m: HalfInt, n: HalfInt, g: EulerAngles) -> complex:
    """Full matrix element exp(-i(m phi + n psi)) d^j_{mn}(theta)."""
    d = wigner_d(j, m, n, g.theta)
    return cmath.exp(-1j * (m.value * g.phi + n.value * g.psi)) * d


def _rotation_matrix(j: HalfInt, g: EulerAngles) -> np.ndarray:
    two_j = j.twice
    d = LittleDMatrix(j, g.theta).values
    m_vals = np.arange(-two_j, two_j + 1, 2) / 2.0
    phase_m = np.exp(-1j * m_vals * g.phi)
    phase_n = np.exp(-1j * m_vals * g.psi)
    return phase_m[:, None] * d * phase_n[None, :]


def apply_rotation(g: EulerAngles, u: SpinState) -> SpinState:
    """Rotate a state; the norm is preserved to unitarity accuracy."""
    _check_supported(u.j)
    out = _rotation_matrix(u.j, g) @ u.vector
    return SpinState(u.j, tuple(out))


def coherent_overlap(u: SpinState, g: EulerAngles, weight: int = +1) -> complex:
    """Overlap of u with the rotated extremal basis vector v_{+j} or v_{-j}.

    The modulus is independent of psi, which only contributes a phase.
    """
    if weight not in (+1, -1):
        raise DomainError(f"weight selects +j or -j, got {weight}")
    _check_supported(u.j)
    two_j = u.j.twice
    two_n = weight * two_j
    amps = u.vector
    total = 0j
    for idx, two_m in enumerate(range(-two_j, two_j + 1, 2)):
        d = _d_element(two_j, two_m, two_n, g.theta)
        if d != 0.0:
            total += amps[idx].conjugate() * cmath.exp(-1j * (two_m / 2.0) * g.phi) * d
    return total * cmath.exp(-1j * (two_n / 2.0) * g.psi)
