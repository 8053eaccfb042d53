"""Half-integer spin labels, state vectors, random states, and sphere grids.

Amplitude index convention: entry k of a spin-j amplitude vector carries the
magnetic label m = -j + k, i.e. labels run -j, -j+1, ..., +j left to right.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadGridSize,
    DimensionMismatch,
    DomainError,
    InvalidPair,
    NonFinite,
    SpinMismatch,
    ZeroVector,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored exactly as twice its value (``twice=3`` means 3/2)."""

    twice: int

    def __post_init__(self) -> None:
        if isinstance(self.twice, bool) or not isinstance(self.twice, (int, np.integer)):
            raise DomainError(f"half-integer takes an int, got {type(self.twice).__name__}")
        object.__setattr__(self, "twice", int(self.twice))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __str__(self) -> str:
        return str(self.twice // 2) if self.is_integer else f"{self.twice}/2"


def check_spin_label(j: HalfInt) -> None:
    if j.twice < 1:
        raise DomainError(f"spin label must be >= 1/2, got twice={j.twice}")


def check_pair(j: HalfInt, m: HalfInt) -> None:
    """Valid (j, m) pairs have |m| <= j with j - m an integer."""
    check_spin_label(j)
    if abs(m.twice) > j.twice or (j.twice - m.twice) % 2 != 0:
        raise InvalidPair(f"m={m} is not a magnetic label of j={j}")


def spin(two_j: int) -> HalfInt:
    """Spin label from its doubled value; spins start at 1/2."""
    j = HalfInt(two_j)
    check_spin_label(j)
    return j


def dimension(j: HalfInt) -> int:
    return j.twice + 1


def magnetic_labels(j: HalfInt) -> tuple[HalfInt, ...]:
    """Labels -j, -j+1, ..., +j in ascending order."""
    check_spin_label(j)
    return tuple(HalfInt(t) for t in range(-j.twice, j.twice + 1, 2))


@dataclass(frozen=True)
class SpinState:
    """A (2j+1)-component complex amplitude vector with its spin label.

    Amplitudes are stored verbatim; nothing normalizes implicitly.
    """

    j: HalfInt
    amplitudes: tuple[complex, ...]

    def __post_init__(self) -> None:
        check_spin_label(self.j)
        amps = tuple(complex(a) for a in self.amplitudes)
        if len(amps) != dimension(self.j):
            raise DimensionMismatch(
                f"spin {self.j} needs {dimension(self.j)} amplitudes, got {len(amps)}"
            )
        if not all(cmath.isfinite(a) for a in amps):
            raise NonFinite("state amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=complex)


def make_state(j: HalfInt, amplitudes: Sequence[complex]) -> SpinState:
    """Build a state from a length-(2j+1) amplitude sequence, m ascending."""
    return SpinState(j, tuple(amplitudes))


def basis_state(j: HalfInt, m: HalfInt) -> SpinState:
    check_pair(j, m)
    amps = [0j] * dimension(j)
    amps[(m.twice + j.twice) // 2] = 1.0 + 0j
    return SpinState(j, tuple(amps))


def norm(u: SpinState) -> float:
    return float(np.linalg.norm(u.vector))


def normalize(u: SpinState) -> SpinState:
    n = norm(u)
    if n == 0.0:
        raise ZeroVector("cannot normalize the zero state")
    return SpinState(u.j, tuple(a / n for a in u.amplitudes))


def inner(u: SpinState, v: SpinState) -> complex:
    """Inner product, conjugate-linear in the first argument."""
    if u.j != v.j:
        raise SpinMismatch(f"spins differ: {u.j} vs {v.j}")
    return complex(np.vdot(u.vector, v.vector))


def random_haar_state(j: HalfInt, seed: int) -> SpinState:
    """Unit state drawn from the unitarily invariant distribution.

    Components are iid standard complex Gaussians, then normalized;
    deterministic for a given seed.
    """
    check_spin_label(j)
    rng = np.random.default_rng(int(seed))
    z = rng.standard_normal(dimension(j)) + 1j * rng.standard_normal(dimension(j))
    return normalize(SpinState(j, tuple(z)))


@dataclass(frozen=True)
class EulerAngles:
    """zyz rotation angles: phi in [0, 2pi), theta in [0, pi], psi in [0, 2pi)."""

    phi: float
    theta: float
    psi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "psi", float(self.psi))
        if not (0.0 <= self.phi < TWO_PI):
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi}")
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.psi < TWO_PI):
            raise DomainError(f"psi must lie in [0, 2pi), got {self.psi}")

    @classmethod
    def identity(cls) -> "EulerAngles":
        return cls(0.0, 0.0, 0.0)


def random_euler_angles(seed: int) -> EulerAngles:
    """Rotation drawn from the invariant measure (uniform phi, psi; uniform cos theta)."""
    rng = np.random.default_rng(int(seed))
    phi = rng.uniform(0.0, TWO_PI)
    theta = math.acos(rng.uniform(-1.0, 1.0))
    psi = rng.uniform(0.0, TWO_PI)
    return EulerAngles(phi, theta, psi)


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature over (cos theta, phi): Gauss nodes in x, uniform phi."""

    x_nodes: tuple[float, ...]
    x_weights: tuple[float, ...]
    n_phi: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_nodes", tuple(float(x) for x in self.x_nodes))
        object.__setattr__(self, "x_weights", tuple(float(w) for w in self.x_weights))
        object.__setattr__(self, "n_phi", int(self.n_phi))
        if self.n_phi < 2 or len(self.x_nodes) < 2:
            raise BadGridSize("grid needs n_theta >= 2 and n_phi >= 2")
        if len(self.x_nodes) != len(self.x_weights):
            raise DimensionMismatch("x_nodes and x_weights lengths differ")
        xs = self.x_nodes
        if any(not (-1.0 < x < 1.0) for x in xs):
            raise DomainError("x nodes must lie strictly inside (-1, 1)")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("x nodes must be strictly increasing")
        if any(w <= 0.0 for w in self.x_weights):
            raise DomainError("x weights must be positive")
        if abs(math.fsum(self.x_weights) - 2.0) > 1e-13:
            raise DomainError("x weights must sum to 2 (weight of the constant)")

    @property
    def n_theta(self) -> int:
        return len(self.x_nodes)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_phi)


def gauss_legendre_grid(n_theta: int, n_phi: int) -> SphereGrid:
    """Gauss-Legendre rule in x = cos theta times a uniform phi grid."""
    if int(n_theta) < 2 or int(n_phi) < 2:
        raise BadGridSize(f"need n_theta >= 2 and n_phi >= 2, got ({n_theta}, {n_phi})")
    x, w = np.polynomial.legendre.leggauss(int(n_theta))
    return SphereGrid(tuple(x), tuple(w), int(n_phi))


def state_to_dict(u: SpinState) -> dict:
    """JSON-ready form: {"two_j": int, "amplitudes": [[re, im], ...]}, m ascending."""
    return {
        "two_j": u.j.twice,
        "amplitudes": [[a.real, a.imag] for a in u.amplitudes],
    }


def state_from_dict(data: dict) -> SpinState:
    if not isinstance(data, dict):
        raise DomainError("state document must be a JSON object")
    try:
        two_j = data["two_j"]
        raw = data["amplitudes"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"state document missing field: {exc}") from exc
    if isinstance(two_j, bool) or not isinstance(two_j, int):
        raise DomainError("two_j must be an integer")
    amps = []
    for entry in raw:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise DomainError("each amplitude must be a [re, im] pair")
        amps.append(complex(float(entry[0]), float(entry[1])))
    return SpinState(spin(two_j), tuple(amps))
