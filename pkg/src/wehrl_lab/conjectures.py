"""Inequality margins, randomized scans, and entropy minimization.

A margin is the slack in one of the inequalities under test: nonnegative
means the inequality holds at that point. Scans are deterministic for a
given seed regardless of thread count; per-sample seeds are derived from
(seed, index) and the reductions run in index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from .closed_forms import harmonic_number, log_beta
from .errors import BadExponent, DomainError, ZeroVector
from .spin_core import (
    HalfInt,
    SphereGrid,
    SpinState,
    check_spin_label,
    dimension,
    gauss_legendre_grid,
    norm,
    normalize,
    random_haar_state,
    state_from_dict,
    state_to_dict,
)
from .sphere_quadrature import (
    _check_supported,
    classical_entropy_direct,
    default_grid,
    husimi_q,
    moment_integral,
    _grid_arrays,
    _q_grid,
)

VIOLATION_TOLERANCE = 1e-6


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence((int(seed), int(index))).generate_state(1, np.uint64)[0])


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("WEHRL_LAB_THREADS")
    return max(1, int(env)) if env else 1


def lieb_margin(u: SpinState, grid: SphereGrid | None = None) -> float:
    """Classical entropy minus its conjectured floor 2j/(2j+1).

    Zero exactly on coherent states, positive elsewhere; invariant under
    rescaling of u.
    """
    s = classical_entropy_direct(u, +1, grid)
    return s - u.j.twice / (u.j.twice + 1.0)


def generalized_margin(u: SpinState, p: float, grid: SphereGrid | None = None) -> float:
    """(2j+1)/(2pj+1) minus the p-moment; conjectured nonnegative for p >= 1."""
    p = float(p)
    if p < 1.0:
        raise BadExponent(f"margin is defined for p >= 1, got {p}")
    bound = (u.j.twice + 1.0) / (p * u.j.twice + 1.0)
    return bound - moment_integral(u, p, +1, grid).value


def harmonic_margin(k: int, j: int) -> float:
    """Slack of k(H_{k+j}-H_k) + j(H_{k+j}-H_j) >= ln binom(k+j, k).

    Harmonic sums are exact rationals; the single float conversion happens
    at the end. Symmetric in (k, j); zero when either argument is zero.
    """
    if isinstance(k, bool) or isinstance(j, bool):
        raise DomainError("arguments must be plain integers")
    if not isinstance(k, (int, np.integer)) or not isinstance(j, (int, np.integer)):
        raise DomainError(f"arguments must be integers, got ({k!r}, {j!r})")
    if k < 0 or j < 0:
        raise DomainError(f"arguments must be nonnegative, got ({k}, {j})")
    h_top = harmonic_number(k + j)
    lhs = k * (h_top - harmonic_number(k)) + j * (h_top - harmonic_number(j))
    return float(lhs) - math.log(math.comb(k + j, k))


def beta_margin(a: float, b: float, p: float) -> float:
    """Log-domain slack of ((a+b)p+1) B(ap+1, bp+1) <= ((a+b+1) B(a+1, b+1))^p.

    Proven nonnegative on the diagonal a = b (Jensen); off the diagonal the
    values are conjecture data, not asserted facts.
    """
    a, b, p = float(a), float(b), float(p)
    if a < 0.0 or b < 0.0:
        raise DomainError(f"need a, b >= 0, got ({a}, {b})")
    if p < 1.0:
        raise DomainError(f"need p >= 1, got {p}")
    lhs = math.log((a + b) * p + 1.0) + log_beta(a * p + 1.0, b * p + 1.0)
    rhs = p * (math.log(a + b + 1.0) + log_beta(a + 1.0, b + 1.0))
    return rhs - lhs


def jensen_identity_check(b: float) -> float:
    """|quadrature - closed form| for the cosine-power Beta identity

        1 / ((2b+1) B(b+1, b+1)) = 2^{2b}/pi * Int_{-pi/2}^{pi/2} cos(phi)^{2b} dphi.
    """
    b = float(b)
    if b < 0.0:
        raise DomainError(f"need b >= 0, got {b}")
    integral, _ = integrate.quad(
        lambda phi: math.cos(phi) ** (2.0 * b),
        -math.pi / 2.0,
        math.pi / 2.0,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    lhs = 2.0 ** (2.0 * b) / math.pi * integral
    rhs = math.exp(-math.log(2.0 * b + 1.0) - log_beta(b + 1.0, b + 1.0))
    return abs(lhs - rhs)


def _fold_angles(theta: float, phi: float) -> tuple[float, float]:
    theta = theta % (2.0 * math.pi)
    if theta > math.pi:
        theta = 2.0 * math.pi - theta
        phi = phi + math.pi
    return theta, phi % (2.0 * math.pi)


def coherence_witness(u: SpinState, grid: SphereGrid | None = None) -> float:
    """Peak of the normalized overlap density: 1 exactly iff u is coherent.

    The grid maximum is polished by a local simplex ascent around the best
    node; angles are folded back into range, so the ascent is unconstrained.
    """
    grid = grid or default_grid()
    un = normalize(u)
    vec = un.vector
    q = _q_grid(vec, u.j.twice, grid, +1)
    _, _, theta_nodes, phi_nodes = _grid_arrays(grid)
    i, k = np.unravel_index(int(np.argmax(q)), q.shape)
    best = float(q[i, k])

    def neg_q(x: np.ndarray) -> float:
        th, ph = _fold_angles(float(x[0]), float(x[1]))
        return -husimi_q(un, th, ph, +1)

    res = optimize.minimize(
        neg_q,
        x0=np.array([theta_nodes[i], phi_nodes[k]]),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400},
    )
    return max(best, float(-res.fun))


@dataclass(frozen=True)
class Violation:
    """A margin below -tolerance that survived one grid refinement."""

    state: SpinState
    p: float | None  # None marks the entropy margin
    margin: float


@dataclass(frozen=True)
class ScanReport:
    """Outcome of a randomized margin scan, reproducible from (seed, parameters)."""

    j: HalfInt
    p_values: tuple[float, ...]
    sample_count: int
    seed: int
    min_margin: float
    argmin_state: SpinState
    grid: tuple[int, int]
    violations: tuple[Violation, ...]

    def to_dict(self) -> dict:
        return {
            "two_j": self.j.twice,
            "p_values": list(self.p_values),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "min_margin": self.min_margin,
            "argmin_state": state_to_dict(self.argmin_state),
            "grid": list(self.grid),
            "violations": [
                {
                    "state": state_to_dict(v.state),
                    "p": v.p,
                    "margin": v.margin,
                }
                for v in self.violations
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScanReport":
        return cls(
            j=HalfInt(int(data["two_j"])),
            p_values=tuple(float(p) for p in data["p_values"]),
            sample_count=int(data["sample_count"]),
            seed=int(data["seed"]),
            min_margin=float(data["min_margin"]),
            argmin_state=state_from_dict(data["argmin_state"]),
            grid=(int(data["grid"][0]), int(data["grid"][1])),
            violations=tuple(
                Violation(
                    state=state_from_dict(v["state"]),
                    p=None if v["p"] is None else float(v["p"]),
                    margin=float(v["margin"]),
                )
                for v in data["violations"]
            ),
        )


def scan_lieb(
    j: HalfInt,
    count: int,
    seed: int,
    p_list: tuple[float, ...] = (1.5, 2.0, 3.0),
    grid: SphereGrid | None = None,
    tolerance: float = VIOLATION_TOLERANCE,
    threads: int | None = None,
) -> ScanReport:
    """Evaluate the entropy margin and every p-moment margin on Haar samples.

    Any margin below -tolerance is re-checked on a 2x refined grid before it
    counts as a violation, which filters quadrature artifacts. The minimum is
    taken lexicographically on (margin, sample index, margin kind) so thread
    count never changes the report.
    """
    check_spin_label(j)
    if count < 1:
        raise DomainError(f"need count >= 1, got {count}")
    grid = grid or default_grid()
    p_values = tuple(float(p) for p in p_list)

    def evaluate(index: int) -> tuple[SpinState, list[tuple[float | None, float]]]:
        state = random_haar_state(j, _child_seed(seed, index))
        margins: list[tuple[float | None, float]] = [(None, lieb_margin(state, grid))]
        for p in p_values:
            margins.append((p, generalized_margin(state, p, grid)))
        return state, margins

    n_workers = _thread_count(threads)
    if n_workers == 1:
        results = [evaluate(i) for i in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(evaluate, range(count)))

    best_key = None
    best_state = None
    suspects: list[tuple[SpinState, float | None, float]] = []
    for index, (state, margins) in enumerate(results):
        for kind, (p, margin) in enumerate(margins):
            key = (margin, index, kind)
            if best_key is None or key < best_key:
                best_key = key
                best_state = state
            if margin < -tolerance:
                suspects.append((state, p, margin))

    violations = []
    if suspects:
        fine = gauss_legendre_grid(2 * grid.n_theta, 2 * grid.n_phi)
        for state, p, _ in suspects:
            if p is None:
                refined = lieb_margin(state, fine)
            else:
                refined = generalized_margin(state, p, fine)
            if refined < -tolerance:
                violations.append(Violation(state=state, p=p, margin=refined))

    return ScanReport(
        j=j,
        p_values=p_values,
        sample_count=count,
        seed=int(seed),
        min_margin=best_key[0],
        argmin_state=best_state,
        grid=grid.shape,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class MinimizeResult:
    """Best state found, its entropy, and whether the simplex collapsed in budget."""

    state: SpinState
    entropy: float
    converged: bool

    def __iter__(self):
        # unpacks as (state, entropy) for callers that ignore the flag
        return iter((self.state, self.entropy))


def minimize_entropy(
    j: HalfInt,
    restarts: int = 3,
    seed: int = 0,
    grid: SphereGrid | None = None,
) -> MinimizeResult:
    """Simplex descent of the classical entropy over raw re/im amplitudes.

    The objective normalizes internally, so the redundant global phase and
    scale directions are flat and harmless. Each restart starts from a fresh
    Haar sample; the best vertex is then polished with a second descent.
    Budget exhaustion is reported through the flag, never raised.
    """
    check_spin_label(j)
    _check_supported(j)
    if restarts < 1:
        raise DomainError(f"need restarts >= 1, got {restarts}")
    grid = grid or default_grid()
    dim = dimension(j)

    def objective(x: np.ndarray) -> float:
        state = SpinState(j, tuple(x[:dim] + 1j * x[dim:]))
        if norm(state) < 1e-12:
            return float(j.twice)  # above any entropy in range, steers away from 0
        return classical_entropy_direct(state, +1, grid)

    options = {"xatol": 1e-9, "fatol": 1e-12, "maxiter": 800 * dim, "adaptive": True}
    best = None
    for r in range(restarts):
        start = random_haar_state(j, _child_seed(seed, r))
        x0 = np.concatenate([start.vector.real, start.vector.imag])
        res = optimize.minimize(objective, x0, method="Nelder-Mead", options=options)
        if best is None or res.fun < best.fun:
            best = res
    polish = optimize.minimize(
        objective, best.x, method="Nelder-Mead", options=options
    )
    if polish.fun <= best.fun:
        best = polish
    x = best.x
    state = normalize(SpinState(j, tuple(x[:dim] + 1j * x[dim:])))
    return MinimizeResult(
        state=state, entropy=float(best.fun), converged=bool(best.success)
    )
