"""Entanglement and coherence measures for two-qubit states.

Concurrence follows Wootters: with the spin-flipped state
``rho_tilde = (sy x sy) rho^* (sy x sy)`` and ``lambda_i`` the eigenvalues of
``rho @ rho_tilde`` in decreasing order,
``C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))``.

``rho @ rho_tilde`` is not Hermitian.  Its spectrum equals that of the
Hermitian PSD matrix ``H = sqrt(rho) rho_tilde sqrt(rho)``, and
``H = A A^dagger`` with ``A = sqrt(rho) (sy x sy) sqrt(rho)^*``.  The square
roots ``sqrt(lambda_i)`` are therefore the singular values of ``A``, which we
compute directly instead of squaring and re-rooting (that round trip turns
1e-17 eigenvalue noise into 3e-9 concurrence noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channels import ChannelKind, NoiseRates, channel_params, apply_closed_form
from .qmat import (
    PSD_TOL,
    SIGMA_YY,
    as_pure_state,
    check_density,
    eigh_jacobi,
    partial_trace,
    pure_density,
    sqrtm_psd,
)

__all__ = [
    "ConcurrenceResult",
    "Timescales",
    "DisentanglementResult",
    "ALL_PAIRS",
    "spin_flip",
    "concurrence",
    "pure_concurrence",
    "fidelity_pure",
    "fidelity_one_qubit_A",
    "reduced_coherence",
    "decay_rates",
    "timescales",
    "support_of",
    "disentanglement_time",
]

ALL_PAIRS = frozenset((i, j) for i in range(1, 5) for j in range(i + 1, 5))


@dataclass(frozen=True)
class ConcurrenceResult:
    C: float
    lambdas: tuple[float, float, float, float]

    def __float__(self) -> float:
        return self.C


def spin_flip(rho) -> np.ndarray:
    """``(sigma_y x sigma_y) rho^* (sigma_y x sigma_y)``, conjugating in the standard basis."""
    rho = np.asarray(rho, dtype=np.complex128)
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def _clamp_lambdas(lam: np.ndarray) -> np.ndarray:
    lam = np.sort(np.asarray(lam, dtype=float))[::-1]
    if lam[-1] < -PSD_TOL:
        raise ArithmeticError(f"negative Wootters eigenvalue {lam[-1]:.3e} beyond tolerance")
    return np.clip(lam, 0.0, None)


def wootters_lambdas(rho, method: str = "svd") -> np.ndarray:
    """Eigenvalues of ``rho @ spin_flip(rho)``, descending.

    ``method="svd"`` squares the singular values of ``sqrt(rho) S sqrt(rho)^*``;
    ``method="hermitian"`` diagonalizes ``H = sqrt(rho) rho_tilde sqrt(rho)``
    with the Jacobi solver.  Both give the same spectrum; the first is more
    accurate for nearly rank-deficient states.
    """
    rho = check_density(rho, dim=4)
    root = sqrtm_psd(rho)
    if method == "svd":
        sv = np.linalg.svd(root @ SIGMA_YY @ root.conj(), compute_uv=False)
        return np.sort(sv)[::-1] ** 2
    if method == "hermitian":
        h = root @ spin_flip(rho) @ root
        return _clamp_lambdas(eigh_jacobi(h)[0])
    raise ValueError(f"unknown method {method!r}")


def concurrence(rho, method: str = "svd") -> ConcurrenceResult:
    """Wootters concurrence of a two-qubit density matrix."""
    lam = wootters_lambdas(rho, method)
    roots = np.sqrt(lam)
    c = max(0.0, float(roots[0] - roots[1] - roots[2] - roots[3]))
    return ConcurrenceResult(min(c, 1.0), tuple(float(x) for x in lam))


def pure_concurrence(psi) -> float:
    """``2 |a1 a4 - a2 a3|`` for a normalized pure state."""
    a = as_pure_state(psi)
    return float(2.0 * abs(a[0] * a[3] - a[1] * a[2]))


def fidelity_pure(psi, rho_out) -> float:
    """``<psi| rho_out |psi>`` for a pure input state."""
    a = as_pure_state(psi)
    rho_out = check_density(rho_out, dim=4)
    f = float(np.vdot(a, rho_out @ a).real)
    return min(max(f, 0.0), 1.0)


def fidelity_one_qubit_A(psi, gamma_A: float) -> float:
    """Closed-form input/output fidelity of a pure state under the qubit-A channel."""
    p = np.abs(as_pure_state(psi)) ** 2
    return float(
        np.sum(p ** 2)
        + 2 * gamma_A * (p[0] * p[3] + p[1] * p[2])
        + 2 * gamma_A * (p[0] * p[2] + p[1] * p[3])
        + 2 * (p[0] * p[1] + p[2] * p[3])
    )


def reduced_coherence(rho_t, qubit: str = "A") -> complex:
    """Off-diagonal element ``s_12`` of the reduced state of ``qubit``."""
    return complex(partial_trace(rho_t, keep=qubit)[0, 1])


def decay_rates(rates: NoiseRates) -> dict[tuple[int, int], float]:
    """Decay rate of each off-diagonal element (1-based pairs) under the two-qubit local channel."""
    ga, gb = rates.Gamma_A, rates.Gamma_B
    return {
        (1, 2): gb / 2, (3, 4): gb / 2,
        (1, 3): ga / 2, (2, 4): ga / 2,
        (1, 4): (ga + gb) / 2, (2, 3): (ga + gb) / 2,
    }


def _inv(rate: float) -> float:
    return math.inf if rate == 0 else 1.0 / rate


@dataclass(frozen=True)
class Timescales:
    """Dephasing and disentanglement timescales.

    ``tau_e`` is ``None`` when both local rates vanish (no local dephasing, so
    no entanglement decay time); ``tau`` is ``None`` for an empty support.
    """

    tau_A: float
    tau_B: float
    tau_e: float | None
    tau: float | None
    Gamma_ij: dict[tuple[int, int], float]
    support: frozenset[tuple[int, int]]


def timescales(rates: NoiseRates, support: Iterable[tuple[int, int]] | None = None) -> Timescales:
    """Local dephasing times, entanglement decay time and mixed dephasing time.

    ``support`` lists the initially populated off-diagonal pairs ``(i, j)``
    (1-based, ``i < j``); the mixed dephasing time is set by the slowest of
    them.  ``None`` means all six pairs.
    """
    pairs = ALL_PAIRS if support is None else frozenset(tuple(sorted(p)) for p in support)
    bad = [p for p in pairs if p not in ALL_PAIRS]
    if bad:
        raise ValueError(f"support pairs must be (i, j) with 1 <= i < j <= 4, got {sorted(bad)}")
    tau_a = _inv(rates.Gamma_A / 2)
    tau_b = _inv(rates.Gamma_B / 2)
    inv_tau_e = rates.Gamma_A / 2 + rates.Gamma_B / 2
    tau_e = None if inv_tau_e == 0 else 1.0 / inv_tau_e
    g = decay_rates(rates)
    tau = max((_inv(g[p]) for p in pairs), default=None)
    return Timescales(tau_a, tau_b, tau_e, tau, g, pairs)


def support_of(rho, tol: float = 1e-14) -> frozenset[tuple[int, int]]:
    """1-based pairs ``(i, j)``, ``i < j``, with ``|rho_ij| > tol``."""
    rho = np.asarray(rho)
    return frozenset(p for p in ALL_PAIRS if abs(rho[p[0] - 1, p[1] - 1]) > tol)


@dataclass(frozen=True)
class DisentanglementResult:
    time: float | None
    crossed: bool
    epsilon: float

    def __str__(self) -> str:
        return f"{self.time!r}" if self.crossed else "no crossing"


def _relevant_rates(kind: ChannelKind, rates: NoiseRates) -> list[float]:
    by_kind = {
        ChannelKind.ONE_QUBIT_A: [rates.Gamma_A],
        ChannelKind.ONE_QUBIT_B: [rates.Gamma_B],
        ChannelKind.TWO_QUBIT_LOCAL: [rates.Gamma_A, rates.Gamma_B],
        ChannelKind.COLLECTIVE: [rates.Gamma],
        ChannelKind.FULL_TWELVE: [rates.Gamma, rates.Gamma_A, rates.Gamma_B],
    }
    return [r for r in by_kind[kind] if r > 0]


def disentanglement_time(
    kind,
    rates: NoiseRates,
    psi0,
    epsilon: float = 1e-6,
    rel_resolution: float = 1e-12,
    grid_points: int = 400,
) -> DisentanglementResult:
    """First time at which the concurrence drops below ``epsilon``.

    A log-spaced scan brackets the first crossing, then bisection narrows
    it to ``rel_resolution``.  No monotonicity is assumed.  If the scan
    horizon passes without a crossing, the result reports ``crossed=False``.
    """
    kind = ChannelKind.parse(kind)
    if not 0 < epsilon <= 0.1:
        raise ValueError(f"epsilon must be in (0, 0.1], got {epsilon!r}")
    rho0 = pure_density(psi0)

    def c_at(t: float) -> float:
        return concurrence(apply_closed_form(kind, channel_params(t, rates), rho0)).C

    c0 = c_at(0.0)
    if c0 <= epsilon:
        raise ValueError(f"initial concurrence {c0:.3e} is not above epsilon={epsilon:g}")
    active = _relevant_rates(kind, rates)
    if not active:
        return DisentanglementResult(None, False, epsilon)

    # Every decay factor is exp(-r t / 2) with r among the active rates, or a
    # power of one; the horizon leaves room for the slowest factor to fall
    # far below epsilon.
    t_lo = 1e-4 / max(active)
    t_hi = 8.0 * (math.log(1.0 / epsilon) + 10.0) / min(active)
    grid = np.concatenate([[0.0], np.geomspace(t_lo, t_hi, grid_points)])

    prev = 0.0
    for t in grid[1:]:
        if c_at(t) < epsilon:
            lo, hi = prev, float(t)
            while hi - lo > rel_resolution * hi:
                mid = 0.5 * (lo + hi)
                if c_at(mid) < epsilon:
                    hi = mid
                else:
                    lo = mid
            return DisentanglementResult(hi, True, epsilon)
        prev = float(t)
    return DisentanglementResult(None, False, epsilon)
