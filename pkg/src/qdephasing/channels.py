"""Dephasing channels on two qubits in operator-sum form.

Three independent classical white-noise fields dephase the pair: a field
``B(t)`` coupling to both qubits (rate ``Gamma``) and local fields ``b_A(t)``,
``b_B(t)`` (rates ``Gamma_A``, ``Gamma_B``).  Every Kraus operator built here
is diagonal and real, so ``K = K^dagger = K^*`` and the channels commute.

Kinds
-----
``A``     one-qubit local channel on A, Kraus set {E1, E2}
``B``     one-qubit local channel on B, Kraus set {F1, F2}
``AB``    two-qubit local channel, {E1F1, E1F2, E2F1, E2F2}
``D``     collective channel, {D1, D2, D3}
``full``  all three fields at once, the twelve products F_i E_j D_k
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .qmat import I2, I4, ShapeError, check_density, tensor

__all__ = [
    "ChannelKind",
    "NoiseRates",
    "ChannelParams",
    "KrausChannel",
    "ChannelConstructionError",
    "channel_params",
    "build_kraus",
    "apply",
    "damping_mask",
    "apply_closed_form",
    "evolve",
]

COMPLETENESS_TOL = 1e-12


class ChannelKind(str, enum.Enum):
    ONE_QUBIT_A = "A"
    ONE_QUBIT_B = "B"
    TWO_QUBIT_LOCAL = "AB"
    COLLECTIVE = "D"
    FULL_TWELVE = "full"

    @classmethod
    def parse(cls, value) -> "ChannelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        aliases = {"a": "A", "b": "B", "ab": "AB", "d": "D", "collective": "D", "full": "full", "twelve": "full"}
        try:
            return cls(aliases.get(key.lower(), key))
        except ValueError:
            raise ValueError(f"unknown channel kind {value!r}; expected one of A, B, AB, D, full") from None


class ChannelConstructionError(RuntimeError):
    """A Kraus set failed its completeness check."""


@dataclass(frozen=True)
class NoiseRates:
    """Dephasing rates of the collective field and the two local fields (1/time).

    The gyromagnetic ratio drops out of every observable, so rates are given
    directly.  A zero rate means the corresponding field is switched off.
    """

    Gamma: float = 0.0
    Gamma_A: float = 0.0
    Gamma_B: float = 0.0

    def __post_init__(self):
        for name in ("Gamma", "Gamma_A", "Gamma_B"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {value!r}")
            object.__setattr__(self, name, value)

    @staticmethod
    def _time(rate: float) -> float:
        return math.inf if rate == 0 else 1.0 / rate

    @property
    def T2(self) -> float:
        return self._time(self.Gamma)

    @property
    def T2_A(self) -> float:
        return self._time(self.Gamma_A)

    @property
    def T2_B(self) -> float:
        return self._time(self.Gamma_B)


@dataclass(frozen=True)
class ChannelParams:
    """Time-dependent Kraus parameters at elapsed time ``t``."""

    t: float
    gamma_A: float
    gamma_B: float
    omega_A: float
    omega_B: float
    gamma: float
    omega_1: float
    omega_2: float
    omega_3: float


def _decay(rate: float, t: float) -> tuple[float, float]:
    # (e^{-rate t / 2}, sqrt(1 - e^{-rate t})); expm1 keeps omega accurate at small t
    if rate == 0.0 or t == 0.0:
        return 1.0, 0.0
    return math.exp(-0.5 * rate * t), math.sqrt(-math.expm1(-rate * t))


def channel_params(t: float, rates: NoiseRates) -> ChannelParams:
    """Evaluate every gamma/omega parameter at time ``t``."""
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"elapsed time must be finite and >= 0, got {t!r}")
    gamma_a, omega_a = _decay(rates.Gamma_A, t)
    gamma_b, omega_b = _decay(rates.Gamma_B, t)
    gamma, omega_1 = _decay(rates.Gamma, t)
    if omega_1 == 0.0:
        omega_2 = omega_3 = 0.0
    else:
        e1 = gamma * gamma
        omega_2 = -e1 * omega_1
        omega_3 = math.sqrt(-math.expm1(-rates.Gamma * t) * -math.expm1(-2.0 * rates.Gamma * t))
    return ChannelParams(t, gamma_a, gamma_b, omega_a, omega_b, gamma, omega_1, omega_2, omega_3)


@dataclass(frozen=True)
class KrausChannel:
    kind: ChannelKind
    operators: tuple[np.ndarray, ...]
    params: ChannelParams
    completeness_residual: float

    def __len__(self) -> int:
        return len(self.operators)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


def _local_ops(p: ChannelParams):
    e1 = tensor(np.diag([1.0, p.gamma_A]), I2)
    e2 = tensor(np.diag([0.0, p.omega_A]), I2)
    f1 = tensor(I2, np.diag([1.0, p.gamma_B]))
    f2 = tensor(I2, np.diag([0.0, p.omega_B]))
    return (e1, e2), (f1, f2)


def _collective_ops(p: ChannelParams):
    d1 = np.diag([p.gamma, 1.0, 1.0, p.gamma]).astype(np.complex128)
    d2 = np.diag([p.omega_1, 0.0, 0.0, p.omega_2]).astype(np.complex128)
    d3 = np.diag([0.0, 0.0, 0.0, p.omega_3]).astype(np.complex128)
    return d1, d2, d3


def completeness_residual(operators) -> float:
    total = sum(k.conj().T @ k for k in operators)
    return float(np.max(np.abs(total - I4)))


def build_kraus(kind, params: ChannelParams) -> KrausChannel:
    """Materialize the Kraus set of ``kind`` and certify ``sum K^dag K = I``."""
    kind = ChannelKind.parse(kind)
    (e1, e2), (f1, f2) = _local_ops(params)
    if kind is ChannelKind.ONE_QUBIT_A:
        ops = (e1, e2)
    elif kind is ChannelKind.ONE_QUBIT_B:
        ops = (f1, f2)
    elif kind is ChannelKind.TWO_QUBIT_LOCAL:
        ops = (e1 @ f1, e1 @ f2, e2 @ f1, e2 @ f2)
    elif kind is ChannelKind.COLLECTIVE:
        ops = _collective_ops(params)
    else:
        ds = _collective_ops(params)
        ops = tuple(f @ e @ d for f, e, d in itertools.product((f1, f2), (e1, e2), ds))

    for k in ops:
        if not (np.array_equal(k, k.conj().T) and np.array_equal(k, k.conj())):
            raise ChannelConstructionError(f"{kind.value}: Kraus operator is not real symmetric")
    residual = completeness_residual(ops)
    if residual > COMPLETENESS_TOL:
        raise ChannelConstructionError(
            f"{kind.value} at t={params.t!r}: completeness residual {residual:.3e} exceeds {COMPLETENESS_TOL:g}"
        )
    return KrausChannel(kind, ops, params, residual)


def apply(ch: KrausChannel, rho0) -> np.ndarray:
    """Operator-sum action ``sum_mu K_mu rho K_mu^dagger``."""
    rho0 = check_density(rho0, dim=4)
    out = np.zeros((4, 4), dtype=np.complex128)
    for k in ch.operators:
        if k.shape != (4, 4):
            raise ShapeError(f"Kraus operator has shape {k.shape}, expected (4, 4)")
        out += k @ rho0 @ k.conj().T
    return out


def damping_mask(kind, params: ChannelParams) -> np.ndarray:
    """Real 4x4 matrix of elementwise damping factors, ``rho(t) = mask * rho(0)``."""
    kind = ChannelKind.parse(kind)
    ga, gb, g = params.gamma_A, params.gamma_B, params.gamma
    if kind is ChannelKind.ONE_QUBIT_A:
        return np.array([
            [1, 1, ga, ga],
            [1, 1, ga, ga],
            [ga, ga, 1, 1],
            [ga, ga, 1, 1],
        ])
    if kind is ChannelKind.ONE_QUBIT_B:
        return np.array([
            [1, gb, 1, gb],
            [gb, 1, gb, 1],
            [1, gb, 1, gb],
            [gb, 1, gb, 1],
        ])
    gab = ga * gb
    local = np.array([
        [1, gb, ga, gab],
        [gb, 1, gab, ga],
        [ga, gab, 1, gb],
        [gab, ga, gb, 1],
    ])
    if kind is ChannelKind.TWO_QUBIT_LOCAL:
        return local
    g4 = g ** 4
    collective = np.array([
        [1, g, g, g4],
        [g, 1, 1, g],
        [g, 1, 1, g],
        [g4, g, g, 1],
    ])
    if kind is ChannelKind.COLLECTIVE:
        return collective
    return local * collective


def apply_closed_form(kind, params: ChannelParams, rho0) -> np.ndarray:
    """Explicit elementwise solution; agrees with :func:`apply` of :func:`build_kraus`."""
    rho0 = check_density(rho0, dim=4)
    return damping_mask(kind, params) * rho0


def evolve(kind, rates: NoiseRates, t: float, rho0) -> np.ndarray:
    """Convenience: closed-form state at time ``t`` under ``kind``."""
    return apply_closed_form(kind, channel_params(t, rates), rho0)
