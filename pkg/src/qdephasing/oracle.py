"""Monte Carlo ground truth for the dephasing channels.

Each trajectory evolves under the diagonal stochastic Hamiltonian

    H(t) = -(1/2) [ B(t) (sz_A + sz_B) + b_A(t) sz_A + b_B(t) sz_B ]

with independent white-noise fields.  Because ``H`` is diagonal, the
propagator is ``U = diag(exp(i phi_k))`` with phases set by the time
integrals of the fields, which are exactly Gaussian:

    X ~ N(0, Gamma t),  Y_A ~ N(0, Gamma_A t),  Y_B ~ N(0, Gamma_B t)
    phi_k = [ (s_A + s_B) X + s_A Y_A + s_B Y_B ] / 2

so one Gaussian triple per trajectory samples the state at time ``t`` with
no discretization error.  Averaging ``U rho0 U^dagger`` over trajectories
recovers the closed-form channels independently of any Kraus algebra.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import ChannelKind, NoiseRates, apply_closed_form, channel_params
from .metrics import concurrence
from .qmat import BASIS_SIGNS, as_matrix, check_density, pure_density
from .rng import counter_normals

__all__ = [
    "MIN_TRAJECTORIES",
    "Z_THRESHOLD",
    "TrajectoryEnsemble",
    "OracleRow",
    "OracleReport",
    "trajectory_phases",
    "sample_trajectory",
    "phase_paths",
    "ensemble_average",
    "ensemble_series",
    "oracle_report",
]

MIN_TRAJECTORIES = 100
Z_THRESHOLD = 5.0
_MAX_BATCH = 50_000
_MIN_BATCHES = 20
_ROUNDING_FLOOR = 1e-12
# Counters 0..3 hold the single-draw triple; stepped paths start after them.
_PATH_OFFSET = 4

_SA = BASIS_SIGNS[:, 0].astype(float)
_SB = BASIS_SIGNS[:, 1].astype(float)


def _initial_density(state) -> np.ndarray:
    arr = np.asarray(state)
    if arr.ndim == 1:
        return pure_density(arr)
    return check_density(as_matrix(arr), dim=4)


def trajectory_phases(z: np.ndarray, t: float, rates: NoiseRates) -> np.ndarray:
    """Basis-state phases from standard normals ``z[..., 0:3]``; returns shape ``(..., 4)``."""
    if t < 0:
        raise ValueError(f"elapsed time must be >= 0, got {t!r}")
    x = math.sqrt(rates.Gamma * t) * z[..., 0:1]
    ya = math.sqrt(rates.Gamma_A * t) * z[..., 1:2]
    yb = math.sqrt(rates.Gamma_B * t) * z[..., 2:3]
    return 0.5 * ((_SA + _SB) * x + _SA * ya + _SB * yb)


def _conjugate(rho0: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # U rho0 U^dagger with U = diag(exp(i phi)): rho_jk * exp(i (phi_j - phi_k))
    # exponentiating the differences keeps the diagonal factors exactly 1
    return rho0 * np.exp(1j * (phi[..., :, None] - phi[..., None, :]))


def sample_trajectory(psi0, t: float, rates: NoiseRates, seed: int, index: int) -> np.ndarray:
    """Density matrix of trajectory ``index`` at time ``t``; deterministic in (seed, index)."""
    rho0 = _initial_density(psi0)
    z = counter_normals(seed, [index], 3)[0]
    return _conjugate(rho0, trajectory_phases(z, float(t), rates))


def phase_paths(seed: int, indices, times: Sequence[float], rates: NoiseRates) -> np.ndarray:
    """Correlated phase time series built from independent Gaussian increments.

    Returns shape ``(len(indices), len(times), 4)``.  ``times`` must be
    non-decreasing and start at or after 0.  The marginal distribution at each
    time equals that of :func:`trajectory_phases`; the draws differ.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-decreasing sequence of non-negative values")
    dt = np.diff(np.concatenate([[0.0], times]))
    indices = np.atleast_1d(indices)
    # four counters (three normals, padded to a Box-Muller pair) per step
    z = counter_normals(seed, indices, 4 * len(times), offset=_PATH_OFFSET).reshape(len(indices), len(times), 4)
    scale = np.sqrt(np.array([rates.Gamma, rates.Gamma_A, rates.Gamma_B])[None, :] * dt[:, None])
    increments = z[..., :3] * scale[None, :, :]
    w = np.cumsum(increments, axis=1)
    x, ya, yb = w[..., 0:1], w[..., 1:2], w[..., 2:3]
    return 0.5 * ((_SA + _SB) * x + _SA * ya + _SB * yb)


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Ensemble mean of ``U rho0 U^dagger`` with per-element standard errors.

    ``stderr_re``/``stderr_im`` are the standard errors of the real and
    imaginary parts of each mean element.  ``batch_means`` holds the means of
    the fixed, contiguous trajectory batches used for the reduction.
    """

    n: int
    t: float
    mean: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    batch_means: np.ndarray = field(repr=False)
    batch_sizes: np.ndarray = field(repr=False)

    @property
    def stderr(self) -> np.ndarray:
        return np.hypot(self.stderr_re, self.stderr_im)

    def z_scores(self, expected) -> tuple[np.ndarray, np.ndarray]:
        """Elementwise (real, imaginary) z-scores of ``mean`` against ``expected``."""
        diff = self.mean - np.asarray(expected, dtype=np.complex128)
        return _zscore(diff.real, self.stderr_re), _zscore(diff.imag, self.stderr_im)


def _zscore(diff: np.ndarray, se: np.ndarray) -> np.ndarray:
    # elements with no spread are deterministic: they must agree to rounding
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(diff) / se
    exact = np.where(np.abs(diff) <= _ROUNDING_FLOOR, 0.0, np.inf)
    return np.where(se > _ROUNDING_FLOOR, z, exact)


def _batches(n: int) -> list[np.ndarray]:
    count = max(_MIN_BATCHES, -(-n // _MAX_BATCH))
    return np.array_split(np.arange(n, dtype=np.int64), count)


def _batch_moments(rho0, times, rates, seed, idx):
    z = counter_normals(seed, idx, 3)
    out = []
    for t in times:
        samples = _conjugate(rho0, trajectory_phases(z, t, rates))
        mean = samples.mean(axis=0)
        dev = samples - mean
        out.append((mean, (dev.real ** 2).sum(axis=0), (dev.imag ** 2).sum(axis=0)))
    return out


def ensemble_series(psi0, times: Sequence[float], rates: NoiseRates, n: int, seed: int, workers: int = 1):
    """:func:`ensemble_average` at several times, sharing the per-trajectory draws."""
    if n < MIN_TRAJECTORIES:
        raise ValueError(f"refusing an ensemble of {n} trajectories; at least {MIN_TRAJECTORIES} are needed")
    rho0 = _initial_density(psi0)
    times = [float(t) for t in times]
    batches = _batches(int(n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            moments = list(pool.map(lambda idx: _batch_moments(rho0, times, rates, seed, idx), batches))
    else:
        moments = [_batch_moments(rho0, times, rates, seed, idx) for idx in batches]

    sizes = np.array([len(b) for b in batches])
    w = sizes[:, None, None]
    results = []
    for k, t in enumerate(times):
        # fixed batch order keeps the reduction bit-reproducible
        means = np.array([m[k][0] for m in moments])
        mean = (w * means).sum(axis=0) / n
        # Chan et al. pairwise combination of the per-batch squared deviations
        m2_re = sum(m[k][1] for m in moments) + (w * (means.real - mean.real) ** 2).sum(axis=0)
        m2_im = sum(m[k][2] for m in moments) + (w * (means.imag - mean.imag) ** 2).sum(axis=0)
        results.append(
            TrajectoryEnsemble(
                n=int(n),
                t=t,
                mean=mean,
                stderr_re=np.sqrt(m2_re / (n - 1) / n),
                stderr_im=np.sqrt(m2_im / (n - 1) / n),
                batch_means=means,
                batch_sizes=sizes,
            )
        )
    return results


def ensemble_average(psi0, t: float, rates: NoiseRates, n: int, seed: int, workers: int = 1) -> TrajectoryEnsemble:
    """Mean and standard error of ``n`` independent trajectories at time ``t``."""
    return ensemble_series(psi0, [t], rates, n, seed, workers)[0]


@dataclass(frozen=True)
class OracleRow:
    t: float
    mc_mean: np.ndarray
    closed_form: np.ndarray
    z_re: np.ndarray
    z_im: np.ndarray
    max_z: float
    worst_element: tuple[int, int, str]
    C_mc: float
    C_closed: float
    C_stderr: float

    @property
    def passed(self) -> bool:
        return self.max_z <= Z_THRESHOLD


@dataclass(frozen=True)
class OracleReport:
    rows: list[OracleRow]
    n: int
    seed: int
    rates: NoiseRates

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_z(self) -> float:
        return max(r.max_z for r in self.rows)

    def worst(self) -> OracleRow:
        return max(self.rows, key=lambda r: r.max_z)


def _concurrence_stderr(ens: TrajectoryEnsemble) -> float:
    cs = np.array([concurrence(m).C for m in ens.batch_means])
    w = ens.batch_sizes / ens.batch_sizes.sum()
    mean = np.sum(w * cs)
    # batch-means estimate of the standard error of the full-ensemble concurrence
    var = np.sum(w * (cs - mean) ** 2) / (len(cs) - 1)
    return float(np.sqrt(var))


def oracle_report(psi0, rates: NoiseRates, times: Sequence[float], n: int, seed: int, workers: int = 1) -> OracleReport:
    """Compare Monte Carlo means with the twelve-operator closed form at each time.

    A row passes when every real and imaginary element z-score is at most 5.
    The concurrence columns are informational; near C = 0 the Monte Carlo
    estimate is biased upward by the ``max(0, ...)`` floor.
    """
    rho0 = _initial_density(psi0)
    rows = []
    for ens in ensemble_series(rho0, times, rates, n, seed, workers):
        cf = apply_closed_form(ChannelKind.FULL_TWELVE, channel_params(ens.t, rates), rho0)
        z_re, z_im = ens.z_scores(cf)
        i_re = np.unravel_index(np.argmax(z_re), z_re.shape)
        i_im = np.unravel_index(np.argmax(z_im), z_im.shape)
        if z_re[i_re] >= z_im[i_im]:
            worst = (int(i_re[0]) + 1, int(i_re[1]) + 1, "re")
            max_z = float(z_re[i_re])
        else:
            worst = (int(i_im[0]) + 1, int(i_im[1]) + 1, "im")
            max_z = float(z_im[i_im])
        rows.append(
            OracleRow(
                t=ens.t,
                mc_mean=ens.mean,
                closed_form=cf,
                z_re=z_re,
                z_im=z_im,
                max_z=max_z,
                worst_element=worst,
                C_mc=concurrence(ens.mean).C,
                C_closed=concurrence(cf).C,
                C_stderr=_concurrence_stderr(ens),
            )
        )
    return OracleReport(rows, int(n), int(seed), rates)
