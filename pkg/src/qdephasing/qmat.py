"""Small dense complex matrices for one- and two-qubit states.

Everything here works on plain ``numpy`` arrays of dtype ``complex128`` with
shape ``(2, 2)`` or ``(4, 4)``.  The two-qubit basis is ordered

    |1> = |++>,  |2> = |+->,  |3> = |-+>,  |4> = |-->

so qubit A is the slow (most significant) index of every Kronecker product.
Indices in the public API are 0-based; ``rho[0, 3]`` is the (1,4) element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "I2",
    "I4",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_YY",
    "BASIS_SIGNS",
    "QubitStateError",
    "ShapeError",
    "ValidationReport",
    "as_matrix",
    "as_pure_state",
    "pure_density",
    "tensor",
    "partial_trace",
    "validate",
    "check_density",
    "eigh_jacobi",
    "sqrtm_psd",
    "basis_index",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12

I2 = np.eye(2, dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

# (s_A, s_B) eigenvalues of sigma_z for each basis state, in basis order.
BASIS_SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=np.int8)


class ShapeError(ValueError):
    """Matrix or vector has the wrong shape for the requested operation."""


class QubitStateError(ValueError):
    """A state failed validation (normalization, Hermiticity, trace, PSD)."""

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


def basis_index(s_a: int, s_b: int) -> int:
    """Return the 0-based basis index of the product state with signs (s_A, s_B)."""
    if s_a not in (1, -1) or s_b not in (1, -1):
        raise ValueError(f"signs must be +1 or -1, got ({s_a}, {s_b})")
    return (0 if s_a == 1 else 2) + (0 if s_b == 1 else 1)


def as_matrix(m, dims=(2, 4)) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix with dimension in ``dims``."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in dims:
        raise ShapeError(f"expected a square matrix of dimension {dims}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf entries")
    return arr


def as_pure_state(a, tol: float = NORM_TOL) -> np.ndarray:
    """Validate four amplitudes ``a_1..a_4`` as a normalized two-qubit pure state."""
    psi = np.asarray(a, dtype=np.complex128).reshape(-1)
    if psi.shape != (4,):
        raise ShapeError(f"a two-qubit pure state needs 4 amplitudes, got {psi.size}")
    if not np.all(np.isfinite(psi)):
        raise QubitStateError("pure state amplitudes contain NaN or Inf")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise QubitStateError(f"pure state is not normalized: sum |a_i|^2 = {norm2!r} (deficit {1.0 - norm2:.3e})")
    return psi


def pure_density(psi) -> np.ndarray:
    """Return ``|psi><psi|`` with ``rho[i, j] = a_i * conj(a_j)``."""
    psi = as_pure_state(psi)
    return np.outer(psi, psi.conj())


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit operators, qubit ``a`` first."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ShapeError(f"tensor expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def partial_trace(rho, keep: str = "A") -> np.ndarray:
    """Reduced state of one qubit.

    ``keep="A"`` traces out B and returns ``s^A`` with
    ``s^A[0, 1] = rho[0, 2] + rho[1, 3]``; ``keep="B"`` traces out A and returns
    ``s^B`` with ``s^B[0, 1] = rho[0, 1] + rho[2, 3]``.
    """
    rho = check_density(rho, dim=4)
    r = rho.reshape(2, 2, 2, 2)  # (a, b, a', b')
    keep = keep.upper()
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of the density-matrix invariants and the resulting verdict."""

    dim: int
    hermiticity_residual: float
    trace_residual: float
    min_eigenvalue: float
    failures: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed


def validate(rho) -> ValidationReport:
    """Check Hermiticity, unit trace and positivity without modifying ``rho``.

    Never raises for bad *values*; a malformed shape is reported as a failure
    too, so callers can always inspect the returned report.
    """
    arr = np.asarray(rho)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in (2, 4):
        return ValidationReport(0, np.inf, np.inf, -np.inf, ("shape",))
    arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        return ValidationReport(arr.shape[0], np.inf, np.inf, -np.inf, ("finite",))

    herm = float(np.max(np.abs(arr - arr.conj().T)))
    tr = float(abs(np.trace(arr) - 1.0))
    hpart = 0.5 * (arr + arr.conj().T)
    min_eig = float(eigh_jacobi(hpart)[0][0])

    failures = []
    if herm > HERMITIAN_TOL:
        failures.append("hermitian")
    if tr > TRACE_TOL:
        failures.append("trace")
    if min_eig < -PSD_TOL:
        failures.append("psd")
    return ValidationReport(arr.shape[0], herm, tr, min_eig, tuple(failures))


def check_density(rho, dim: int | None = None) -> np.ndarray:
    """Return ``rho`` as an array if it is a valid density matrix, else raise."""
    arr = as_matrix(rho)
    if dim is not None and arr.shape[0] != dim:
        raise ShapeError(f"expected a {dim}x{dim} density matrix, got {arr.shape}")
    report = validate(arr)
    if not report.passed:
        raise QubitStateError(
            f"invalid density matrix ({', '.join(report.failures)}): "
            f"hermiticity={report.hermiticity_residual:.3e} "
            f"trace={report.trace_residual:.3e} min_eig={report.min_eigenvalue:.3e}",
            report,
        )
    return arr


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def eigh_jacobi(h, tol: float = 1e-14, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small complex Hermitian matrix by cyclic Jacobi.

    Returns ``(w, v)`` with ``w`` ascending and ``h @ v[:, k] = w[k] * v[:, k]``.
    Iterates until the off-diagonal Frobenius norm is at most
    ``tol * ||h||_F`` (and never above 1e-12 in absolute terms).

    Exact zeros in ``h`` that decouple a block stay exactly zero, which keeps
    structurally rank-deficient states exactly rank-deficient.
    """
    a = np.array(h, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError(f"expected a square matrix, got {a.shape}")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    scale = float(np.sqrt(np.sum(np.abs(a) ** 2)))
    stop = min(tol * scale, 1e-12)

    for _ in range(max_sweeps):
        if _off_norm(a) <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if r < 1e-300 or (abs(app) + 100 * r == abs(app) and abs(aqq) + 100 * r == abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                # Phase e^{-i phi} on column q makes the pivot real and positive,
                # then an ordinary real Jacobi rotation annihilates it.
                phase = apq / r
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                jpp, jpq = c, s
                jqp, jqq = -s * phase.conjugate(), c * phase.conjugate()

                # a <- a @ J (columns p, q)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * jpp + col_q * jqp
                a[:, q] = col_p * jpq + col_q * jqq
                # a <- J^dagger @ a (rows p, q)
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(jpp) * row_p + np.conj(jqp) * row_q
                a[q, :] = np.conj(jpq) * row_p + np.conj(jqq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * jpp + vq * jqp
                v[:, q] = vp * jpq + vq * jqq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def sqrtm_psd(rho, zero_tol: float = 1e-14) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues with magnitude at most ``zero_tol`` are rounding noise of the
    eigensolver and are treated as exact zeros.
    """
    w, v = eigh_jacobi(rho)
    if w[0] < -PSD_TOL:
        raise QubitStateError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    root = np.where(w > zero_tol, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return (v * root) @ v.conj().T
