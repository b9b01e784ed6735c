"""Dense complex linear algebra: Hermitian spectra, the two matrix norms, phase-fixed QR.

Everything operates on plain ``numpy`` arrays with ``complex128`` entries.
Matrices may be stacked along leading axes where noted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSample, InvalidMatrix, NumericalFailure


@dataclass(frozen=True)
class Tolerances:
    """Single source of truth for the numerical tolerances used by contracts and tests."""

    hermiticity: float = 1e-12
    unitarity: float = 1e-10
    orthonormality: float = 1e-10
    reconstruction: float = 1e-10
    qr_residual: float = 1e-10
    rank_deficiency: float = 1e-12
    state_norm: float = 1e-12
    density_trace: float = 1e-10
    density_negativity: float = 1e-10


TOL = Tolerances()


class EigenSystem(NamedTuple):
    """Spectral decomposition of a Hermitian matrix, eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def max_abs(a: np.ndarray) -> float:
    """Largest entry magnitude, 0.0 for empty input."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def require_finite(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise InvalidMatrix(f"{what} has non-finite entries")
    return arr


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A†)/2."""
    a = np.asarray(a, dtype=complex)
    return (a + np.conj(np.swapaxes(a, -2, -1))) / 2.0


def require_hermitian(a: np.ndarray, tol: float = TOL.hermiticity) -> np.ndarray:
    """Validate ``max|A - A†| <= tol`` and return the symmetrized matrix."""
    arr = require_finite(a, "hermitian matrix")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {arr.shape}")
    drift = max_abs(arr - np.conj(arr.T))
    if drift > tol:
        raise InvalidMatrix(f"matrix is not Hermitian: max|H - H^dag| = {drift:.3e} > {tol:.1e}")
    return hermitian_part(arr)


def hermitian_eigensystem(h: np.ndarray) -> EigenSystem:
    """Full spectral decomposition H = V diag(w) V† with eigenvalues descending.

    Raises InvalidMatrix on non-finite or non-Hermitian input and
    NumericalFailure if the solver does not converge or the decomposition
    fails its orthonormality/reconstruction contract.
    """
    h = require_hermitian(h)
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    order = np.argsort(values)[::-1]
    values = np.ascontiguousarray(values[order])
    vectors = np.ascontiguousarray(vectors[:, order])

    d = h.shape[0]
    gram_err = max_abs(np.conj(vectors.T) @ vectors - np.eye(d))
    scale = max(1.0, float(np.max(np.abs(values))) if d else 1.0)
    recon_err = max_abs(h - (vectors * values) @ np.conj(vectors.T))
    if gram_err > TOL.orthonormality or recon_err > TOL.reconstruction * scale:
        raise NumericalFailure(
            f"eigendecomposition out of tolerance: gram={gram_err:.3e} recon={recon_err:.3e}"
        )
    return EigenSystem(values, vectors)


def hermitian_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Eigenvalues only (descending), cheaper when eigenvectors are not needed."""
    h = require_hermitian(h)
    try:
        values = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    return values[::-1]


def operator_norm(h: np.ndarray) -> float:
    """max_i |lambda_i| for Hermitian H."""
    values = hermitian_eigenvalues(h)
    return float(np.max(np.abs(values))) if values.size else 0.0


def trace_norm(h: np.ndarray) -> float:
    """sum_i |lambda_i| for Hermitian H."""
    values = hermitian_eigenvalues(h)
    return float(np.sum(np.abs(values)))


def qr_positive_stacked(mats: np.ndarray, rank_tol: float = TOL.rank_deficiency):
    """Phase-fixed QR of stacked square matrices ``(..., d, d)``.

    Returns ``(q, degenerate)`` where ``q`` is the unitary factor of the unique
    QR factorization with strictly positive real diagonal of R, and
    ``degenerate`` flags matrices whose R diagonal falls below
    ``rank_tol * max|M|`` (those q slices are not trustworthy).
    """
    mats = np.asarray(mats, dtype=complex)
    q, r = np.linalg.qr(mats)
    diag = np.einsum("...ii->...i", r)
    mag = np.abs(diag)
    scale = np.max(np.abs(mats), axis=(-2, -1))
    degenerate = np.any(mag <= rank_tol * scale[..., None], axis=-1)
    # Naive QR leaves an arbitrary phase per column; dividing it out is what
    # makes the factor exactly Haar-distributed for Gaussian input.
    safe = np.where(mag > 0.0, mag, 1.0)
    phases = diag / safe
    q = q * phases[..., None, :]
    return q, degenerate


def qr_unitary_factor(m: np.ndarray) -> np.ndarray:
    """Unitary factor Q of M = QR with positive real diagonal of R.

    Raises DegenerateSample when M is numerically rank deficient, in which
    case the caller is expected to draw a fresh sample.
    """
    m = require_finite(m, "matrix")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
    q, degenerate = qr_positive_stacked(m)
    if bool(degenerate):
        raise DegenerateSample("matrix is numerically rank deficient")
    residual = max_abs(np.conj(q.T) @ q - np.eye(m.shape[0]))
    if residual > TOL.unitarity:
        raise NumericalFailure(f"QR produced a non-unitary factor: {residual:.3e}")
    return q
