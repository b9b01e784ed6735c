"""Random unitary mixing channels R(rho) = (1/N) sum_i U_i rho U_i†.

The channel keeps its raw unitaries as one ``(N, d, d)`` array; every quantity
used downstream (outputs, the pair statistic, deviations) is expressed through
``d x d`` products, so nothing ever materializes a superoperator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidDimension, InvalidMatrix, InvalidParameter
from .haar import RngStream, as_generator, complex_standard_normal, sample_haar_unitaries, unitarity_defect
from .linalg import TOL, hermitian_eigenvalues, hermitian_part, max_abs, operator_norm, require_finite


def maximally_mixed(d: int) -> np.ndarray:
    """The state I/d."""
    return np.eye(d, dtype=complex) / d


def require_pure_state(x: np.ndarray, tol: float = TOL.state_norm) -> np.ndarray:
    """Validate a unit vector in C^d and return it as complex128."""
    vec = require_finite(np.asarray(x, dtype=complex), "state vector")
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidParameter(f"pure state must be a nonempty vector, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol:
        raise InvalidParameter(f"state vector norm {norm} deviates from 1 beyond {tol:.1e}")
    return vec


def pure_projector(x: np.ndarray) -> np.ndarray:
    """Rank-1 projector |x><x|."""
    vec = np.asarray(x, dtype=complex)
    return np.outer(vec, np.conj(vec))


def random_pure_state(d: int, rng) -> np.ndarray:
    """Uniform (Haar) random pure state: normalized iid complex Gaussian vector."""
    if d < 1:
        raise InvalidDimension(f"dimension must be positive, got {d}")
    gen = as_generator(rng)
    vec = complex_standard_normal(gen, (d,))
    norm = float(np.linalg.norm(vec))
    while norm == 0.0:  # probability zero, but the contract demands a unit vector
        vec = complex_standard_normal(gen, (d,))
        norm = float(np.linalg.norm(vec))
    return vec / norm


def random_pure_states(d: int, count: int, rng) -> np.ndarray:
    """Batch of uniform pure states, shape ``(count, d)``."""
    gen = as_generator(rng)
    vecs = complex_standard_normal(gen, (int(count), d))
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vecs / norms


def require_density(rho: np.ndarray, tol_trace: float = TOL.density_trace,
                    tol_neg: float = TOL.density_negativity) -> np.ndarray:
    """Validate a mixed state: Hermitian, trace 1, spectrum above -tol_neg."""
    rho = require_finite(np.asarray(rho, dtype=complex), "density matrix")
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidMatrix(f"density matrix must be square, got shape {rho.shape}")
    sym = hermitian_part(rho)
    if max_abs(rho - sym) > TOL.hermiticity:
        raise InvalidMatrix("density matrix is not Hermitian")
    tr = float(np.trace(sym).real)
    if abs(tr - 1.0) > tol_trace:
        raise InvalidMatrix(f"density matrix trace {tr} deviates from 1")
    if float(hermitian_eigenvalues(sym)[-1]) < -tol_neg:
        raise InvalidMatrix("density matrix has a negative eigenvalue beyond tolerance")
    return sym


@dataclass(frozen=True)
class RandomUnitaryChannel:
    """Uniform mixture of unitary conjugations, stored as raw unitaries (N, d, d)."""

    unitaries: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        u = require_finite(np.asarray(self.unitaries, dtype=complex), "unitary stack")
        if u.ndim != 3 or u.shape[1] != u.shape[2] or u.shape[0] < 1 or u.shape[1] < 1:
            raise InvalidDimension(f"expected a nonempty stack (N, d, d), got shape {u.shape}")
        defect = unitarity_defect(u)
        if defect > TOL.unitarity:
            raise InvalidMatrix(f"stack contains a non-unitary matrix: max|U†U - I| = {defect:.3e}")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "unitaries", u)

    @property
    def dim(self) -> int:
        return int(self.unitaries.shape[1])

    @property
    def count(self) -> int:
        return int(self.unitaries.shape[0])


def build_random_channel(d: int, n: int, seed: RngStream) -> RandomUnitaryChannel:
    """Channel from ``n`` independent Haar unitaries on U(d), reproducible per stream."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimension(f"count must be a positive integer, got {n!r}")
    stream = seed if isinstance(seed, RngStream) else RngStream(int(seed))
    us = sample_haar_unitaries(int(d), int(n), stream)
    prov = {"kind": "haar", "seed": stream.seed, "stream_id": stream.stream_id,
            "dim": int(d), "count": int(n)}
    return RandomUnitaryChannel(us, prov)


def build_weyl_channel(d: int) -> RandomUnitaryChannel:
    """The d^2 discrete Weyl operators X^j Z^k; conjugating by all of them is exactly randomizing.

    X is the cyclic shift, Z = diag(1, w, ..., w^{d-1}) with w = exp(2 pi i / d).
    Global phases are not normalized; they cancel under conjugation.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    shift = np.zeros((d, d), dtype=complex)
    shift[np.arange(d), (np.arange(d) - 1) % d] = 1.0  # X|j> = |j+1 mod d>
    omega = np.exp(2j * np.pi / d)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    xj = np.eye(d, dtype=complex)
    for _ in range(d):
        zk = np.eye(d, dtype=complex)
        for _ in range(d):
            ops.append(xj @ zk)
            zk = zk @ clock
        xj = xj @ shift
    return RandomUnitaryChannel(np.stack(ops), {"kind": "weyl", "dim": d, "count": d * d})


def _check_dim(ch: RandomUnitaryChannel, dim: int):
    if dim != ch.dim:
        raise DimensionMismatch(f"channel acts on C^{ch.dim}, operand lives in C^{dim}")


def apply_channel(ch: RandomUnitaryChannel, rho: np.ndarray) -> np.ndarray:
    """(1/N) sum_i U_i rho U_i†, symmetrized to kill Hermiticity drift."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {rho.shape}")
    _check_dim(ch, rho.shape[0])
    u = ch.unitaries
    out = np.einsum("nij,jk,nlk->il", u, rho, np.conj(u), optimize=True) / ch.count
    return hermitian_part(out)


def apply_adjoint(ch: RandomUnitaryChannel, sigma: np.ndarray) -> np.ndarray:
    """Adjoint map (1/N) sum_i U_i† sigma U_i."""
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {sigma.shape}")
    _check_dim(ch, sigma.shape[0])
    u = ch.unitaries
    out = np.einsum("nji,jk,nkl->il", np.conj(u), sigma, u, optimize=True) / ch.count
    return hermitian_part(out)


def pure_output(ch: RandomUnitaryChannel, phi: np.ndarray) -> np.ndarray:
    """R(|phi><phi|) computed from the N transformed vectors, O(N d^2)."""
    phi = np.asarray(phi, dtype=complex)
    _check_dim(ch, phi.shape[0])
    w = ch.unitaries @ phi  # (N, d) rows U_i phi
    return hermitian_part(w.T @ np.conj(w)) / ch.count


def pure_adjoint_output(ch: RandomUnitaryChannel, psi: np.ndarray) -> np.ndarray:
    """R†(|psi><psi|), the adjoint applied to a rank-1 projector."""
    psi = np.asarray(psi, dtype=complex)
    _check_dim(ch, psi.shape[0])
    v = np.einsum("nji,j->ni", np.conj(ch.unitaries), psi)  # rows U_i† psi
    return hermitian_part(v.T @ np.conj(v)) / ch.count


def pair_statistic(ch: RandomUnitaryChannel, phi: np.ndarray, psi: np.ndarray) -> float:
    """(1/N) sum_i |<psi|U_i|phi>|^2, via inner products only.

    This is the hot quantity of net certification: it equals
    tr(R(|phi><phi|) |psi><psi|) but costs O(N d) after the N matrix-vector
    products instead of any matrix-matrix work.
    """
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if phi.shape != psi.shape:
        raise DimensionMismatch(f"state shapes differ: {phi.shape} vs {psi.shape}")
    _check_dim(ch, phi.shape[0])
    amps = (ch.unitaries @ phi) @ np.conj(psi)
    return float(np.mean(np.abs(amps) ** 2))


def deviation(ch: RandomUnitaryChannel, phi: np.ndarray) -> float:
    """Operator-norm distance of R(|phi><phi|) from the maximally mixed state."""
    phi = np.asarray(phi, dtype=complex)
    _check_dim(ch, phi.shape[0])
    return operator_norm(pure_output(ch, phi) - maximally_mixed(ch.dim))
