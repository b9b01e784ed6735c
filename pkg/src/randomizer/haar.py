"""Reproducible Haar sampling on the unitary group via Ginibre matrices and phase-fixed QR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSample, InvalidDimension, NumericalFailure
from .linalg import TOL, max_abs, qr_positive_stacked, qr_unitary_factor

_MASK64 = (1 << 64) - 1
_MAX_RESAMPLES = 10


def _mix64(a: int, b: int) -> int:
    # splitmix64-style finalizer; collisions across derivation paths are
    # astronomically unlikely and only reproducibility within a build matters.
    x = (a * 0x9E3779B97F4A7C15 + b + 1) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """Named position in the global randomness space: (seed, stream_id).

    Identical (seed, stream_id) always reproduces the same sample sequence
    within one build. Streams are backed by the counter-based Philox
    generator, so derived streams are statistically independent.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def worker(self, index: int) -> "RngStream":
        """Stream for parallel worker ``index``: stream_id = base + index."""
        return RngStream(self.seed, (self.stream_id + index) & _MASK64)

    def child(self, *indices: int) -> "RngStream":
        """Independent substream keyed by a tuple of indices (cell, trial, ...)."""
        sid = self.stream_id
        for ix in indices:
            sid = _mix64(sid, ix)
        return RngStream(self.seed, sid)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a ready Generator, or a bare seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"expected RngStream, Generator or int, got {type(rng).__name__}")


def complex_standard_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Complex Gaussians with mean 0 and variance 1/2 per real component.

    Complex Box-Muller: radius sqrt(-ln u1) and uniform phase give
    E|z|^2 = 1 exactly. u1 is shifted into (0, 1] to keep the log finite.
    """
    u1 = 1.0 - gen.random(shape)
    u2 = gen.random(shape)
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def _require_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def sample_ginibre(d: int, rng, count: int | None = None) -> np.ndarray:
    """Draw ``d x d`` matrices of iid complex standard Gaussians.

    Returns shape ``(d, d)`` when ``count`` is None, else ``(count, d, d)``.
    """
    d = _require_dim(d)
    gen = as_generator(rng)
    shape = (d, d) if count is None else (int(count), d, d)
    return complex_standard_normal(gen, shape)


def sample_haar_unitary(d: int, rng) -> np.ndarray:
    """One Haar-distributed unitary on U(d).

    QR of a Ginibre matrix with the positive-diagonal phase convention;
    degenerate draws are resampled (at most 10 times, then NumericalFailure).
    """
    d = _require_dim(d)
    gen = as_generator(rng)
    for _ in range(_MAX_RESAMPLES):
        try:
            return qr_unitary_factor(sample_ginibre(d, gen))
        except DegenerateSample:
            continue
    raise NumericalFailure(f"{_MAX_RESAMPLES} consecutive degenerate Ginibre samples at d={d}")


def sample_haar_unitaries(d: int, count: int, rng) -> np.ndarray:
    """Stack of ``count`` independent Haar unitaries, shape ``(count, d, d)``.

    Uses one batched Ginibre draw plus batched QR; the batch is the canonical
    sample sequence of a stream (it differs from looping sample_haar_unitary).
    """
    d = _require_dim(d)
    if count < 1:
        raise InvalidDimension(f"count must be a positive integer, got {count!r}")
    gen = as_generator(rng)
    mats = sample_ginibre(d, gen, count=count)
    q, degenerate = qr_positive_stacked(mats)
    for _ in range(_MAX_RESAMPLES):
        if not np.any(degenerate):
            break
        refill = sample_ginibre(d, gen, count=int(np.sum(degenerate)))
        q_new, degenerate_new = qr_positive_stacked(refill)
        idx = np.flatnonzero(degenerate)
        q[idx] = q_new
        degenerate[idx] = degenerate_new
    else:
        raise NumericalFailure("persistent degenerate Ginibre samples in batch draw")
    return q


def unitarity_defect(u: np.ndarray) -> float:
    """max|U†U - I|, possibly over a stack of unitaries."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[-1]
    gram = np.einsum("...ki,...kj->...ij", np.conj(u), u)
    return max_abs(gram - np.eye(d))


def is_unitary(u: np.ndarray, tol: float = TOL.unitarity) -> bool:
    return unitarity_defect(u) <= tol
