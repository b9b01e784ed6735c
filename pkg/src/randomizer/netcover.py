"""Finite nets of pure states under the trace-norm metric, built by greedy random packing.

A maximal (delta/2)-separated set of pure states is a (delta/2)-net and hence
a delta-net with margin. Maximality is only probabilistic here: the builder
stops after a run of consecutive rejections, and ``audit_covering`` measures
how well the result actually covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import random_pure_states
from .errors import DimensionMismatch, InvalidDimension, InvalidParameter, NetInfeasible
from .haar import RngStream, as_generator
from .linalg import TOL, require_finite

_SIZE_CEILING = 10_000_000  # desk-scale memory ceiling on materialized nets
_CANDIDATE_BATCH = 512


def trace_distance_pure(x: np.ndarray, y: np.ndarray) -> float:
    """Trace-norm distance between rank-1 projectors: 2 sqrt(1 - |<x|y>|^2).

    Closed form for the rank-<=2 difference, phase invariant by construction.
    Evaluated through the component of y orthogonal to x, which keeps full
    precision near coincident states where 1 - |<x|y>|^2 cancels.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise DimensionMismatch(f"state shapes differ: {x.shape} vs {y.shape}")
    overlap = np.vdot(x, y)
    perp = float(np.linalg.norm(y - overlap * x))  # |y_perp|^2 = 1 - |<x|y>|^2 for unit x, y
    return 2.0 * min(1.0, perp)


def log_cardinality_bound(d: int, delta: float) -> float:
    """Natural log of the covering-number bound (5/delta)^(2d), kept in log domain."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameter(f"delta must lie in (0, 1), got {delta}")
    return 2.0 * d * math.log(5.0 / delta)


def _overlap_threshold(delta: float) -> float:
    # separation >= delta/2 in trace distance <=> |<x|y>|^2 <= 1 - (delta/4)^2
    return 1.0 - (delta * delta) / 16.0


@dataclass(frozen=True)
class PureStateNet:
    """A (delta/2)-separated list of pure states with its claimed covering radius delta."""

    dim: int
    delta: float
    states: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimension(f"dimension must be positive, got {self.dim}")
        if not 0.0 < self.delta < 2.0:
            raise InvalidParameter(f"delta must lie in (0, 2), got {self.delta}")
        states = require_finite(np.asarray(self.states, dtype=complex), "net states")
        if states.ndim != 2 or states.shape[0] < 1 or states.shape[1] != self.dim:
            raise InvalidParameter(f"states must have shape (M, {self.dim}) with M >= 1")
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1.0)) > TOL.state_norm:
            raise InvalidParameter("net contains a non-normalized state")
        _require_separated(states, self.delta)
        states = states.copy()
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def size(self) -> int:
        return int(self.states.shape[0])


def _require_separated(states: np.ndarray, delta: float, chunk: int = 512):
    """Separation certificate: every distinct pair at trace distance >= delta/2."""
    m = states.shape[0]
    threshold = _overlap_threshold(delta)
    for start in range(0, m, chunk):
        block = states[start:start + chunk]
        ov2 = np.abs(block @ np.conj(states.T)) ** 2
        rows = np.arange(block.shape[0])
        ov2[rows, start + rows] = 0.0  # ignore self-overlap
        worst = float(np.max(ov2)) if ov2.size else 0.0
        if worst > threshold:
            dist = 2.0 * math.sqrt(max(0.0, 1.0 - worst))
            raise InvalidParameter(
                f"separation certificate failed: pair at trace distance {dist:.6f} < {delta / 2:.6f}"
            )


def build_delta_net(d: int, delta: float, rng, stop_k: int | None = None,
                    max_states: int | None = None) -> PureStateNet:
    """Greedy maximal (delta/2)-separated set of uniform random pure states.

    Candidates are drawn uniformly; one is kept iff its trace distance to every
    kept state is >= delta/2. The builder stops after ``stop_k`` consecutive
    rejections (default: max(1000, 20 * current size), which tracks the set as
    it grows), or once ``max_states`` are kept.

    Without an explicit ``max_states`` budget the covering-number bound guards
    against astronomically large requests (NetInfeasible); with a budget the
    guard is waived and the result may knowingly undercover, which the
    provenance records as ``stopped_by="budget"``.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {d!r}")
    if not 0.0 < delta < 2.0:
        raise InvalidParameter(f"delta must lie in (0, 2), got {delta}")
    if stop_k is not None and stop_k < 1:
        raise InvalidParameter(f"stop_k must be positive, got {stop_k}")
    if max_states is not None and max_states < 1:
        raise InvalidParameter(f"max_states must be positive, got {max_states}")
    if max_states is None and delta < 1.0:
        log_bound = log_cardinality_bound(int(d), delta)
        if log_bound > math.log(_SIZE_CEILING):
            raise NetInfeasible(
                f"covering bound exp({log_bound:.1f}) exceeds the size ceiling {_SIZE_CEILING:.0e} "
                f"at (d={d}, delta={delta}); pass max_states to build a budgeted net"
            )

    stream = rng if isinstance(rng, RngStream) else None
    gen = as_generator(rng)
    threshold = _overlap_threshold(delta)
    ceiling = _SIZE_CEILING if max_states is None else int(max_states)

    kept: list[np.ndarray] = []
    kept_mat = np.zeros((0, int(d)), dtype=complex)
    consecutive = 0
    candidates = 0
    rejections = 0
    stopped_by = "rejections"

    def effective_stop() -> int:
        return stop_k if stop_k is not None else max(1000, 20 * len(kept))

    done = False
    while not done:
        batch = random_pure_states(int(d), _CANDIDATE_BATCH, gen)
        # distances to the pre-batch kept set, one BLAS product for the whole batch
        if kept_mat.shape[0]:
            base_ov2 = np.max(np.abs(batch @ np.conj(kept_mat.T)) ** 2, axis=1)
        else:
            base_ov2 = np.zeros(batch.shape[0])
        fresh_start = len(kept)
        for i in range(batch.shape[0]):
            candidates += 1
            worst = base_ov2[i]
            if worst <= threshold and len(kept) > fresh_start:
                fresh = np.asarray(kept[fresh_start:])
                worst = max(worst, float(np.max(np.abs(fresh @ np.conj(batch[i])) ** 2)))
            if worst <= threshold:
                kept.append(batch[i])
                consecutive = 0
                if len(kept) >= ceiling:
                    stopped_by = "budget" if max_states is not None else "ceiling"
                    done = True
                    break
            else:
                rejections += 1
                consecutive += 1
                if consecutive >= effective_stop():
                    done = True
                    break
        kept_mat = np.asarray(kept)

    if stopped_by == "ceiling":
        raise NetInfeasible(
            f"net at (d={d}, delta={delta}) exceeded the size ceiling {_SIZE_CEILING:.0e}"
        )

    prov = {
        "seed": stream.seed if stream is not None else None,
        "stream_id": stream.stream_id if stream is not None else None,
        "stop_k": stop_k,
        "max_states": max_states,
        "candidates": candidates,
        "rejections": rejections,
        "stopped_by": stopped_by,
    }
    return PureStateNet(int(d), float(delta), kept_mat, prov)


@dataclass(frozen=True)
class CoverageReport:
    """Monte Carlo audit of a net's covering radius."""

    dim: int
    delta: float
    trials: int
    max_gap: float
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def audit_covering(net: PureStateNet, trials: int, rng, chunk: int = 4096) -> CoverageReport:
    """Sample uniform pure states and measure the worst nearest-net distance.

    A failure is a sampled state farther than ``net.delta`` from every net
    state; for a truly covering net the failure count is zero.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be positive, got {trials}")
    gen = as_generator(rng)
    conj_states = np.conj(net.states.T)
    max_gap = 0.0
    failures = 0
    remaining = int(trials)
    while remaining > 0:
        k = min(chunk, remaining)
        sample = random_pure_states(net.dim, k, gen)
        best_ov2 = np.max(np.abs(sample @ conj_states) ** 2, axis=1)
        gaps = 2.0 * np.sqrt(np.maximum(0.0, 1.0 - best_ov2))
        max_gap = max(max_gap, float(np.max(gaps)))
        failures += int(np.sum(gaps > net.delta))
        remaining -= k
    return CoverageReport(net.dim, net.delta, int(trials), max_gap, failures)
