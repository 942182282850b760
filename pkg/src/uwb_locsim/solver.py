"""Regularized Gauss-Newton true-range multilateration.

Each iteration solves a stacked linear least-squares problem

    [ W * J(x_k) ]            [ W * (h(x_k) - d) ]
    [   c * I3   ] * dx  =~   [  c * (x_r - x_k) ]

where h maps a position to its anchor distances, J has unit rows
(x_Ai - x)/||x_Ai - x||, W holds optional per-anchor inverse standard
deviations, and c pulls the iterate toward the reference point x_r
with the strength of an inverse prior standard deviation. The inner
solve uses a QR factorization of the stacked matrix rather than the
normal equations, which keeps near-degenerate geometries well
conditioned. Iteration stops when the step norm drops below ``delta``
or after ``k_max`` iterations.

The batched entry point runs many independent solves at once with the
same per-point arithmetic; the single-point API is a thin wrapper over
a batch of one, so the two can never drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SingularGeometryError
from .geometry import Anchor, Point3

_ANCHOR_COINCIDENCE = 1e-9  # meters; closer than this counts as "on an anchor"
_PERTURB_Z = 1e-6  # meters; nudge applied when an iterate lands on an anchor


@dataclass(frozen=True)
class SolverConfig:
    """Gauss-Newton hyperparameters.

    ``weights`` are per-anchor measurement standard deviations in
    meters (the diagonal of the noise covariance square root);
    measurements are scaled by their inverses, so omitting them gives
    every anchor unit weight.
    """

    delta: float = 1e-3  # stop tolerance on the step norm, meters
    k_max: int = 10  # iteration cap
    c: float = 0.1  # regularization coefficient, 1/meters
    x_r: Point3 | None = None  # regularization point; None = derive from anchors
    x_r_mode: str = "median"  # "median" or "mean" of anchor coordinates
    weights: tuple[float, ...] | None = None  # per-anchor sigmas, meters
    x0: Point3 | None = None  # initial iterate; None = x_r

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ParameterError("delta must be > 0")
        if self.k_max < 1:
            raise ParameterError("k_max must be >= 1")
        if self.c < 0.0:
            raise ParameterError("c must be >= 0")
        if self.x_r_mode not in ("median", "mean"):
            raise ParameterError("x_r_mode must be 'median' or 'mean'")
        if self.weights is not None and any(w <= 0.0 for w in self.weights):
            raise ParameterError("anchor weights must all be > 0")


@dataclass(frozen=True)
class LocationEstimate:
    position: Point3
    iterations: int
    converged: bool
    final_step_norm: float  # meters


def anchor_positions(anchors: list[Anchor]) -> np.ndarray:
    return np.array([a.position.as_array() for a in anchors], dtype=float)


def reference_point(anchors: list[Anchor], mode: str = "median") -> np.ndarray:
    """Component-wise median (or mean) of the anchor coordinates."""
    positions = anchor_positions(anchors)
    if mode == "median":
        return np.median(positions, axis=0)
    if mode == "mean":
        return positions.mean(axis=0)
    raise ParameterError("mode must be 'median' or 'mean'")


def jacobian(x: Point3, anchors: list[Anchor]) -> np.ndarray:
    """Unit-row direction matrix from position x toward every anchor."""
    positions = anchor_positions(anchors)
    diff = positions - np.asarray(x.as_array() if isinstance(x, Point3) else x, dtype=float)
    dist = np.linalg.norm(diff, axis=1)
    if np.any(dist < _ANCHOR_COINCIDENCE):
        raise SingularGeometryError("position coincides with an anchor")
    return diff / dist[:, None]


def localization_error(estimate: Point3, truth: Point3, mode: str = "2d") -> float:
    """Euclidean position error in meters; '2d' ignores the z term."""
    dx, dy, dz = estimate.x - truth.x, estimate.y - truth.y, estimate.z - truth.z
    if mode == "2d":
        return float(np.hypot(dx, dy))
    if mode == "3d":
        return float(np.sqrt(dx * dx + dy * dy + dz * dz))
    raise ParameterError("mode must be '2d' or '3d'")


@dataclass
class BatchSolveResult:
    positions: np.ndarray  # (B, 3) meters
    iterations: np.ndarray  # (B,) int
    converged: np.ndarray  # (B,) bool
    step_norms: np.ndarray  # (B,) meters, last step taken
    failed: np.ndarray = field(default=None)  # (B,) bool, unsolvable points


def solve_batch(
    config: SolverConfig,
    positions: np.ndarray,
    distances: np.ndarray,
    x_r: np.ndarray,
    x0: np.ndarray,
) -> BatchSolveResult:
    """Run independent Gauss-Newton solves for a batch of points.

    ``positions`` is (N, 3) anchor coordinates, ``distances`` is (B, N)
    measured ranges, ``x0`` is (B, 3) start iterates. Points whose
    stacked system is rank-deficient (possible only with c = 0) or
    whose distances are not all positive are flagged failed instead of
    aborting the batch.
    """
    positions = np.asarray(positions, dtype=float)
    distances = np.asarray(distances, dtype=float)
    n_points, n_anchors = distances.shape
    if positions.shape != (n_anchors, 3):
        raise ParameterError(
            f"anchor array {positions.shape} does not match distances ({n_anchors} per point)"
        )

    if config.weights is not None:
        if len(config.weights) != n_anchors:
            raise ParameterError("one weight per anchor required")
        w = 1.0 / np.asarray(config.weights, dtype=float)
    else:
        w = np.ones(n_anchors)

    reg_rows = config.c * np.eye(3)

    x = np.array(x0, dtype=float).reshape(n_points, 3).copy()
    iterations = np.zeros(n_points, dtype=int)
    converged = np.zeros(n_points, dtype=bool)
    failed = ~np.all(distances > 0.0, axis=1)
    step_norms = np.zeros(n_points)

    active = ~failed
    for _ in range(config.k_max):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xk = x[idx]

        # Iterates that land on an anchor get nudged along +z so the
        # Jacobian row stays defined (keeps Monte Carlo sweeps alive).
        for _attempt in range(3):
            diff = positions[None, :, :] - xk[:, None, :]
            dist = np.linalg.norm(diff, axis=2)
            too_close = dist < _ANCHOR_COINCIDENCE
            if not too_close.any():
                break
            xk[too_close.any(axis=1), 2] += _PERTURB_Z

        jac = diff / dist[:, :, None]
        # rows are unit vectors by construction; guard against NaN creep
        assert np.allclose(np.linalg.norm(jac, axis=2), 1.0, atol=1e-9)

        a_stack = np.concatenate(
            [jac * w[None, :, None], np.broadcast_to(reg_rows, (idx.size, 3, 3))], axis=1
        )
        b_stack = np.concatenate(
            [(dist - distances[idx]) * w[None, :], config.c * (x_r[None, :] - xk)], axis=1
        )

        q, r = np.linalg.qr(a_stack)
        rhs = np.einsum("bmi,bm->bi", q, b_stack)

        # Rank-deficient slices (c = 0 with degenerate anchors) are
        # flagged failed; solving them would blow up or raise.
        diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
        singular = diag.min(axis=1) <= 1e-12 * diag.max(axis=1)
        if singular.any():
            bad = idx[singular]
            failed[bad] = True
            active[bad] = False
            keep = ~singular
            idx, xk, r, rhs = idx[keep], xk[keep], r[keep], rhs[keep]
            if idx.size == 0:
                break

        delta_x = np.linalg.solve(r, rhs[..., None])[..., 0]
        norms = np.linalg.norm(delta_x, axis=1)

        x[idx] = xk + delta_x
        step_norms[idx] = norms
        iterations[idx] += 1
        done = norms < config.delta
        converged[idx] = done
        active[idx] = ~done

    return BatchSolveResult(
        positions=x,
        iterations=iterations,
        converged=converged,
        step_norms=step_norms,
        failed=failed,
    )


def solve(config: SolverConfig, anchors: list[Anchor], distances) -> LocationEstimate:
    """Estimate a position from anchor distances.

    Raises SingularGeometryError when the stacked system is rank
    deficient (only possible with c = 0) and ParameterError on
    malformed inputs.
    """
    positions = anchor_positions(anchors)
    distances = np.asarray(distances, dtype=float)
    if distances.ndim != 1 or distances.size != len(anchors):
        raise ParameterError(
            f"got {distances.size} distances for {len(anchors)} anchors"
        )
    if np.any(distances <= 0.0):
        raise ParameterError("distances must all be > 0")
    if len(anchors) < 3:
        raise ParameterError("at least three anchors are required")

    x_r = config.x_r.as_array() if config.x_r is not None else reference_point(anchors, config.x_r_mode)
    x0 = config.x0.as_array() if config.x0 is not None else x_r

    result = solve_batch(config, positions, distances[None, :], x_r, x0[None, :])
    if result.failed[0]:
        raise SingularGeometryError("anchor geometry is rank deficient for this solve")
    pos = result.positions[0]
    return LocationEstimate(
        position=Point3(float(pos[0]), float(pos[1]), float(pos[2])),
        iterations=int(result.iterations[0]),
        converged=bool(result.converged[0]),
        final_step_norm=float(result.step_norms[0]),
    )
