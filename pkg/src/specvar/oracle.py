"""Brute-force difference-quotient oracles.

Everything here works on plain callables and makes no use of the
closed-form calculus in the rest of the package, so the two sides can be
played against each other in tests.

Second-order difference quotients use the parabolic normalization

    Q_t(w') = [f(x + t w') - f(x) - t <v, w'>] / (t^2 / 2),

whose lower limit as t -> 0 and w' -> w is the second-order epi-derivative
style object the formulas compute.  The estimators below approximate that
lower limit by sampling w' in balls around w that shrink with t, always
including w itself, and taking minima over the smallest grid levels.

Sampling radii shrink strictly faster than t^(1/2): on curved instances a
radius ~ t^(1/2) injects a downward bias of order t^(1/2), which would
drown the tolerances the estimators are held to.  The second-order sampler
uses radius * t^(3/2), the first-order one radius * t^2; both keep the
sampling bias far below the quotient truncation error while still probing
nearby directions.

Determinism: every estimator is a pure function of its inputs and seed.
Sample draws use one generator stream per (level, sample) pair, so batched
and serial evaluation agree exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .extreal import POS_INF, ExtReal

ATTAINMENT_TOL = 1e-2


def _as_point(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim not in (0, 1, 2):
        raise ValueError("points must be scalars, vectors, or square matrices")
    if a.ndim == 2 and a.shape[0] != a.shape[1]:
        raise ValueError("matrix points must be square")
    return a


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a, b))


def _free_dim(shape) -> int:
    if len(shape) == 0:
        return 1
    if len(shape) == 1:
        return int(shape[0])
    n = shape[0]
    return n * (n + 1) // 2


def _ball_point(w: np.ndarray, radius: float, rng: np.random.Generator) -> np.ndarray:
    """One draw roughly uniform in the ball of the given radius around w
    (symmetrized when w is a matrix)."""
    u = rng.standard_normal(w.shape if w.shape else (1,))
    if w.ndim == 2:
        u = (u + u.T) / 2.0
    nrm = float(np.linalg.norm(u))
    if nrm == 0.0:
        return w.copy()
    r = radius * rng.random() ** (1.0 / _free_dim(w.shape))
    pt = w + (r / nrm) * u.reshape(w.shape)
    return pt


@dataclass(frozen=True)
class QuotientProbe:
    """Configuration of the second-order quotient estimator."""

    t_grid: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    radius: float = 0.5
    samples: int = 256
    seed: int = 0

    def __post_init__(self):
        grid = tuple(float(t) for t in self.t_grid)
        if len(grid) < 2:
            raise ValueError("t_grid needs at least two levels")
        if any(t <= 0 for t in grid) or any(
            grid[i] <= grid[i + 1] for i in range(len(grid) - 1)
        ):
            raise ValueError("t_grid must be strictly decreasing and positive")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        object.__setattr__(self, "t_grid", grid)


@dataclass(frozen=True)
class ProbeLevel:
    t: float
    at_w: ExtReal
    minimum: ExtReal


@dataclass(frozen=True)
class ProbeResult:
    estimate: ExtReal
    levels: tuple[ProbeLevel, ...]


def diff_quotient2(f, x, v, w, t: float) -> ExtReal:
    """Single second-order difference quotient; +inf when x + t w leaves
    the domain of f (signalled by f returning +inf)."""
    x = _as_point(x)
    w = _as_point(w)
    v = _as_point(v)
    t = float(t)
    if t <= 0:
        raise ValueError("t must be positive")
    f0 = float(f(x))
    if math.isinf(f0):
        raise ValueError("base point must lie in the domain of f")
    fv = float(f(x + t * w))
    if math.isinf(fv):
        return POS_INF
    return ExtReal((fv - f0 - t * _inner(v, w)) / (t * t / 2.0))


def numeric_second_subderivative(
    f, x, v, w, probe: QuotientProbe = QuotientProbe()
) -> ProbeResult:
    """Sampled lower envelope of second-order quotients.

    Per grid level t the candidate set is w itself plus ``probe.samples``
    draws in the ball of radius ``probe.radius * t^(3/2)`` around w; the
    estimate is the minimum over the two smallest levels of the per-level
    minima.  All levels are recorded for trace export.
    """
    x = _as_point(x)
    w = _as_point(w)
    v = _as_point(v)
    f0 = float(f(x))
    if math.isinf(f0):
        raise ValueError("base point must lie in the domain of f")

    def quot(t: float, cand: np.ndarray) -> ExtReal:
        fv = float(f(x + t * cand))
        if math.isinf(fv):
            return POS_INF
        return ExtReal((fv - f0 - t * _inner(v, cand)) / (t * t / 2.0))

    levels = []
    for k, t in enumerate(probe.t_grid):
        at_w = quot(t, w)
        best = at_w
        rad = probe.radius * t ** 1.5
        if rad > 0:
            for j in range(probe.samples):
                rng = np.random.default_rng([probe.seed, k, j])
                q = quot(t, _ball_point(w, rad, rng))
                if q < best:
                    best = q
        levels.append(ProbeLevel(t=t, at_w=at_w, minimum=best))
    tail = levels[-2:]
    estimate = min(lv.minimum for lv in tail)
    return ProbeResult(estimate=estimate, levels=tuple(levels))


def numeric_subderivative(
    f,
    x,
    w,
    t_grid: tuple[float, ...] = (1e-4, 1e-5, 1e-6),
    radius: float = 0.5,
    samples: int = 64,
    seed: int = 0,
) -> ExtReal:
    """Sampled lower envelope of first-order quotients
    [f(x + t w') - f(x)] / t over the grid levels and over w' near w
    (ball radius ``radius * t^2``)."""
    x = _as_point(x)
    w = _as_point(w)
    f0 = float(f(x))
    if math.isinf(f0):
        raise ValueError("base point must lie in the domain of f")
    best: ExtReal | None = None
    for k, t in enumerate(t_grid):
        t = float(t)
        cands = [w]
        rad = radius * t * t
        if rad > 0:
            for j in range(samples):
                rng = np.random.default_rng([seed, k, j])
                cands.append(_ball_point(w, rad, rng))
        for cand in cands:
            fv = float(f(x + t * cand))
            q = POS_INF if math.isinf(fv) else ExtReal((fv - f0) / t)
            if best is None or q < best:
                best = q
    assert best is not None
    return best


def _search_basis(shape) -> list[np.ndarray]:
    if len(shape) == 0:
        return [np.asarray(1.0)]
    if len(shape) == 1:
        return list(np.eye(shape[0]))
    n = shape[0]
    basis = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        basis.append(e)
    s = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = s
            basis.append(e)
    return basis


@dataclass(frozen=True)
class AttainmentLevel:
    t: float
    point: np.ndarray
    quotient: float
    distance: float


@dataclass(frozen=True)
class AttainmentResult:
    target: float
    levels: tuple[AttainmentLevel, ...]
    success: bool


def epi_attainment_search(
    f,
    x,
    v,
    w,
    target: float,
    t_seq: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5),
    sweeps: int = 6,
) -> AttainmentResult:
    """Search for directions w_k -> w whose second-order quotients attain
    ``target``.

    For each level t_k a derivative-free coordinate descent minimizes
    |Q_{t_k}(w') - target| starting at w, with step sizes shrinking from
    0.5 * t_k^(1/2) downwards, so accepted points stay in a vanishing
    neighborhood of w.  Success requires the final mismatch to be at most
    1e-2 and the distances ||w_k - w|| to be nonincreasing over the last
    three levels.
    """
    x = _as_point(x)
    w = _as_point(w)
    v = _as_point(v)
    target = float(target)
    if not math.isfinite(target):
        raise ValueError("attainment target must be finite")
    if len(t_seq) < 3:
        raise ValueError("need at least three levels to judge attainment")
    f0 = float(f(x))
    if math.isinf(f0):
        raise ValueError("base point must lie in the domain of f")
    basis = _search_basis(w.shape)

    def quot(t: float, cand: np.ndarray) -> float:
        fv = float(f(x + t * cand))
        if math.isinf(fv):
            return math.inf
        return (fv - f0 - t * _inner(v, cand)) / (t * t / 2.0)

    levels: list[AttainmentLevel] = []
    mismatch = math.inf
    for t in t_seq:
        t = float(t)
        best = w.copy()
        q_best = quot(t, best)
        mismatch = abs(q_best - target) if math.isfinite(q_best) else math.inf
        step = 0.5 * math.sqrt(t)
        floor = 1e-3 * t
        while step > floor:
            moved = True
            guard = 0
            while moved and guard < sweeps:
                moved = False
                guard += 1
                for b in basis:
                    for sgn in (1.0, -1.0):
                        cand = best + (sgn * step) * b
                        q = quot(t, cand)
                        m = abs(q - target) if math.isfinite(q) else math.inf
                        if m < mismatch - 1e-15:
                            best, q_best, mismatch = cand, q, m
                            moved = True
            step /= 2.0
        levels.append(
            AttainmentLevel(
                t=t,
                point=best,
                quotient=q_best,
                distance=float(np.linalg.norm(best - w)),
            )
        )
    dists = [lv.distance for lv in levels[-3:]]
    monotone = all(dists[i] >= dists[i + 1] - 1e-12 for i in range(len(dists) - 1))
    success = bool(mismatch <= ATTAINMENT_TOL and monotone)
    return AttainmentResult(target=target, levels=tuple(levels), success=success)


@dataclass(frozen=True)
class NumericProxResult:
    point: np.ndarray
    objective: float
    widened: bool = False


def _prox_objective(f, gamma: float, x: np.ndarray):
    def obj(wpt: np.ndarray) -> float:
        return float(f(wpt)) + float(np.vdot(wpt - x, wpt - x)) / (2.0 * gamma)

    return obj


def _scalar_grid_min(obj_vec, lo: float, hi: float, step: float) -> tuple[float, float]:
    """Chunked argmin of a vectorized objective over [lo, hi] with the
    given step; returns (argmin, min)."""
    best_w = lo
    best_v = math.inf
    chunk = 1_000_000
    count = int(math.ceil((hi - lo) / step)) + 1
    for start in range(0, count, chunk):
        stop = min(start + chunk, count)
        grid = lo + step * np.arange(start, stop)
        vals = obj_vec(grid)
        k = int(np.argmin(vals))
        if float(vals[k]) < best_v:
            best_v = float(vals[k])
            best_w = float(grid[k])
    return best_w, best_v


def numeric_prox(
    f,
    gamma: float,
    x,
    step: float = 1e-5,
    restarts: int = 10,
    seed: int = 0,
) -> NumericProxResult:
    """Brute-force proximal point of f at x with parameter gamma.

    Scalars are handled by exhaustive grid search over
    [x - 5 gamma (1+|x|), x + 5 gamma (1+|x|)] followed by a bounded local
    refinement; if the grid minimum lands on the region boundary the region
    is widened once, and a boundary hit after widening is flagged rather
    than raised.  Vectors and matrices use derivative-free local descent
    from x plus ``restarts`` random restarts.
    """
    gamma = float(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    xa = _as_point(x)
    if xa.ndim == 0:
        x0 = float(xa)
        obj = _prox_objective(lambda z: f(z), gamma, np.asarray(x0))

        def obj_vec(grid: np.ndarray) -> np.ndarray:
            return np.asarray(f(grid), dtype=float) + (grid - x0) ** 2 / (2.0 * gamma)

        radius = 5.0 * gamma * (1.0 + abs(x0))
        widened = False
        lo, hi = x0 - radius, x0 + radius
        for attempt in range(2):
            w_best, _ = _scalar_grid_min(obj_vec, lo, hi, step)
            on_edge = abs(w_best - lo) < step or abs(w_best - hi) < step
            if not on_edge:
                break
            if attempt == 0:
                lo, hi = x0 - 2 * radius, x0 + 2 * radius
            else:
                widened = True
        res = minimize_scalar(
            lambda z: obj(np.asarray(z)),
            bounds=(w_best - 2 * step, w_best + 2 * step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        w_ref = float(res.x)
        v_ref = float(res.fun)
        v_grid = obj(np.asarray(w_best))
        if v_grid < v_ref:
            w_ref, v_ref = w_best, v_grid
        return NumericProxResult(np.asarray(w_ref), v_ref, widened)

    sym = xa.ndim == 2
    n = xa.shape[0] if sym else xa.size
    if sym:
        iu = np.triu_indices(n)
        scale = np.where(iu[0] == iu[1], 1.0, 2.0)

        def pack(mat: np.ndarray) -> np.ndarray:
            return mat[iu]

        def unpack(vec: np.ndarray) -> np.ndarray:
            mat = np.zeros((n, n))
            mat[iu] = vec
            mat = mat + mat.T - np.diag(np.diag(mat))
            return mat

    else:

        def pack(vec: np.ndarray) -> np.ndarray:
            return vec

        def unpack(vec: np.ndarray) -> np.ndarray:
            return vec

    obj = _prox_objective(f, gamma, xa)

    def obj_packed(z: np.ndarray) -> float:
        return obj(unpack(z))

    rng = np.random.default_rng(seed)
    starts = [pack(xa)]
    for _ in range(restarts):
        pert = rng.standard_normal(xa.shape)
        if sym:
            pert = (pert + pert.T) / 2.0
        starts.append(pack(xa + 0.5 * gamma * pert))
    best_z = None
    best_v = math.inf
    for z0 in starts:
        res = minimize(
            obj_packed,
            z0,
            method="Powell",
            options={"xtol": 1e-10, "ftol": 1e-12, "maxiter": 2000},
        )
        if float(res.fun) < best_v:
            best_v = float(res.fun)
            best_z = np.asarray(res.x)
    assert best_z is not None
    return NumericProxResult(unpack(best_z), best_v, False)
