"""Symmetric (permutation-invariant) penalties on R^n with their
first- and second-order variational calculus.

Four families are shipped:

* ``OrderStat(rank)`` -- the rank-th largest coordinate (rank 1 = max),
* ``McpSum(a, c)`` -- a coordinatewise minimax concave penalty,
* ``EigGapMax()`` -- the largest consecutive gap of the sorted coordinates,
* ``SmoothSep(coeff)`` -- a uniform separable quadratic, the smooth
  reference case.

Each family knows its value, a generator description of its subdifferential
(vertex hull, interval box, or a single point), its subderivative, its
second subderivative relative to a subgradient, its critical cone, its
proximal mapping (closed form where available, brute-force fallback
otherwise), and -- for the polyhedral families -- a certificate of whether
the second subderivative is a generalized quadratic on a subspace.

Subgradient membership is tested to an absolute tolerance of 1e-9; active
sets and tie detection use a relative tolerance of 1e-8, matching the
eigenvalue clustering scale upstream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .errors import InvalidSubgradientError, UnsupportedPointError
from .extreal import POS_INF, ExtReal
from .oracle import numeric_prox

SUBGRADIENT_TOL = 1e-9
CONE_RTOL = 1e-8
RI_SLACK = 1e-9


def _vec(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"expected a vector, got shape {a.shape}")
    return a


def _tie_tol(x: np.ndarray) -> float:
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    return 1e-8 * (1.0 + scale)


def _hull_fit(vertices: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Best sup-norm approximation of y by a convex combination of the rows
    of ``vertices``; returns (coefficients, residual)."""
    k, n = vertices.shape
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    vt = vertices.T
    ones = np.ones((n, 1))
    a_ub = np.block([[vt, -ones], [-vt, -ones]])
    b_ub = np.concatenate([y, -y])
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0.0, None)] * k + [(0.0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"hull membership LP failed: {res.message}")
    return res.x[:k], float(res.x[-1])


def _hull_interior_slack(vertices: np.ndarray, y: np.ndarray, fit_tol: float) -> float:
    """Largest s such that y is a convex combination (within fit_tol) with
    all coefficients >= s.  Negative when y sits on the hull boundary."""
    k, n = vertices.shape
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    vt = vertices.T
    zeros = np.zeros((n, 1))
    rows_fit = np.block([[vt, zeros], [-vt, zeros]])
    b_fit = np.concatenate([y + fit_tol, -y + fit_tol])
    rows_slack = np.hstack([-np.eye(k), np.ones((k, 1))])
    a_ub = np.vstack([rows_fit, rows_slack])
    b_ub = np.concatenate([b_fit, np.zeros(k)])
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0.0, None)] * k + [(None, None)],
        method="highs",
    )
    if not res.success:
        return -np.inf
    return float(res.x[-1])


@dataclass(frozen=True)
class SubgradientSet:
    """Generator description of a subdifferential.

    kind = "point": the singleton {point};
    kind = "box":   the interval product [lower, upper];
    kind = "hull":  the convex hull of the rows of ``vertices``.
    """

    kind: str
    vertices: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    point: np.ndarray | None = None

    def contains(self, y, tol: float = SUBGRADIENT_TOL) -> bool:
        y = _vec(y)
        if self.kind == "point":
            return bool(np.max(np.abs(y - self.point)) <= tol)
        if self.kind == "box":
            return bool(
                np.all(y >= self.lower - tol) and np.all(y <= self.upper + tol)
            )
        _, resid = _hull_fit(self.vertices, y)
        return resid <= tol

    def canonical_vertex(self) -> np.ndarray:
        """Deterministic representative: the lexicographically smallest
        vertex (box: lower corner; point: the point)."""
        if self.kind == "point":
            return np.array(self.point)
        if self.kind == "box":
            return np.array(self.lower)
        rows = sorted(map(tuple, np.asarray(self.vertices)))
        return np.array(rows[0], dtype=float)


@dataclass(frozen=True)
class GqfCertificate:
    """Whether a polyhedral second subderivative is a generalized quadratic
    (zero on a subspace, +inf off it); carries an orthonormal basis of the
    subspace when it is."""

    is_gqf: bool
    subspace_basis: np.ndarray | None


@dataclass(frozen=True)
class ThetaSecondOrder:
    """Second-order bundle at a fixed point and subgradient: the second
    subderivative as a callable, plus the critical cone membership test."""

    d2: Callable[[np.ndarray], ExtReal]
    in_cone: Callable[[np.ndarray], bool]


@dataclass(frozen=True)
class ProxResult:
    point: np.ndarray
    closed_form: bool


class SymmetricFunction:
    """Interface shared by the shipped symmetric penalties."""

    polyhedral: bool = False
    name: str = ""

    def value(self, x) -> float:
        raise NotImplementedError

    def subgradients(self, x) -> SubgradientSet:
        raise NotImplementedError

    def subderivative(self, x, w) -> float:
        raise NotImplementedError

    def second_subderivative(self, x, y, w) -> ExtReal:
        raise NotImplementedError

    def prox(self, gamma: float, x) -> ProxResult:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise UnsupportedPointError(f"{self.name} is not differentiable here")

    def hessian_diagonal(self, x) -> np.ndarray:
        raise UnsupportedPointError(f"{self.name} has no second derivative here")

    def check_subgradient(self, x, y, tol: float = SUBGRADIENT_TOL) -> None:
        if not self.subgradients(x).contains(y, tol):
            raise InvalidSubgradientError(
                f"{self.name}: vector is not a subgradient at the given point"
            )

    def critical_cone_member(self, x, y, w) -> bool:
        """True when the subderivative at w matches <y, w> to within
        1e-8 * (1 + ||w||): the two characterizations of the critical cone
        coincide for these penalties."""
        x = _vec(x)
        y = _vec(y)
        w = _vec(w)
        self.check_subgradient(x, y)
        resid = abs(self.subderivative(x, w) - float(y @ w))
        return bool(resid <= CONE_RTOL * (1.0 + float(np.linalg.norm(w))))

    def second_order(self, x, y) -> ThetaSecondOrder:
        x = _vec(x)
        y = _vec(y)
        self.check_subgradient(x, y)
        return ThetaSecondOrder(
            d2=lambda w: self.second_subderivative(x, y, w),
            in_cone=lambda w: self.critical_cone_member(x, y, w),
        )

    def gqf_certificate(self, x, y) -> GqfCertificate:
        """For polyhedral penalties: the second subderivative at (x, y) is a
        generalized quadratic exactly when y lies in the relative interior
        of the subdifferential; the certificate's subspace is the common
        orthogonal complement of the active-generator differences."""
        if not self.polyhedral:
            raise UnsupportedPointError(
                f"{self.name} is not polyhedral; no generalized-quadratic certificate"
            )
        x = _vec(x)
        y = _vec(y)
        gens = self.subgradients(x)
        self.check_subgradient(x, y)
        if gens.kind == "point":
            verts = np.asarray(gens.point)[None, :]
        else:
            verts = np.asarray(gens.vertices)
        n = verts.shape[1]
        if verts.shape[0] == 1:
            return GqfCertificate(True, np.eye(n))
        _, resid = _hull_fit(verts, y)
        fit_tol = max(resid, SUBGRADIENT_TOL)
        slack = _hull_interior_slack(verts, y, fit_tol)
        # the fit tolerance alone buys coefficients up to fit_tol, so genuine
        # relative-interior membership must clear it with margin
        if slack < RI_SLACK + fit_tol:
            return GqfCertificate(False, None)
        diffs = verts[1:] - verts[0]
        basis = null_space(diffs)
        return GqfCertificate(True, basis)


@dataclass(frozen=True)
class OrderStat(SymmetricFunction):
    """The rank-th largest coordinate (rank is 1-based; rank 1 is the max).

    First- and second-order objects require the leading-rank hypothesis:
    rank 1, or a strict gap between the (rank-1)-th and rank-th largest
    values.  Violations raise UnsupportedPointError.
    """

    rank: int

    polyhedral = True
    name = "order_stat"

    def __post_init__(self):
        if int(self.rank) != self.rank or self.rank < 1:
            raise ValueError("rank must be a positive integer")
        object.__setattr__(self, "rank", int(self.rank))

    def _sorted(self, x: np.ndarray) -> np.ndarray:
        if self.rank > x.size:
            raise ValueError(f"rank {self.rank} exceeds dimension {x.size}")
        return np.sort(x)[::-1]

    def value(self, x) -> float:
        return float(self._sorted(_vec(x))[self.rank - 1])

    def _active(self, x: np.ndarray) -> np.ndarray:
        xs = self._sorted(x)
        tol = _tie_tol(x)
        phi = xs[self.rank - 1]
        if self.rank > 1 and xs[self.rank - 2] <= phi + tol:
            raise UnsupportedPointError(
                f"order statistic rank {self.rank} is not leading here: it ties "
                f"the next larger value within {tol:.2e}"
            )
        return np.flatnonzero(np.abs(x - phi) <= tol)

    def subgradients(self, x) -> SubgradientSet:
        x = _vec(x)
        idx = self._active(x)
        return SubgradientSet(kind="hull", vertices=np.eye(x.size)[idx])

    def subderivative(self, x, w) -> float:
        x = _vec(x)
        w = _vec(w)
        return float(np.max(w[self._active(x)]))

    def second_subderivative(self, x, y, w) -> ExtReal:
        if self.critical_cone_member(x, y, w):
            return ExtReal(0.0)
        return POS_INF

    def gradient(self, x) -> np.ndarray:
        x = _vec(x)
        idx = self._active(x)
        if idx.size != 1:
            raise UnsupportedPointError(
                "order statistic is not differentiable: the active value is tied"
            )
        g = np.zeros(x.size)
        g[idx[0]] = 1.0
        return g

    def hessian_diagonal(self, x) -> np.ndarray:
        self.gradient(x)
        return np.zeros(_vec(x).size)

    def prox(self, gamma: float, x) -> ProxResult:
        res = numeric_prox(self.value, gamma, _vec(x))
        return ProxResult(point=res.point, closed_form=False)


@dataclass(frozen=True)
class EigGapMax(SymmetricFunction):
    """Largest consecutive gap of the coordinates sorted nonincreasingly.

    The value is symmetric by construction (the input is sorted before the
    gaps are read off).  First- and second-order objects are defined at
    nonincreasingly sorted points, which is how the spectral layer always
    calls them; unsorted input raises UnsupportedPointError.
    """

    polyhedral = True
    name = "eig_gap"

    def value(self, x) -> float:
        x = _vec(x)
        if x.size < 2:
            raise ValueError("gap penalty needs at least two coordinates")
        xs = np.sort(x)[::-1]
        return float(np.max(xs[:-1] - xs[1:]))

    def _require_sorted(self, x: np.ndarray) -> None:
        if x.size < 2:
            raise ValueError("gap penalty needs at least two coordinates")
        if np.any(x[:-1] < x[1:] - _tie_tol(x)):
            raise UnsupportedPointError(
                "gap calculus hypothesis violated: the base point must be sorted "
                "nonincreasingly (spectral callers always pass ordered eigenvalues)"
            )

    def _active(self, x: np.ndarray) -> np.ndarray:
        """Indices of the maximal gaps, under the hypotheses that make the
        penalty locally a max of linear functions: the largest gap is
        nonzero, and both endpoints of every maximal gap are untied.  A tied
        endpoint makes the penalty locally concave-kinked with an empty
        regular subdifferential, so those points are rejected."""
        self._require_sorted(x)
        tol = _tie_tol(x)
        gaps = x[:-1] - x[1:]
        top = float(np.max(gaps))
        if top <= tol:
            raise UnsupportedPointError(
                "gap calculus hypothesis violated: all coordinates are tied, "
                "the largest gap is zero"
            )
        idx = np.flatnonzero(gaps >= top - tol)
        for i in idx:
            if i > 0 and x[i - 1] - x[i] <= tol:
                raise UnsupportedPointError(
                    "gap calculus hypothesis violated: the upper endpoint of a "
                    "maximal gap is tied to the coordinate above it"
                )
            if i + 2 < x.size and x[i + 1] - x[i + 2] <= tol:
                raise UnsupportedPointError(
                    "gap calculus hypothesis violated: the lower endpoint of a "
                    "maximal gap is tied to the coordinate below it"
                )
        return idx

    @staticmethod
    def _vertex(i: int, n: int) -> np.ndarray:
        e = np.zeros(n)
        e[i] = 1.0
        e[i + 1] = -1.0
        return e

    def subgradients(self, x) -> SubgradientSet:
        x = _vec(x)
        idx = self._active(x)
        verts = np.stack([self._vertex(i, x.size) for i in idx])
        return SubgradientSet(kind="hull", vertices=verts)

    def subderivative(self, x, w) -> float:
        x = _vec(x)
        w = _vec(w)
        idx = self._active(x)
        return float(np.max(w[idx] - w[idx + 1]))

    def second_subderivative(self, x, y, w) -> ExtReal:
        if self.critical_cone_member(x, y, w):
            return ExtReal(0.0)
        return POS_INF

    def gradient(self, x) -> np.ndarray:
        x = _vec(x)
        idx = self._active(x)
        if idx.size != 1:
            raise UnsupportedPointError(
                "gap penalty is not differentiable: several gaps are tied for largest"
            )
        return self._vertex(int(idx[0]), x.size)

    def hessian_diagonal(self, x) -> np.ndarray:
        self.gradient(x)
        return np.zeros(_vec(x).size)

    def prox(self, gamma: float, x) -> ProxResult:
        res = numeric_prox(self.value, gamma, _vec(x))
        return ProxResult(point=res.point, closed_form=False)


@dataclass(frozen=True)
class McpSum(SymmetricFunction):
    """Coordinatewise minimax concave penalty, summed.

    Each coordinate contributes c|t| - t^2/(2a) while |t| <= a c and the
    constant a c^2 / 2 beyond.  Requires a > 1 and c > 0.  The penalty is
    differentiable except at 0; second-order objects additionally exclude
    the cap boundary |t| = a c, where the curvature jumps.
    """

    a: float
    c: float

    name = "mcp"

    def __post_init__(self):
        if not (self.a > 1.0):
            raise ValueError("mcp requires a > 1")
        if not (self.c > 0.0):
            raise ValueError("mcp requires c > 0")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "c", float(self.c))

    def phi(self, t):
        """Elementwise penalty value (vectorized over any array shape)."""
        t = np.asarray(t, dtype=float)
        inner = np.abs(t) <= self.a * self.c
        return np.where(
            inner,
            self.c * np.abs(t) - t * t / (2.0 * self.a),
            self.a * self.c * self.c / 2.0,
        )

    def phi_prime(self, t):
        """Elementwise derivative; the value at 0 is the midpoint 0 of the
        subdifferential interval, so only use this away from zeros."""
        t = np.asarray(t, dtype=float)
        inner = np.abs(t) <= self.a * self.c
        return np.where(inner, np.sign(t) * self.c - t / self.a, 0.0)

    def scalar_value(self, t: float) -> float:
        """Single-coordinate penalty value (handy for 1-D oracles)."""
        return float(np.sum(self.phi(t)))

    def value(self, x) -> float:
        return float(np.sum(self.phi(_vec(x))))

    def subgradients(self, x) -> SubgradientSet:
        x = _vec(x)
        zero = np.abs(x) <= _tie_tol(x)
        g = self.phi_prime(x)
        lower = np.where(zero, -self.c, g)
        upper = np.where(zero, self.c, g)
        return SubgradientSet(kind="box", lower=lower, upper=upper)

    def subderivative(self, x, w) -> float:
        x = _vec(x)
        w = _vec(w)
        zero = np.abs(x) <= _tie_tol(x)
        g = self.phi_prime(x)
        return float(np.sum(np.where(zero, self.c * np.abs(w), g * w)))

    def second_subderivative(self, x, y, w) -> ExtReal:
        x = _vec(x)
        y = _vec(y)
        w = _vec(w)
        self.check_subgradient(x, y)
        tol = _tie_tol(x)
        cap = self.a * self.c
        if np.any(np.abs(np.abs(x) - cap) <= tol):
            raise UnsupportedPointError(
                "mcp second-order hypothesis violated: a coordinate sits on the "
                "cap boundary |t| = a*c where the curvature jumps"
            )
        zero = np.abs(x) <= tol
        total = 0.0
        for j in range(x.size):
            if zero[j]:
                resid = self.c * abs(w[j]) - y[j] * w[j]
                if resid > CONE_RTOL * (1.0 + abs(w[j])):
                    return POS_INF
                total += -w[j] * w[j] / self.a
            elif abs(x[j]) < cap:
                total += -w[j] * w[j] / self.a
        return ExtReal(total)

    def gradient(self, x) -> np.ndarray:
        x = _vec(x)
        if np.any(np.abs(x) <= _tie_tol(x)):
            raise UnsupportedPointError(
                "mcp is not differentiable at zero coordinates"
            )
        return self.phi_prime(x)

    def hessian_diagonal(self, x) -> np.ndarray:
        x = _vec(x)
        tol = _tie_tol(x)
        cap = self.a * self.c
        if np.any(np.abs(x) <= tol):
            raise UnsupportedPointError(
                "mcp second derivative is undefined at zero coordinates"
            )
        if np.any(np.abs(np.abs(x) - cap) <= tol):
            raise UnsupportedPointError(
                "mcp second derivative is undefined on the cap boundary |t| = a*c"
            )
        return np.where(np.abs(x) < cap, -1.0 / self.a, 0.0)

    def prox(self, gamma: float, x) -> ProxResult:
        gamma = float(gamma)
        if not (0.0 < gamma < self.a):
            raise ValueError(
                f"mcp prox requires 0 < gamma < a (got gamma={gamma}, a={self.a})"
            )
        x = _vec(x)
        xa = np.abs(x)
        shrunk = np.sign(x) * (self.a / (self.a - gamma)) * (xa - gamma * self.c)
        out = np.where(
            xa <= gamma * self.c, 0.0, np.where(xa <= self.a * self.c, shrunk, x)
        )
        return ProxResult(point=out, closed_form=True)


@dataclass(frozen=True)
class SmoothSep(SymmetricFunction):
    """Uniform separable quadratic coeff/2 * ||x||^2.

    The coefficient is a single scalar: a non-uniform diagonal quadratic
    would not be permutation invariant and is rejected at construction by
    the JSON loader.
    """

    coeff: float = 1.0

    name = "smooth_sep"

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise ValueError("coeff must be finite")
        object.__setattr__(self, "coeff", float(self.coeff))

    def value(self, x) -> float:
        x = _vec(x)
        return 0.5 * self.coeff * float(x @ x)

    def gradient(self, x) -> np.ndarray:
        return self.coeff * _vec(x)

    def hessian_diagonal(self, x) -> np.ndarray:
        return np.full(_vec(x).size, self.coeff)

    def subgradients(self, x) -> SubgradientSet:
        return SubgradientSet(kind="point", point=self.gradient(x))

    def subderivative(self, x, w) -> float:
        return float(self.gradient(x) @ _vec(w))

    def second_subderivative(self, x, y, w) -> ExtReal:
        x = _vec(x)
        y = _vec(y)
        w = _vec(w)
        self.check_subgradient(x, y)
        return ExtReal(self.coeff * float(w @ w))

    def prox(self, gamma: float, x) -> ProxResult:
        gamma = float(gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if 1.0 + gamma * self.coeff <= 0:
            raise ValueError("prox undefined: 1 + gamma * coeff must be positive")
        return ProxResult(point=_vec(x) / (1.0 + gamma * self.coeff), closed_form=True)


def spec_to_json(spec: SymmetricFunction) -> dict:
    """JSON-serializable description of a shipped penalty."""
    if isinstance(spec, OrderStat):
        return {"name": "order_stat", "i": spec.rank}
    if isinstance(spec, McpSum):
        return {"name": "mcp", "a": spec.a, "c": spec.c}
    if isinstance(spec, EigGapMax):
        return {"name": "eig_gap"}
    if isinstance(spec, SmoothSep):
        return {"name": "smooth_sep", "coeff": spec.coeff}
    raise TypeError(f"unknown penalty type: {type(spec).__name__}")


def spec_from_json(data) -> SymmetricFunction:
    """Inverse of spec_to_json; accepts a dict or a JSON string."""
    if isinstance(data, (str, bytes)):
        import json

        data = json.loads(data)
    if not isinstance(data, dict) or "name" not in data:
        raise ValueError("penalty description must be an object with a 'name'")
    name = data["name"]
    if name == "order_stat":
        return OrderStat(rank=int(data["i"]))
    if name == "mcp":
        return McpSum(a=float(data["a"]), c=float(data["c"]))
    if name == "eig_gap":
        return EigGapMax()
    if name == "smooth_sep":
        if "coeff" in data:
            return SmoothSep(coeff=float(data["coeff"]))
        coeffs = np.asarray(data.get("coeffs", 1.0), dtype=float).ravel()
        if coeffs.size == 0 or np.max(coeffs) - np.min(coeffs) > 0:
            raise ValueError(
                "smooth_sep coefficients must be a single value: a non-uniform "
                "diagonal quadratic is not permutation invariant"
            )
        return SmoothSep(coeff=float(coeffs[0]))
    raise ValueError(f"unknown penalty name: {name!r}")
