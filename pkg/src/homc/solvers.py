"""Stationary vectors: closed form for two states, iteration, and grid search.

The closed form covers the two-state second-order chain, where stationarity
reduces to one quadratic ``g(x) = 0`` on ``[0, 1]``.  General tensors are
handled by damped fixed-point iteration from many starts; the simplex grid
scan with Newton polishing is an independent route used as an oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Literal

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidArgumentError
from .tensor_core import (TransitionTensor, apply_rows, kron_power_rows, residual_rows,
                          vector_to_json)

FLOAT_EQ_TOL = 1e-14
DEFAULT_DAMPING = 0.2
DEFAULT_CLUSTER_RADIUS = 1e-6


# ----------------------------------------------------------------------------
# two-state closed form
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionSet:
    """Solutions ``x in [0, 1]`` of the two-state stationarity equation.

    ``kind`` is ``"interval_all"`` (every ``x`` solves it, ``roots`` empty) or
    ``"finite"`` (1 or 2 strictly increasing roots).  ``case_label`` names the
    branch that produced the answer: ``"1"``, ``"2"``, ``"3"``, ``"4a"``, ``"4b"``.
    """

    kind: Literal["interval_all", "finite"]
    roots: tuple
    case_label: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "roots": [float(r) for r in self.roots], "case": self.case_label}


def quadratic_coefficients(a1, a2, b1, b2):
    """``(c2, c1, c0)`` of ``g(x) = c2 x^2 + c1 x + c0``."""
    return (a1 - a2 - b1 + b2, a2 + b1 - 2 * b2 - 1, b2)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def solve_quadratic_2x2(a1, a2, b1, b2) -> SolutionSet:
    """Solve ``[x A + (1-x) B] (x, 1-x)^T = (x, 1-x)^T`` for ``x in [0, 1]``.

    ``A = [[a1, b1], [1-a1, 1-b1]]`` is the slice for state 1 and
    ``B = [[a2, b2], [1-a2, 1-b2]]`` the slice for state 2, so ``x`` is the
    probability of state 1.  With all-rational inputs comparisons are exact;
    with floats, equality means agreement within 1e-14.

    Branch 2 also covers ``a1 = 1, b2 = 0, a2 + b1 > 1``: there ``g`` factors
    as ``(1 - a2 - b1) x (x - 1)``, so both endpoints are roots even though the
    textbook case split files it under the unique-root branch.
    """
    params = (a1, a2, b1, b2)
    exact = all(isinstance(p, Rational) for p in params)
    if exact:
        a1, a2, b1, b2 = (Fraction(p) for p in params)

        def eq(u, v):
            return u == v
    else:
        a1, a2, b1, b2 = (float(p) for p in params)

        def eq(u, v):
            return abs(u - v) <= FLOAT_EQ_TOL
    for name, p in zip(("a1", "a2", "b1", "b2"), (a1, a2, b1, b2)):
        if not (0 <= p <= 1) or (not exact and math.isnan(p)):
            raise InvalidArgumentError(f"{name}={p} outside [0, 1]")

    one = 1
    s = a2 + b1
    a1_is_1, b2_is_0, s_is_1 = eq(a1, one), eq(b2, 0), eq(s, one)

    if a1_is_1 and s_is_1 and b2_is_0:
        return SolutionSet("interval_all", (), "1")
    if a1_is_1 and ((s < 1 and not s_is_1) or (b2_is_0 and not s_is_1)):
        other = b2 / (b2 + 1 - s)
        return _finite((other, one), "2", exact)
    if not a1_is_1 and b2_is_0 and (s > 1 or s_is_1):
        other = 0 if s_is_1 else (s - 1) / (s - a1)
        return _finite((0, other), "3", exact)

    c2 = a1 - s + b2
    if eq(c2, 0):
        return _finite((b2 / (2 * b2 + 1 - s),), "4a", exact)
    lin = 2 * b2 + 1 - s
    disc = (1 - s) ** 2 + 4 * b2 * (1 - a1)
    root = None
    if exact:
        sq = _exact_sqrt(disc)
        if sq is not None:
            root = 2 * b2 / (lin + sq) if lin + sq != 0 else (lin - sq) / (2 * c2)
    if root is None:
        sq = math.sqrt(float(disc))
        lin_f, c2_f, b2_f = float(lin), float(c2), float(b2)
        # pick the form without cancellation: lin and sq share a sign in lin + sq
        if lin_f >= 0:
            root = 2 * b2_f / (lin_f + sq) if lin_f + sq > 0 else 0.0
        else:
            root = (lin_f - sq) / (2 * c2_f)
    return _finite((root,), "4b", exact)


def _finite(roots, label: str, exact: bool) -> SolutionSet:
    vals = []
    for r in roots:
        r = Fraction(r) if exact and isinstance(r, Rational) else r
        if not exact:
            r = min(max(float(r), 0.0), 1.0)
        if not any(r == v for v in vals):
            vals.append(r)
    return SolutionSet("finite", tuple(sorted(vals)), label)


def g_value(a1, a2, b1, b2, x):
    c2, c1, c0 = quadratic_coefficients(a1, a2, b1, b2)
    return (c2 * x + c1) * x + c0


# ----------------------------------------------------------------------------
# damped fixed-point iteration
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointResult:
    point: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _normalize_rows(X: np.ndarray) -> np.ndarray:
    X = np.maximum(X, 0.0)
    return X / X.sum(axis=1, keepdims=True)


def iterate_rows(E: np.ndarray, m: int, X0: np.ndarray, tol: float, max_iter: int,
                 damping: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run damped iteration on every row of ``X0`` independently.

    Returns ``(points, residuals, iterations, converged)``.  Rows stop as soon
    as their own residual reaches ``tol``; each row's trajectory is the same
    as if it were iterated alone.
    """
    X = _normalize_rows(np.array(X0, dtype=float, copy=True))
    R = X.shape[0]
    iters = np.zeros(R, dtype=np.int64)
    F = apply_rows(E, X, m)
    res = np.max(np.abs(F - X), axis=1)
    active = np.flatnonzero(res > tol)
    for _ in range(max_iter):
        if active.size == 0:
            break
        Xa = X[active]
        Xa = _normalize_rows((1.0 - damping) * F[active] + damping * Xa)
        Fa = apply_rows(E, Xa, m)
        X[active] = Xa
        F[active] = Fa
        res[active] = np.max(np.abs(Fa - Xa), axis=1)
        iters[active] += 1
        active = active[res[active] > tol]
    return X, res, iters, res <= tol


def fixed_point_iterate(P: TransitionTensor, x0, tol: float = 1e-12, max_iter: int = 10_000,
                        damping: float = DEFAULT_DAMPING) -> FixedPointResult:
    """Iterate ``x <- (1 - d) P x^(m) + d x`` until the residual is below ``tol``.

    Non-convergence is reported through ``converged=False``, never raised.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    if not 0 <= damping < 1:
        raise InvalidArgumentError(f"damping {damping} outside [0, 1)")
    x0 = np.asarray(x0, dtype=float).reshape(1, -1)
    if x0.shape[1] != P.n:
        raise InvalidArgumentError(f"start of length {x0.shape[1]} does not match n={P.n}")
    X, res, it, conv = iterate_rows(P.as_float(), P.m, x0, tol, max_iter, damping)
    return FixedPointResult(X[0], float(res[0]), int(it[0]), bool(conv[0]))


# ----------------------------------------------------------------------------
# multi-start
# ----------------------------------------------------------------------------

@dataclass
class SolveReport:
    points: list
    residuals: list
    iterations: list
    converged_starts: int
    total_starts: int
    seed: int
    sources: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "points": [[float(v) for v in p] for p in self.points],
            "residuals": [float(r) for r in self.residuals],
            "iterations": [int(i) for i in self.iterations],
            "seed": self.seed,
            "converged_starts": self.converged_starts,
            "total_starts": self.total_starts,
        }
        if self.sources:
            out["sources"] = list(self.sources)
        return out

    def same_as(self, other: "SolveReport") -> bool:
        return self.to_json() == other.to_json()


def start_points(n: int, restarts: int, seed: int) -> np.ndarray:
    """Deterministic starts: vertices, barycenter, then uniform random points.

    Random start ``k`` draws from its own stream seeded by ``(seed, k)``, so
    any subset of starts can be regenerated independently.
    """
    fixed = list(np.eye(n)) + [np.full(n, 1.0 / n)]
    pts = fixed[:restarts]
    for k in range(len(pts), restarts):
        pts.append(np.random.default_rng([seed, k]).dirichlet(np.ones(n)))
    return np.asarray(pts).reshape(-1, n)


def cluster_points(points, radius: float) -> list[int]:
    """Indices of cluster representatives, in order of first appearance.

    A point joins the first existing cluster whose representative is within
    ``radius`` (max-norm); representatives never move, so they stay pairwise
    more than ``radius`` apart.
    """
    reps: list[int] = []
    for i, p in enumerate(points):
        if not any(np.max(np.abs(p - points[j])) <= radius for j in reps):
            reps.append(i)
    return reps


def multi_start_solve(P: TransitionTensor, restarts: int = 256, seed: int = 0, tol: float = 1e-12,
                      max_iter: int = 10_000, cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
                      damping: float = DEFAULT_DAMPING, chunk_size: int | None = None) -> SolveReport:
    """Damped iteration from ``restarts`` starts, converged limits clustered.

    ``chunk_size`` splits the starts into independently processed batches; the
    report is identical for every chunking.
    """
    if restarts < 1:
        raise InvalidArgumentError("restarts must be >= 1")
    X0 = start_points(P.n, restarts, seed)
    E = P.as_float()
    chunk = restarts if not chunk_size else chunk_size
    Xs, Rs, Is, Cs = [], [], [], []
    for lo in range(0, restarts, chunk):
        X, R, I, C = iterate_rows(E, P.m, X0[lo:lo + chunk], tol, max_iter, damping)
        Xs.append(X)
        Rs.append(R)
        Is.append(I)
        Cs.append(C)
    X, R, I, C = (np.concatenate(a) for a in (Xs, Rs, Is, Cs))
    good = np.flatnonzero(C)
    reps = cluster_points(X[good], cluster_radius)
    pts = [X[good[r]] for r in reps]
    return SolveReport(points=pts, residuals=[float(R[good[r]]) for r in reps],
                       iterations=[int(i) for i in I], converged_starts=int(C.sum()),
                       total_starts=restarts, seed=seed)


# ----------------------------------------------------------------------------
# Newton polish on the simplex hyperplane
# ----------------------------------------------------------------------------

def jacobian(E: np.ndarray, n: int, m: int, x: np.ndarray) -> np.ndarray:
    """Jacobian of ``x -> P x^(m)``: the sum over slots of ``P`` with ``e_j`` in that slot."""
    T = E.reshape((n,) * (m + 1))
    J = np.zeros((n, n))
    letters = "bcdefghijklmnopqrstuvwxyz"[:m]
    for s in range(m):
        operands = [T]
        subs = ["a" + letters]
        for t in range(m):
            if t != s:
                operands.append(x)
                subs.append(letters[t])
        spec = ",".join(subs) + "->a" + letters[s]
        J += np.einsum(spec, *operands)
    return J


@lru_cache(maxsize=None)
def _hyperplane_basis(n: int) -> np.ndarray:
    """Orthonormal basis (``n x (n-1)``) of ``{d : sum(d) = 0}``."""
    A = np.eye(n)[:, :-1] - np.eye(n)[:, [-1]]
    Q, _ = np.linalg.qr(A)
    return Q


def newton_polish(P: TransitionTensor, x0, tol: float = 1e-12, max_iter: int = 50,
                  singular_tol: float = 1e-9) -> tuple[np.ndarray | None, float]:
    """Newton's method for ``P x^(m) = x`` restricted to ``sum(x) = 1``.

    Returns ``(point, residual)``; ``point`` is ``None`` when the projected
    Jacobian is singular (non-isolated stationary points) or the iterate
    leaves the simplex.
    """
    n, m = P.n, P.m
    E = P.as_float()
    x = np.asarray(x0, dtype=float).copy()
    if n == 1:
        return np.ones(1), float(abs(E[0, 0] - 1.0))
    B = _hyperplane_basis(n)
    I = np.eye(n)
    res = np.inf
    for _ in range(max_iter):
        G = E @ kron_power_rows(x[None, :], m)[0] - x
        res = float(np.max(np.abs(G)))
        if res <= tol * 1e-3:
            break
        A = (jacobian(E, n, m, x) - I) @ B
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= singular_tol * max(1.0, sv[0]):
            return None, res
        dy, *_ = np.linalg.lstsq(A, -G, rcond=None)
        step = B @ dy
        x = x + step
        if np.max(np.abs(step)) < 1e-17:
            break
        if np.max(np.abs(x)) > 10:
            return None, res
    if x.min() < -1e-9:
        return None, res
    x = np.maximum(x, 0.0)
    x /= x.sum()
    res = float(residual_rows(E, x[None, :], m)[0])
    return x, res


# ----------------------------------------------------------------------------
# simplex grid enumeration
# ----------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _compositions(n: int, r: int) -> np.ndarray:
    """All ``(k_1..k_n)`` with ``sum = r``, ascending lexicographically.

    Stars and bars: bar positions ``b_1 < .. < b_{n-1}`` in ``[0, r+n-2]``
    give ``k_1 = b_1`` and ``k_i = b_i - b_{i-1} - 1``; lexicographic order of
    the bars is lexicographic order of the counts.
    """
    if n == 1:
        out = np.array([[r]], dtype=np.int64)
    else:
        count = math.comb(r + n - 1, n - 1)
        flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(r + n - 1), n - 1)),
                           dtype=np.int64, count=count * (n - 1))
        bars = np.empty((count, n + 1), dtype=np.int64)
        bars[:, 0] = -1
        bars[:, 1:n] = flat.reshape(count, n - 1)
        bars[:, n] = r + n - 1
        out = np.diff(bars, axis=1) - 1
    out.setflags(write=False)
    return out


def simplex_lattice(n: int, resolution: int) -> np.ndarray:
    """Integer points of ``{k : k_i >= 0, sum k = resolution}``."""
    return _compositions(n, resolution)


def lattice_size(n: int, resolution: int) -> int:
    return math.comb(resolution + n - 1, n - 1)


def _lattice_keys(K: np.ndarray, r: int) -> np.ndarray:
    # lexicographic order of the leading n-1 counts == ascending base-(r+1) key
    key = np.zeros(K.shape[0], dtype=np.int64)
    for a in range(K.shape[1] - 1):
        key = key * (r + 1) + K[:, a]
    return key


def _local_minima(K: np.ndarray, res: np.ndarray, sel: np.ndarray, r: int) -> np.ndarray:
    """Subset of ``sel`` whose residual is <= that of every lattice neighbour."""
    n = K.shape[1]
    keys = _lattice_keys(K, r)
    keep = np.ones(sel.size, dtype=bool)
    Ks = K[sel]
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            Nb = Ks.copy()
            Nb[:, a] += 1
            Nb[:, b] -= 1
            ok = Nb[:, b] >= 0
            if not ok.any():
                continue
            pos = np.searchsorted(keys, _lattice_keys(Nb[ok], r))
            idx = np.flatnonzero(ok)
            keep[idx] &= res[sel[idx]] <= res[pos]
    return sel[keep]


def enumerate_stationary_grid(P: TransitionTensor, resolution: int, refine_tol: float = 1e-12,
                              cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
                              damping: float = DEFAULT_DAMPING, max_iter: int = 2000,
                              chunk: int = 20_000) -> list[np.ndarray]:
    """Stationary points found by scanning the simplex lattice of spacing ``1/resolution``.

    Lattice points with residual ``<= refine_tol`` are kept as they are.  Every
    other lattice point whose residual is within the Lipschitz bound
    ``(m n + 1)/resolution`` and no larger than any lattice neighbour's is a
    candidate: it is polished by Newton directly (this also reaches repelling
    fixed points) and by damped iteration followed by Newton.  Survivors with
    residual ``<= refine_tol`` are deduplicated at ``cluster_radius``.

    The result is sorted in descending lexicographic order.
    """
    if resolution < 1:
        raise InvalidArgumentError("resolution must be >= 1")
    n, m, r = P.n, P.m, resolution
    E = P.as_float()
    K = simplex_lattice(n, r)
    res = np.empty(K.shape[0])
    for lo in range(0, K.shape[0], chunk):
        X = K[lo:lo + chunk] / r
        res[lo:lo + chunk] = residual_rows(E, X, m)

    exact_idx = np.flatnonzero(res <= refine_tol)
    threshold = (m * n + 1) / r
    sel = np.flatnonzero((res > refine_tol) & (res <= threshold))
    cand = _local_minima(K, res, sel, r) if sel.size else sel

    found: list[np.ndarray] = []
    if cand.size:
        starts = K[cand] / r
        for x in starts:
            y, rr = newton_polish(P, x, refine_tol)
            if y is not None and rr <= refine_tol:
                found.append(y)
        Xi, Ri, _, Ci = iterate_rows(E, m, starts, refine_tol, max_iter, damping)
        for x, rr, ok in zip(Xi, Ri, Ci):
            y, ry = newton_polish(P, x, refine_tol)
            if y is not None and ry <= refine_tol:
                found.append(y)
            elif ok:
                found.append(x)

    base = K[exact_idx] / r
    out = list(base)
    if found:
        F = np.asarray(found)
        tree = cKDTree(base) if len(base) else None
        fresh = []
        for y in F:
            if tree is not None and tree.query_ball_point(y, cluster_radius, p=np.inf):
                continue
            fresh.append(y)
        for j in cluster_points(np.asarray(fresh), cluster_radius) if fresh else []:
            out.append(fresh[j])
    out.sort(key=lambda p: tuple(-p))
    return out


# ----------------------------------------------------------------------------
# pipeline: multi-start, then grid fallback
# ----------------------------------------------------------------------------

def solve_pipeline(P: TransitionTensor, restarts: int = 256, seed: int = 0, tol: float = 1e-12,
                   max_iter: int = 10_000, resolution: int = 30,
                   cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> SolveReport:
    """Multi-start iteration; if no start converges, fall back to the grid scan."""
    rep = multi_start_solve(P, restarts, seed, tol, max_iter, cluster_radius)
    rep.sources = ["multistart"] * len(rep.points)
    if rep.points:
        return rep
    grid = enumerate_stationary_grid(P, resolution, refine_tol=tol, cluster_radius=cluster_radius)
    E = P.as_float()
    for p in grid:
        rep.points.append(p)
        rep.residuals.append(float(residual_rows(E, p[None, :], P.m)[0]))
        rep.sources.append("grid")
    return rep


def points_to_json(points) -> list:
    return [vector_to_json(p)["x"] for p in points]
