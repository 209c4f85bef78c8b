"""Checking claimed stationary sets and the geometry of stationary points on edges."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidArgumentError, WrongOrderError
from .solvers import FLOAT_EQ_TOL, SolutionSet, iterate_rows, solve_quadratic_2x2
from .tensor_core import TransitionTensor, residual_rows

Kind = Literal["single_point", "finite_set", "face", "face_plus_barycenter", "full_simplex"]
KINDS = ("single_point", "finite_set", "face", "face_plus_barycenter", "full_simplex")

MEMBERSHIP_TOL = 1e-12
EXCLUSION_RADIUS = 0.05
INTERIOR_MARGIN = 0.01


@dataclass(frozen=True, eq=False)
class StationaryDescription:
    """A claimed stationary set.  ``face_indices`` are 1-based state labels."""

    kind: Kind
    points: tuple = ()
    face_indices: tuple[int, ...] = ()

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise InvalidArgumentError(f"unknown description kind {self.kind!r}")
        pts = tuple(np.asarray(p, dtype=float) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "face_indices", tuple(int(i) for i in self.face_indices))
        if kind in ("single_point", "finite_set"):
            if not pts or (kind == "single_point" and len(pts) != 1):
                raise InvalidArgumentError(f"{kind} needs explicit points")
            for p in pts:
                if np.any(p < -MEMBERSHIP_TOL) or abs(p.sum() - 1) > 1e-9:
                    raise InvalidArgumentError(f"point {p} is not in the simplex")
            for a, b in itertools.combinations(pts, 2):
                if a.shape == b.shape and np.max(np.abs(a - b)) == 0:
                    raise InvalidArgumentError("finite_set points must be distinct")
        if kind in ("face", "face_plus_barycenter") and not self.face_indices:
            raise InvalidArgumentError(f"{kind} needs face_indices")

    def check_dimension(self, n: int) -> None:
        for i in self.face_indices:
            if not 1 <= i <= n:
                raise InvalidArgumentError(f"face index {i} outside [1, {n}]")
        for p in self.points:
            if p.shape != (n,):
                raise InvalidArgumentError(f"point of length {p.shape[0]} does not match n={n}")

    def to_json(self) -> dict:
        return {"kind": self.kind, "points": [list(map(float, p)) for p in self.points],
                "face_indices": list(self.face_indices)}

    @classmethod
    def from_json(cls, data: dict) -> "StationaryDescription":
        pts = [[float(Fraction(v)) if isinstance(v, str) else float(v) for v in p]
               for p in data.get("points", [])]
        return cls(data["kind"], tuple(pts), tuple(data.get("face_indices", ())))


def face_distance(X: np.ndarray, face: Sequence[int]) -> np.ndarray:
    """Max-norm distance from each row of ``X`` to ``conv{e_i : i in face}``.

    Off-face coordinates must drop to zero, and their mass ``s`` has to be
    spread over the face, which moves some face coordinate by at least
    ``s / |face|``; spreading it evenly attains that bound.
    """
    X = np.atleast_2d(X)
    mask = np.zeros(X.shape[1], dtype=bool)
    mask[np.asarray(face) - 1] = True
    out_part = X[:, ~mask]
    if out_part.shape[1] == 0:
        return np.zeros(X.shape[0])
    return np.maximum(out_part.max(axis=1), out_part.sum(axis=1) / mask.sum())


def sample_face(n: int, face: Sequence[int], count: int, rng: np.random.Generator) -> np.ndarray:
    """Vertices and barycenter of the face, then uniform random face points."""
    face = np.asarray(face) - 1
    k = face.size
    pts = []
    for i in face:
        p = np.zeros(n)
        p[i] = 1.0
        pts.append(p)
    bary = np.zeros(n)
    bary[face] = 1.0 / k
    pts.append(bary)
    extra = max(count - len(pts), 0)
    if extra:
        W = rng.dirichlet(np.ones(k), size=extra)
        Z = np.zeros((extra, n))
        Z[:, face] = W
        pts.extend(Z)
    return np.asarray(pts[:max(count, 1)])


@dataclass
class VerificationReport:
    verdict: bool
    membership_max_residual: float
    exclusion_min_residual: float | None
    witnesses: list = field(default_factory=list)
    midpoint_min_residual: float | None = None
    membership_samples: int = 0
    exclusion_samples: int = 0

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "membership_max_residual": self.membership_max_residual,
            "exclusion_min_residual": self.exclusion_min_residual,
            "midpoint_min_residual": self.midpoint_min_residual,
            "membership_samples": self.membership_samples,
            "exclusion_samples": self.exclusion_samples,
            "witnesses": self.witnesses,
        }


def _distance_to_description(X: np.ndarray, desc: StationaryDescription, n: int) -> np.ndarray:
    d = np.full(X.shape[0], np.inf)
    if desc.kind in ("face", "face_plus_barycenter"):
        d = np.minimum(d, face_distance(X, desc.face_indices))
    if desc.kind == "face_plus_barycenter":
        d = np.minimum(d, np.max(np.abs(X - 1.0 / n), axis=1))
    for p in desc.points:
        d = np.minimum(d, np.max(np.abs(X - p), axis=1))
    if desc.kind == "full_simplex":
        d[:] = 0.0
    return d


def verify_description(P: TransitionTensor, desc: StationaryDescription, samples: int = 100, seed: int = 0,
                       tol: float = MEMBERSHIP_TOL, exclusion_radius: float = EXCLUSION_RADIUS) -> VerificationReport:
    """Sample-level evidence that the stationary set of ``P`` is ``desc``.

    (a) every described point, and ``samples`` random points of a described
    face, has residual ``<= tol``; (b) ``samples`` random points at max-norm
    distance ``>= exclusion_radius`` from the set have residual ``> tol``;
    (c) for ``face_plus_barycenter``, the points ``t f_n + (1-t) y`` for
    ``t = 0.1..0.9`` and each sampled face point ``y`` are not stationary.
    """
    n, m = P.n, P.m
    desc.check_dimension(n)
    rng = np.random.default_rng(seed)
    E = P.as_float()
    witnesses = []

    members = [np.asarray(p) for p in desc.points]
    face_pts = np.empty((0, n))
    if desc.kind in ("face", "face_plus_barycenter"):
        face_pts = sample_face(n, desc.face_indices, samples, rng)
        members.extend(face_pts)
    if desc.kind == "face_plus_barycenter":
        members.append(np.full(n, 1.0 / n))
    if desc.kind == "full_simplex":
        members.extend(np.eye(n))
        members.extend(rng.dirichlet(np.ones(n), size=max(samples - n, 1)))
    M = np.asarray(members)
    mres = residual_rows(E, M, m)
    for x, r in zip(M, mres):
        if r > tol and len(witnesses) < 10:
            witnesses.append({"type": "non_stationary_member", "point": x.tolist(), "residual": float(r)})
    ok = bool(np.all(mres <= tol))

    excl_min = None
    excluded = np.empty((0, n))
    if desc.kind != "full_simplex":
        found = []
        attempts = 0
        while sum(len(f) for f in found) < samples and attempts < 200:
            C = np.vstack([rng.dirichlet(np.ones(n), size=samples), rng.dirichlet(np.full(n, 0.3), size=samples)])
            found.append(C[_distance_to_description(C, desc, n) >= exclusion_radius])
            attempts += 1
        excluded = np.vstack(found)[:samples] if found else excluded
        if len(excluded):
            eres = residual_rows(E, excluded, m)
            excl_min = float(eres.min())
            for x, r in zip(excluded, eres):
                if r <= tol and len(witnesses) < 10:
                    witnesses.append({"type": "stationary_outside", "point": x.tolist(), "residual": float(r)})
            ok = ok and excl_min > tol

    mid_min = None
    if desc.kind == "face_plus_barycenter":
        fn = np.full(n, 1.0 / n)
        ts = np.arange(1, 10) / 10.0
        mids = np.vstack([t * fn + (1 - t) * face_pts for t in ts])
        mres_mid = residual_rows(E, mids, m)
        mid_min = float(mres_mid.min())
        for x, r in zip(mids, mres_mid):
            if r <= tol and len(witnesses) < 10:
                witnesses.append({"type": "stationary_midpoint", "point": x.tolist(), "residual": float(r)})
        ok = ok and mid_min > tol

    return VerificationReport(ok, float(mres.max()), excl_min, witnesses, mid_min, len(M), len(excluded))


# ----------------------------------------------------------------------------
# edges
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeRestriction:
    """Two-state parameters of the chain restricted to the edge ``conv{e_i, e_j}``.

    ``leak_*`` is the largest probability the relevant columns send outside
    ``{i, j}``: ``leak_interior`` covers columns ``(i,i), (i,j), (j,i), (j,j)``
    (all weighted at interior edge points), ``leak_at_i`` / ``leak_at_j`` only
    the column used at the endpoint.
    """

    n: int
    i: int
    j: int
    a1: object
    a2: object
    b1: object
    b2: object
    leak_interior: float
    leak_at_i: float
    leak_at_j: float

    @property
    def params(self) -> tuple:
        return (self.a1, self.a2, self.b1, self.b2)

    def solve(self) -> SolutionSet:
        return solve_quadratic_2x2(*self.params)

    def point(self, z) -> np.ndarray:
        """``z e_i + (1 - z) e_j``."""
        x = np.zeros(self.n)
        x[self.i - 1] = z
        x[self.j - 1] = 1 - z
        return x

    def to_json(self) -> dict:
        enc = (lambda v: str(v) if isinstance(v, Fraction) else float(v))
        return {"i": self.i, "j": self.j, "a1": enc(self.a1), "a2": enc(self.a2), "b1": enc(self.b1),
                "b2": enc(self.b2), "leak_interior": self.leak_interior,
                "leak_at_i": self.leak_at_i, "leak_at_j": self.leak_at_j}


def restrict_to_edge(P: TransitionTensor, i: int, j: int) -> EdgeRestriction:
    """Extract ``a1 = P_i[i,i], b1 = P_i[i,j], a2 = P_j[i,i], b2 = P_j[i,j]`` (1-based).

    On the edge, ``x = z e_i + (1-z) e_j`` is stationary iff ``g(z) = 0`` for
    these parameters and nothing leaks to states outside ``{i, j}``.
    """
    if P.m != 2:
        raise WrongOrderError(f"edge restriction needs m = 2, got m = {P.m}")
    n = P.n
    if i == j:
        raise InvalidArgumentError("edge needs two distinct states")
    if not (1 <= i <= n and 1 <= j <= n):
        raise InvalidArgumentError(f"states ({i}, {j}) outside [1, {n}]")
    Pi, Pj = P.slice(i), P.slice(j)
    a1, b1 = Pi[i - 1, i - 1], Pi[i - 1, j - 1]
    a2, b2 = Pj[i - 1, i - 1], Pj[i - 1, j - 1]
    F = P.as_float()
    others = [r for r in range(n) if r not in (i - 1, j - 1)]

    def leak(col):
        return float(F[others, col].sum()) if others else 0.0

    c_ii, c_ij = (i - 1) * n + (i - 1), (i - 1) * n + (j - 1)
    c_ji, c_jj = (j - 1) * n + (i - 1), (j - 1) * n + (j - 1)
    return EdgeRestriction(n, i, j, a1, a2, b1, b2, max(leak(c) for c in (c_ii, c_ij, c_ji, c_jj)),
                           leak(c_ii), leak(c_jj))


@dataclass
class EdgeReport:
    i: int
    j: int
    interior_points: list
    all_stationary: bool
    case_label: str | None
    case1_conditions: bool
    sampled_max_residual: float | None
    violation: bool

    @property
    def dichotomy_holds(self) -> bool:
        return not self.violation

    def to_json(self) -> dict:
        return {"edge": [self.i, self.j], "interior_points": [float(z) for z in self.interior_points],
                "all_stationary": self.all_stationary, "case": self.case_label,
                "case1_conditions": self.case1_conditions,
                "sampled_max_residual": self.sampled_max_residual, "violation": self.violation}


def _case1(er: EdgeRestriction) -> bool:
    a1, a2, b1, b2 = er.params
    if all(isinstance(v, Fraction) for v in er.params):
        return a1 == 1 and a2 + b1 == 1 and b2 == 0
    a1, a2, b1, b2 = map(float, er.params)
    return abs(a1 - 1) <= FLOAT_EQ_TOL and abs(a2 + b1 - 1) <= FLOAT_EQ_TOL and abs(b2) <= FLOAT_EQ_TOL


def edge_dichotomy_check(P: TransitionTensor, i: int, j: int, samples: int = 50,
                         tol: float = MEMBERSHIP_TOL, margin: float = INTERIOR_MARGIN) -> EdgeReport:
    """Two interior stationary points on an edge force the whole edge to be stationary.

    Interior points (edge coordinate in ``(margin, 1 - margin)``) come from the
    two-state solution together with the leakage check.  When there are at
    least two, the edge must satisfy the all-solutions conditions exactly and
    ``samples`` evenly spaced edge points must have residual ``<= tol``;
    otherwise the report flags a violation.
    """
    er = restrict_to_edge(P, i, j)
    E = P.as_float()
    sol = er.solve()
    interior: list = []
    all_stat = False
    if er.leak_interior <= tol:
        if sol.kind == "interval_all":
            all_stat = True
        else:
            for z in sol.roots:
                zf = float(z)
                if margin < zf < 1 - margin and residual_rows(E, er.point(zf)[None, :], 2)[0] <= tol:
                    interior.append(zf)
    case1 = _case1(er)
    sampled = None
    violation = False
    if all_stat or len(interior) >= 2:
        zs = np.linspace(0.0, 1.0, samples)
        X = np.vstack([er.point(z) for z in zs])
        sampled = float(residual_rows(E, X, 2).max())
        violation = not (case1 and er.leak_interior <= tol and sampled <= tol)
    return EdgeReport(i, j, interior, all_stat, sol.case_label, case1, sampled, violation)


def all_edge_reports(P: TransitionTensor, **kw) -> list[EdgeReport]:
    return [edge_dichotomy_check(P, i, j, **kw) for i, j in itertools.combinations(range(1, P.n + 1), 2)]


# ----------------------------------------------------------------------------
# exploratory probe for higher-dimensional faces
# ----------------------------------------------------------------------------

@dataclass
class ConjectureProbeReport:
    """Evidence only: says nothing about faces it did not sample."""

    face_indices: tuple[int, ...]
    interior_points: list
    affinely_independent: bool
    face_sampled: bool
    face_fully_stationary: bool | None
    sampled_max_residual: float | None

    @property
    def conclusive(self) -> bool:
        return self.affinely_independent

    def to_json(self) -> dict:
        return {"face_indices": list(self.face_indices),
                "interior_points": [list(map(float, p)) for p in self.interior_points],
                "affinely_independent": self.affinely_independent,
                "face_fully_stationary": self.face_fully_stationary,
                "sampled_max_residual": self.sampled_max_residual}


def _affinely_independent_subset(points: list, k: int) -> list:
    """Greedily pick up to ``k`` affinely independent points."""
    chosen: list = []
    for p in points:
        trial = chosen + [p]
        if len(trial) == 1:
            chosen = trial
            continue
        D = np.asarray([q - trial[0] for q in trial[1:]])
        if np.linalg.matrix_rank(D, tol=1e-8) == len(trial) - 1:
            chosen = trial
        if len(chosen) == k:
            break
    return chosen


def conjecture_probe(P: TransitionTensor, face_indices: Sequence[int], trials: int = 200, seed: int = 0,
                     tol: float = MEMBERSHIP_TOL, face_samples: int = 500,
                     margin: float = INTERIOR_MARGIN) -> ConjectureProbeReport:
    """Look for ``k`` affinely independent stationary points inside a ``(k-1)``-face.

    Damped iteration is started from random interior points of the face;
    limits that stay in the face interior (off-face mass ``<= tol``, face
    coordinates ``> margin``) are collected.  If ``k`` affinely independent
    ones turn up, the face is sampled densely and the report states whether
    every sample was stationary.
    """
    if P.m != 2:
        raise WrongOrderError(f"probe is defined for m = 2, got m = {P.m}")
    face = tuple(sorted(int(i) for i in face_indices))
    k = len(face)
    if k < 3:
        raise InvalidArgumentError("probe needs a face with at least 3 vertices")
    n = P.n
    rng = np.random.default_rng(seed)
    fidx = np.asarray(face) - 1
    W = rng.dirichlet(np.ones(k), size=trials)
    X0 = np.zeros((trials, n))
    X0[:, fidx] = W
    X, R, _, C = iterate_rows(P.as_float(), 2, X0, tol, 5000, 0.2)
    mask = np.zeros(n, dtype=bool)
    mask[fidx] = True
    inside = [x for x, ok in zip(X, C)
              if ok and x[~mask].sum() <= tol and x[fidx].min() > margin]
    chosen = _affinely_independent_subset(inside, k)
    indep = len(chosen) == k
    fully = None
    smax = None
    if indep:
        S = sample_face(n, face, face_samples, rng)
        res = residual_rows(P.as_float(), S, 2)
        smax = float(res.max())
        fully = bool(smax <= tol)
    return ConjectureProbeReport(face, chosen, indep, indep, fully, smax)
