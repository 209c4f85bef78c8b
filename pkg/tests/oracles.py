"""Independent reference computations used to check the package.

Nothing here calls into the code paths it checks: the root scan evaluates
the two-state polynomial directly, the sampling oracle expands the tensor
action term by term, and the tensor builders below write entries out by hand.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numba
import numpy as np


# ----------------------------------------------------------------------------
# dense root scan for the two-state quadratic
# ----------------------------------------------------------------------------

@numba.njit(cache=True)
def _g(a1, a2, b1, b2, x):
    """First coordinate of ``(x A + y B)(x, y)^T`` minus ``x``, with ``y = 1 - x``."""
    y = 1.0 - x
    return x * (a1 * x + b1 * y) + y * (a2 * x + b2 * y) - x


@numba.njit(cache=True)
def _bisect(a1, a2, b1, b2, lo, hi):
    glo = _g(a1, a2, b1, b2, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = _g(a1, a2, b1, b2, mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    return 0.5 * (lo + hi)


@numba.njit(cache=True)
def scan_many(params, steps):
    """Dense root scan of every parameter row on the grid ``k / steps``.

    The grid is walked once with all rows side by side; any step where ``g``
    hits zero or changes sign is logged and resolved afterwards: exact zeros
    at grid points are roots, sign changes are bisected to full precision.
    A row whose ``|g|`` never exceeds rounding level (``1e-13``) vanishes
    identically and gets count ``-1``.
    """
    R = params.shape[0]
    a1 = params[:, 0].copy()
    a2 = params[:, 1].copy()
    b1 = params[:, 2].copy()
    b2 = params[:, 3].copy()
    h = 1.0 / steps
    prev = b2.copy()  # g(0) = b2
    peak = np.abs(b2)
    hit = np.zeros(R, np.uint8)
    ev_r = [0]
    ev_k = [0]
    ev_r.clear()
    ev_k.clear()
    for r in range(R):
        if prev[r] == 0.0:
            ev_r.append(r)
            ev_k.append(0)
    for k in range(1, steps + 1):
        x = k * h
        y = 1.0 - x
        for r in range(R):
            g = x * (a1[r] * x + b1[r] * y) + y * (a2[r] * x + b2[r] * y) - x
            peak[r] = max(peak[r], abs(g))
            hit[r] = g * prev[r] <= 0.0
            prev[r] = g
        total = 0
        for r in range(R):
            total += hit[r]
        if total:
            for r in range(R):
                if hit[r]:
                    ev_r.append(r)
                    ev_k.append(k)

    counts = np.zeros(R, np.int64)
    roots = np.full((R, 8), np.nan)
    for e in range(len(ev_r)):
        r, k = ev_r[e], ev_k[e]
        x = k * h
        if k == 0:
            z = 0.0
        else:
            g = _g(a1[r], a2[r], b1[r], b2[r], x)
            gp = _g(a1[r], a2[r], b1[r], b2[r], (k - 1) * h) if k > 1 else b2[r]
            if g == 0.0:
                z = x
            elif gp == 0.0:
                continue  # zero already recorded at the previous grid point
            else:
                z = _bisect(a1[r], a2[r], b1[r], b2[r], (k - 1) * h, x)
        if counts[r] < 8:
            roots[r, counts[r]] = z
        counts[r] += 1
    for r in range(R):
        if peak[r] <= 1e-13:
            counts[r] = -1
    return counts, roots


def root_scan_many(params, steps=10**6):
    """Per row: ``("interval_all", [])`` or ``("finite", sorted roots)``."""
    counts, roots = scan_many(np.ascontiguousarray(params, dtype=float), steps)
    out = []
    for c, row in zip(counts, roots):
        out.append(("interval_all", []) if c == -1 else ("finite", sorted(row[:c])))
    return out


def root_scan(a1, a2, b1, b2, steps=10**6):
    return root_scan_many([[a1, a2, b1, b2]], steps)[0]


# ----------------------------------------------------------------------------
# tensor action written out term by term
# ----------------------------------------------------------------------------

def apply_by_terms(entries, n, m, x):
    """``sum over (i_1..i_m) of p[:, i_1..i_m] x_{i_1}...x_{i_m}`` with explicit loops."""
    out = [0] * n
    for c, idx in enumerate(itertools.product(range(n), repeat=m)):
        w = 1
        for i in idx:
            w = w * x[i]
        for r in range(n):
            out[r] = out[r] + entries[r][c] * w
    return out


def apply_by_slices(slices, x):
    """Second-order action ``(x_1 P_1 + ... + x_n P_n) x``."""
    n = len(slices)
    M = sum(x[i] * np.asarray(slices[i], dtype=float) for i in range(n))
    return M @ np.asarray(x, dtype=float)


def max_residual_on_samples(entries, n, m, X):
    E = np.asarray(entries, dtype=float)
    worst = 0.0
    for x in X:
        y = apply_by_terms(E, n, m, x)
        worst = max(worst, max(abs(y[r] - x[r]) for r in range(n)))
    return worst


def thm2_3_residual(x):
    """Residual of the n+1-points tensor via ``x_i^2 + (1 - sum x_j^2)/n`` (exact)."""
    n = len(x)
    ell = (1 - sum(v * v for v in x)) / n
    return max(abs(v * v + ell - v) for v in x)


# ----------------------------------------------------------------------------
# hand-written tensors
# ----------------------------------------------------------------------------

def theorem1_slices(v):
    """Slices ``P_i = I - diag(v_i) + e_i v_i^T`` written entry by entry."""
    n = len(v)
    slices = []
    for i in range(n):
        S = [[Fraction(0)] * n for _ in range(n)]
        for j in range(n):
            if j == i:
                S[i][i] = Fraction(1)
            else:
                S[j][j] = 1 - Fraction(v[i][j])
                S[i][j] = Fraction(v[i][j])
        slices.append(S)
    return slices


def hstack_slices(slices):
    n = len(slices)
    return [[slices[i][r][s] for i in range(n) for s in range(n)] for r in range(n)]


def simplex_points(n, count, rng):
    pts = [np.eye(n)[i] for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        p = np.zeros(n)
        p[[i, j]] = 0.5
        pts.append(p)
    pts.extend(rng.dirichlet(np.ones(n), size=count))
    return np.asarray(pts)


def apply_by_contraction(E, n, m, X):
    """Rows of ``X`` pushed through the tensor by contracting one slot at a time."""
    T = np.asarray(E, dtype=float).reshape((n,) * (m + 1))
    out = []
    for x in np.atleast_2d(X):
        A = T
        for _ in range(m):
            A = A @ x  # contracts the last remaining slot
        out.append(A)
    return np.asarray(out)


def sampled_max_residual(E, n, m, X):
    return float(np.max(np.abs(apply_by_contraction(E, n, m, X) - np.atleast_2d(X))))


def perturb_entry(E, r, c, delta=1e-3):
    """Add ``delta`` to entry ``(r, c)`` and renormalise that column (float copy)."""
    E = np.array(E, dtype=float)
    E[r, c] += delta
    E[:, c] /= E[:, c].sum()
    return E


def pick_small_entry(E, rng):
    """Random ``(row, column)`` with entry ``<= 1/2``; perturbing it always changes the tensor."""
    rows, cols = np.nonzero(np.asarray(E, dtype=float) <= 0.5)
    k = int(rng.integers(len(rows)))
    return int(rows[k]), int(cols[k])


def random_symmetric_v(n, rng):
    v = np.triu(rng.random((n, n)), 1)
    return v + v.T
