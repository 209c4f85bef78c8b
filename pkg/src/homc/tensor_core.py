"""Transition tensors of higher-order Markov chains and probability vectors.

A chain on ``n`` states that conditions on the last ``m`` states is stored as
a dense ``n x n**m`` hypermatrix.  Column ``c`` holds the conditional law of
the next state given the multi-index ``(i_1, ..., i_m)``; columns run in
lexicographic order, so for ``n = 2, m = 3`` they are
``111, 112, 121, 122, 211, 212, 221, 222``.

State labels are 1-based at every public boundary (multi-indices, column
positions, face indices) and 0-based inside numpy arrays.

Two arithmetic modes are supported: ``"float"`` (float64 arrays) and
``"rational"`` (object arrays of :class:`fractions.Fraction`).
"""

from __future__ import annotations

import itertools
import json
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidIndexError, ShapeError

Mode = Literal["float", "rational"]

VALIDATION_TOL = 1e-12
MAX_COLUMNS = 10**6


# ----------------------------------------------------------------------------
# index arithmetic
# ----------------------------------------------------------------------------

def col_index(idx: Sequence[int], n: int) -> int:
    """1-based column position of the multi-index ``idx`` (1-based entries).

    >>> col_index((1, 1, 2), 2)
    2
    """
    pos = 0
    for i in idx:
        if not 1 <= i <= n:
            raise InvalidIndexError(f"index component {i} outside [1, {n}]")
        pos = pos * n + (i - 1)
    return pos + 1


def col_unindex(pos: int, n: int, m: int) -> tuple[int, ...]:
    """Inverse of :func:`col_index`."""
    if not 1 <= pos <= n**m:
        raise InvalidIndexError(f"column position {pos} outside [1, {n**m}]")
    rem = pos - 1
    digits = []
    for _ in range(m):
        rem, d = divmod(rem, n)
        digits.append(d + 1)
    return tuple(reversed(digits))


def multi_indices(n: int, m: int) -> np.ndarray:
    """All multi-indices as an ``(n**m, m)`` array of 1-based labels, in column order."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * m).reshape(m, -1).T
    return grids + 1


# ----------------------------------------------------------------------------
# probability vectors
# ----------------------------------------------------------------------------

def _is_rational_array(a: np.ndarray) -> bool:
    return a.dtype == object


def as_vector(x, mode: Mode | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-d array in the requested arithmetic mode."""
    if isinstance(x, np.ndarray) and x.dtype == object:
        arr = x
    else:
        arr = np.asarray(x)
    if arr.ndim != 1:
        raise ShapeError(f"probability vector must be 1-d, got shape {arr.shape}")
    if mode is None:
        mode = "rational" if (arr.dtype == object or np.issubdtype(arr.dtype, np.integer)) else "float"
    if mode == "rational":
        return np.array([Fraction(v) for v in arr], dtype=object)
    return arr.astype(float)


def check_probability_vector(x, tol: float = VALIDATION_TOL) -> list[str]:
    """Problems with ``x`` as a point of the simplex (empty when it is one)."""
    arr = as_vector(x)
    problems = []
    for i, v in enumerate(arr):
        if v < 0:
            problems.append(f"entry {i + 1} is negative ({v})")
    total = sum(arr) if _is_rational_array(arr) else float(arr.sum())
    if _is_rational_array(arr):
        if total != 1:
            problems.append(f"entries sum to {total}, not 1")
    elif abs(total - 1.0) > tol:
        problems.append(f"entries sum to {total!r}, not 1")
    return problems


def probability_vector(x, mode: Mode | None = None, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Validated copy of ``x``; raises :class:`InvalidArgumentError` off the simplex."""
    arr = as_vector(x, mode)
    problems = check_probability_vector(arr, tol)
    if problems:
        raise InvalidArgumentError("not a probability vector: " + "; ".join(problems))
    arr.setflags(write=False)
    return arr


def vertex(n: int, i: int, mode: Mode = "float") -> np.ndarray:
    """Standard basis vector ``e_i`` (1-based ``i``)."""
    if not 1 <= i <= n:
        raise InvalidIndexError(f"vertex {i} outside [1, {n}]")
    if mode == "rational":
        out = np.array([Fraction(0)] * n, dtype=object)
        out[i - 1] = Fraction(1)
    else:
        out = np.zeros(n)
        out[i - 1] = 1.0
    return out


def barycenter(n: int, k: int | None = None, mode: Mode = "float") -> np.ndarray:
    """``f_k = (e_1 + ... + e_k) / k``; ``k`` defaults to ``n``."""
    k = n if k is None else k
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k={k} outside [1, {n}]")
    if mode == "rational":
        return np.array([Fraction(1, k)] * k + [Fraction(0)] * (n - k), dtype=object)
    out = np.zeros(n)
    out[:k] = 1.0 / k
    return out


def sample_simplex(n: int, count: int, rng: np.random.Generator, *, include_special: bool = True) -> np.ndarray:
    """Points of the simplex for sampling-based checks.

    With ``include_special`` the sample starts with every vertex, every edge
    midpoint and the barycenter; the remainder are Dirichlet draws, half with
    concentration 1 (uniform) and half with 0.3 (mass near faces).
    """
    pts = []
    if include_special:
        pts.extend(np.eye(n))
        for i, j in itertools.combinations(range(n), 2):
            p = np.zeros(n)
            p[[i, j]] = 0.5
            pts.append(p)
        pts.append(np.full(n, 1.0 / n))
    rest = max(count - len(pts), 0)
    half = rest // 2
    pts.extend(rng.dirichlet(np.ones(n), size=rest - half))
    pts.extend(rng.dirichlet(np.full(n, 0.3), size=half))
    return np.asarray(pts).reshape(-1, n)


# ----------------------------------------------------------------------------
# transition tensors
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TransitionTensor:
    """Order-``m`` transition tensor stored as an ``n x n**m`` hypermatrix.

    The constructor only checks shape and coerces the arithmetic mode;
    stochasticity is reported by :func:`validate` (and enforced by
    :meth:`validated`), so malformed tensors can still be inspected.
    """

    n: int
    m: int
    entries: np.ndarray = field(repr=False)
    mode: Mode = "float"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidArgumentError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if self.n**self.m > MAX_COLUMNS:
            raise InvalidArgumentError(f"n**m = {self.n**self.m} columns exceeds supported {MAX_COLUMNS}")
        if self.mode not in ("float", "rational"):
            raise InvalidArgumentError(f"unknown mode {self.mode!r}")
        arr = np.asarray(self.entries, dtype=object if self.mode == "rational" else float)
        if arr.shape != (self.n, self.n**self.m):
            raise ShapeError(f"expected shape {(self.n, self.n**self.m)}, got {arr.shape}")
        if self.mode == "rational":
            arr = np.vectorize(Fraction, otypes=[object])(arr)
            flt = arr.astype(float)
        else:
            arr = arr.copy()
            flt = arr
        arr.setflags(write=False)
        flt.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "_float", flt)

    # -- construction helpers ------------------------------------------------
    @classmethod
    def from_columns(cls, columns, m: int, mode: Mode = "float") -> "TransitionTensor":
        cols = np.asarray(columns, dtype=object if mode == "rational" else float)
        return cls(cols.shape[1], m, cols.T, mode)

    @classmethod
    def from_slices(cls, slices: Sequence, mode: Mode = "float") -> "TransitionTensor":
        """Second-order tensor from slices ``P_1..P_n`` with ``P_i[r, s] = p_{r,i,s}``."""
        mats = [np.asarray(s, dtype=object if mode == "rational" else float) for s in slices]
        n = len(mats)
        for s in mats:
            if s.shape != (n, n):
                raise ShapeError(f"each slice must be {n}x{n}, got {s.shape}")
        return cls(n, 2, np.hstack(mats), mode)

    # -- views -----------------------------------------------------------------
    @property
    def num_columns(self) -> int:
        return self.n**self.m

    def slice(self, i: int) -> np.ndarray:
        """Block of columns with leading index ``i`` (1-based), ``n x n**(m-1)``.

        For ``m = 2`` this is the column-stochastic matrix ``P_i``.
        """
        if not 1 <= i <= self.n:
            raise InvalidIndexError(f"slice {i} outside [1, {self.n}]")
        w = self.n ** (self.m - 1)
        return self.entries[:, (i - 1) * w:i * w]

    def column(self, idx: Sequence[int]) -> np.ndarray:
        if len(idx) != self.m:
            raise InvalidIndexError(f"multi-index {tuple(idx)} has length {len(idx)}, expected {self.m}")
        return self.entries[:, col_index(idx, self.n) - 1]

    def as_float(self) -> np.ndarray:
        """Entries as a read-only float64 array."""
        return self._float

    def to_mode(self, mode: Mode) -> "TransitionTensor":
        if mode == self.mode:
            return self
        if mode == "float":
            return TransitionTensor(self.n, self.m, self.as_float(), "float")
        return TransitionTensor(self.n, self.m, self.entries.astype(object), "rational")

    def equals(self, other: "TransitionTensor") -> bool:
        """Exact equality of shape, mode and every entry."""
        return (self.n, self.m, self.mode) == (other.n, other.m, other.mode) and bool(
            np.all(self.entries == other.entries))

    def validated(self, tol: float = VALIDATION_TOL) -> "TransitionTensor":
        problems = validate(self, tol)
        if problems:
            raise InvalidArgumentError(f"invalid transition tensor: {problems[0]}")
        return self


# ----------------------------------------------------------------------------
# Kronecker powers and application
# ----------------------------------------------------------------------------

def kron_power(x, m: int) -> np.ndarray:
    """``x ⊗ x ⊗ ... ⊗ x`` (``m`` factors), indexed like the tensor columns."""
    if m < 1:
        raise InvalidArgumentError(f"Kronecker power needs m >= 1, got {m}")
    arr = as_vector(x)
    out = arr
    for _ in range(m - 1):
        out = np.multiply.outer(out, arr).reshape(-1)
    return out


def kron_power_rows(X: np.ndarray, m: int) -> np.ndarray:
    """Row-wise Kronecker powers of a ``(R, n)`` float array, shape ``(R, n**m)``."""
    out = X
    for _ in range(m - 1):
        out = (out[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)
    return out


def _check_dims(P: TransitionTensor, x: np.ndarray) -> None:
    if x.shape != (P.n,):
        raise ShapeError(f"vector of length {x.shape[0] if x.ndim else 0} does not match n={P.n}")


def apply(P: TransitionTensor, x) -> np.ndarray:
    """One step of the chain's mean-field map, ``P x^(m)``."""
    if P.mode == "rational" and _rational_input(x):
        arr = as_vector(x, "rational")
        _check_dims(P, arr)
        return P.entries.dot(kron_power(arr, P.m))
    arr = as_vector(x, "float")
    _check_dims(P, arr)
    return P.as_float() @ kron_power(arr, P.m)


def _rational_input(x) -> bool:
    arr = x if isinstance(x, np.ndarray) else np.asarray(x, dtype=object)
    return all(isinstance(v, numbers.Rational) for v in arr.ravel())


def apply_rows(E: np.ndarray, X: np.ndarray, m: int) -> np.ndarray:
    """Batched float application: row ``r`` of the result is ``E @ kron(X[r])``.

    Uses a plain (non-BLAS) contraction so each row's result does not depend
    on how many rows are processed together.
    """
    K = kron_power_rows(X, m)
    return np.einsum("rc,ic->ri", K, E, optimize=False)


def residual(P: TransitionTensor, x):
    """Max-norm of ``P x^(m) - x``; zero exactly at stationary vectors."""
    y = apply(P, x)
    arr = as_vector(x, "rational" if y.dtype == object else "float")
    d = y - arr
    if d.dtype == object:
        return max(abs(v) for v in d)
    return float(np.max(np.abs(d)))


def residual_rows(E: np.ndarray, X: np.ndarray, m: int) -> np.ndarray:
    return np.max(np.abs(apply_rows(E, X, m) - X), axis=1)


# ----------------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: Literal["negative", "above_one", "column_sum"]
    column: tuple[int, ...]
    row: int | None
    magnitude: float

    def __str__(self):
        where = f"row {self.row}, column {self.column}" if self.row else f"column {self.column}"
        return f"{self.kind} at {where} (magnitude {self.magnitude:.3g})"


def validate(P: TransitionTensor, tolerance: float = VALIDATION_TOL) -> list[Violation]:
    """All violated tensor invariants; an empty list means ``P`` is valid.

    Rational tensors are checked exactly, float tensors within ``tolerance``.
    """
    exact = P.mode == "rational"
    tol = 0 if exact else tolerance
    E = P.entries
    out: list[Violation] = []
    for c in range(P.num_columns):
        idx = col_unindex(c + 1, P.n, P.m)
        col = E[:, c]
        for r in range(P.n):
            v = col[r]
            if v < -tol:
                out.append(Violation("negative", idx, r + 1, float(-v)))
            elif v > 1 + tol:
                out.append(Violation("above_one", idx, r + 1, float(v - 1)))
        total = sum(col) if exact else float(np.sum(col))
        if abs(total - 1) > tol:
            out.append(Violation("column_sum", idx, None, float(abs(total - 1))))
    return out


# ----------------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------------

def _encode(v, mode: Mode):
    if mode == "rational":
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"
    return float(v)


def _decode(v, mode: Mode):
    if mode == "rational":
        return Fraction(v) if isinstance(v, (str, int)) else Fraction(str(v))
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def tensor_to_json(P: TransitionTensor) -> dict:
    return {
        "n": P.n,
        "m": P.m,
        "mode": P.mode,
        "columns": [[_encode(v, P.mode) for v in P.entries[:, c]] for c in range(P.num_columns)],
    }


def tensor_from_json(data: dict) -> TransitionTensor:
    try:
        n, m, mode = int(data["n"]), int(data["m"]), data.get("mode", "float")
        cols = data["columns"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed tensor JSON: {exc}") from None
    if mode not in ("float", "rational"):
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    if len(cols) != n**m or any(len(c) != n for c in cols):
        raise ShapeError(f"tensor JSON must hold {n**m} columns of length {n}")
    dec = [[_decode(v, mode) for v in c] for c in cols]
    return TransitionTensor.from_columns(dec, m, mode)


def vector_to_json(x) -> dict:
    arr = as_vector(x)
    mode = "rational" if arr.dtype == object else "float"
    return {"x": [_encode(v, mode) for v in arr]}


def vector_from_json(data: dict, mode: Mode = "float") -> np.ndarray:
    return probability_vector([_decode(v, mode) for v in data["x"]], mode)


def save_tensor(P: TransitionTensor, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tensor_to_json(P), indent=1) + "\n")


def load_tensor(path: str | Path) -> TransitionTensor:
    return tensor_from_json(json.loads(Path(path).read_text()))


def identity_chain(n: int, mode: Mode = "rational") -> TransitionTensor:
    """First-order chain with ``P = I_n``."""
    E = np.eye(n, dtype=int).astype(object if mode == "rational" else float)
    return TransitionTensor(n, 1, E, mode)


def columns_equal_to(n: int, m: int, col: Iterable, mode: Mode = "rational") -> TransitionTensor:
    """Tensor whose every column equals ``col``."""
    c = np.asarray(list(col), dtype=object if mode == "rational" else float)
    return TransitionTensor(n, m, np.tile(c[:, None], (1, n**m)), mode)
