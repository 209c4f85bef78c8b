"""Universal stationarity, monomial column classes and irreducibility.

A tensor is *universally stationary* when every point of the simplex is
stationary.  For second-order chains these are exactly the tensors whose
slices have the form ``P_i = I - diag(v_i) + e_i v_i^T`` with a symmetric,
zero-diagonal parameter matrix ``v`` in ``[0, 1]``.

The symmetry requirement ``v_ij = v_ji`` is enforced here.  It is what the
two-state analysis forces (``a2 + b1 = 1`` on every edge); asymmetric ``v``
gives tensors that fail :func:`is_universally_stationary`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import CapacityError, InvalidParameterError, WrongOrderError
from .tensor_core import Mode, TransitionTensor, multi_indices

UNIVERSAL_FLOAT_TOL = 1e-12
MAX_IRREDUCIBLE_N = 20


# ----------------------------------------------------------------------------
# second-order universal family
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ThmOneParams:
    """Parameter matrix ``v`` (row ``i`` is ``v_i``) of a universal second-order chain."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=object if _is_rational(self.v) else float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvalidParameterError(f"v must be square, got shape {v.shape}")
        if v.dtype == object:
            v = np.vectorize(Fraction, otypes=[object])(v)
        n = v.shape[0]
        for i in range(n):
            if v[i, i] != 0:
                raise InvalidParameterError(f"v[{i + 1},{i + 1}] = {v[i, i]} must be 0")
            for j in range(n):
                if not 0 <= v[i, j] <= 1:
                    raise InvalidParameterError(f"v[{i + 1},{j + 1}] = {v[i, j]} outside [0, 1]")
                if v[i, j] != v[j, i]:
                    raise InvalidParameterError(
                        f"v[{i + 1},{j + 1}] = {v[i, j]} differs from v[{j + 1},{i + 1}] = {v[j, i]}")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def mode(self) -> Mode:
        return "rational" if self.v.dtype == object else "float"


def _is_rational(a) -> bool:
    arr = np.asarray(a, dtype=object)
    return all(isinstance(x, (int, Fraction)) for x in arr.ravel())


def _slices_from_v(v: np.ndarray) -> list[np.ndarray]:
    n = v.shape[0]
    one = Fraction(1) if v.dtype == object else 1.0
    slices = []
    for i in range(n):
        S = np.zeros((n, n), dtype=v.dtype)
        if v.dtype == object:
            S[:] = Fraction(0)
        for j in range(n):
            S[j, j] = one - v[i, j]
            S[i, j] = v[i, j]
        S[i, i] = one
        slices.append(S)
    return slices


def build_theorem1(params: ThmOneParams, mode: Mode | None = None) -> TransitionTensor:
    """Second-order tensor with slices ``P_i = I - diag(v_i) + e_i v_i^T``.

    Column ``j != i`` of ``P_i`` is ``(1 - v_ij) e_j + v_ij e_i``; column ``i`` is ``e_i``.
    """
    mode = mode or params.mode
    return TransitionTensor.from_slices(_slices_from_v(params.v), mode)


def theorem1_tensor(v, mode: Mode | None = None) -> TransitionTensor:
    return build_theorem1(ThmOneParams(np.asarray(v, dtype=object) if _is_rational(v) else np.asarray(v, float)), mode)


@dataclass(frozen=True)
class FormMismatch:
    """Why a tensor is not of the universal second-order form."""

    reason: str
    row: int | None
    column: tuple[int, ...]
    expected: object
    actual: object
    deviation: float
    partner_column: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {"reason": self.reason, "row": self.row, "column": list(self.column),
                "partner_column": list(self.partner_column) if self.partner_column else None,
                "expected": str(self.expected), "actual": str(self.actual),
                "deviation": self.deviation}


def is_theorem1_form(P: TransitionTensor, tolerance: float = UNIVERSAL_FLOAT_TOL) -> Union[ThmOneParams, FormMismatch]:
    """Recover ``v`` from ``P`` or report the first entry that rules the form out.

    ``v_ij`` is read from row ``i`` of column ``(i, j)``; every entry is then
    compared to the form that ``v`` implies, in column order, and finally
    ``v`` is checked for symmetry.
    """
    if P.m != 2:
        raise WrongOrderError(f"universal-form recognition needs m = 2, got m = {P.m}")
    n = P.n
    exact = P.mode == "rational"
    tol = 0 if exact else tolerance
    E = P.entries
    v = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        for j in range(n):
            v[i, j] = E[i, i * n + j] if i != j else (Fraction(0) if exact else 0.0)
    expected = np.hstack(_slices_from_v(v))
    for c in range(n * n):
        i, j = divmod(c, n)
        for r in range(n):
            dev = abs(E[r, c] - expected[r, c])
            if dev > tol:
                return FormMismatch("entry", r + 1, (i + 1, j + 1), expected[r, c], E[r, c], float(dev))
    for i in range(n):
        for j in range(i + 1, n):
            dev = abs(v[i, j] - v[j, i])
            if dev > tol:
                return FormMismatch("asymmetric", i + 1, (i + 1, j + 1), v[j, i], v[i, j], float(dev),
                                    partner_column=(j + 1, i + 1))
    if not exact:
        v = np.clip((v + v.T) / 2, 0.0, 1.0)
    return ThmOneParams(v)


# ----------------------------------------------------------------------------
# monomial classes
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialClass:
    """Columns whose multi-index has exponent multiset ``exponent``."""

    exponent: tuple[int, ...]
    columns: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.columns)


def multinomial(exponent) -> int:
    out = math.factorial(sum(exponent))
    for e in exponent:
        out //= math.factorial(e)
    return out


def column_exponents(n: int, m: int) -> np.ndarray:
    """Exponent vector (``n`` counts) of every column, shape ``(n**m, n)``."""
    idx = multi_indices(n, m) - 1
    out = np.zeros((n**m, n), dtype=np.int64)
    for s in range(m):
        np.add.at(out, (np.arange(n**m), idx[:, s]), 1)
    return out


def monomial_classes(n: int, m: int) -> list[MonomialClass]:
    """Partition of the ``n**m`` columns by monomial, in order of first column."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for c, e in enumerate(column_exponents(n, m)):
        groups.setdefault(tuple(int(v) for v in e), []).append(c + 1)
    return [MonomialClass(e, tuple(cols)) for e, cols in groups.items()]


def count_class_permutations(n: int, m: int) -> dict[tuple[int, ...], int]:
    """Number of within-class column rearrangements, ``size!``, per class."""
    return {cl.exponent: math.factorial(cl.size) for cl in monomial_classes(n, m)}


# ----------------------------------------------------------------------------
# exact universal-stationarity test
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class UniversalCertificate:
    universal: bool
    failing_row: int | None = None
    failing_class: tuple[int, ...] | None = None
    lhs: object = None
    rhs: object = None

    def to_json(self) -> dict:
        enc = (lambda v: None if v is None else (str(v) if isinstance(v, Fraction) else float(v)))
        return {"universal": self.universal, "failing_row": self.failing_row,
                "failing_class": list(self.failing_class) if self.failing_class else None,
                "lhs": enc(self.lhs), "rhs": enc(self.rhs)}


def class_sums(P: TransitionTensor) -> dict[tuple[int, ...], np.ndarray]:
    """Row-wise sums of ``P`` over each monomial class (exact for rational tensors)."""
    out = {}
    for cl in monomial_classes(P.n, P.m):
        cols = np.asarray(cl.columns) - 1
        block = P.entries[:, cols]
        if P.mode == "rational":
            out[cl.exponent] = np.array([sum(block[r]) for r in range(P.n)], dtype=object)
        else:
            out[cl.exponent] = block.sum(axis=1)
    return out


def class_targets(n: int, m: int, exponent) -> list[Fraction]:
    """Required class sums ``(alpha_i / m) * multinomial(alpha)`` for each row ``i``."""
    size = multinomial(exponent)
    return [Fraction(a * size, m) for a in exponent]


def is_universally_stationary(P: TransitionTensor, tolerance: float = UNIVERSAL_FLOAT_TOL) -> UniversalCertificate:
    """Decide whether ``P x^(m) = x`` for every ``x`` in the simplex.

    On the simplex ``x = x (sum x)^(m-1)``, so the identity holds iff the two
    sides agree as degree-``m`` forms.  Comparing the coefficient of each
    monomial ``x^alpha`` gives: for every row ``i`` and class ``alpha``, the
    class sum of row ``i`` equals ``(alpha_i / m) * |class|``.
    """
    exact = P.mode == "rational"
    for exponent, sums in class_sums(P).items():
        for i, target in enumerate(class_targets(P.n, P.m, exponent)):
            lhs = sums[i]
            bad = lhs != target if exact else abs(float(lhs) - float(target)) > tolerance
            if bad:
                return UniversalCertificate(False, i + 1, exponent, lhs, target if exact else float(target))
    return UniversalCertificate(True)


# ----------------------------------------------------------------------------
# irreducibility
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class IrreducibilityResult:
    irreducible: bool
    witness: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {"irreducible": self.irreducible, "witness": list(self.witness) if self.witness else None}


def is_irreducible(P: TransitionTensor, zero_tol: float = 0.0) -> IrreducibilityResult:
    """Search for a nonempty proper ``I`` closed under the chain.

    ``I`` witnesses reducibility when ``p[i, i_1..i_m] = 0`` for every ``i``
    in ``I`` and every multi-index avoiding ``I``.  Subsets are tried by
    increasing size, then lexicographically, so the witness is minimal and
    deterministic.  Exhaustive: limited to ``n <= 20``.
    """
    n, m = P.n, P.m
    if n > MAX_IRREDUCIBLE_N:
        raise CapacityError(f"irreducibility check enumerates 2^n subsets; n={n} exceeds {MAX_IRREDUCIBLE_N}")
    nonzero = np.abs(P.as_float()) > zero_tol
    idx = multi_indices(n, m) - 1
    col_masks = np.zeros(n**m, dtype=np.int64)
    for s in range(m):
        col_masks |= np.left_shift(1, idx[:, s])
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in subset)
            outside = (col_masks & mask) == 0
            if not nonzero[np.ix_(list(subset), np.flatnonzero(outside))].any():
                return IrreducibilityResult(False, tuple(i + 1 for i in subset))
    return IrreducibilityResult(True)
