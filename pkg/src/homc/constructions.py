"""Tensors with prescribed stationary sets, and closure operations.

Every builder starts from the tensor whose columns all equal
``f_k = (e_1 + ... + e_k)/k`` (unique stationary point ``f_k``) and resets
selected columns.  With ``s = (i_1, ..., i_m)`` the column index and ``i = i_1``
the slice it belongs to:

``two_points`` (k = 2)
    column ``(1, .., 1)`` -> ``e_1``; every column of slice 2 -> ``e_2``.
    Stationary set ``{e_1, e_2}``.
``k_points`` (2 < k <= n)
    for ``i <= k``: column ``(i, .., i)`` -> ``e_i``, other columns of slice
    ``i`` -> ``e_k``; slices ``i > k`` keep ``f_k``.  Stationary set ``{e_1..e_k}``.
``n_plus_1_points`` (k = n)
    column ``(i, .., i)`` -> ``e_i``.  Stationary set ``{e_1..e_n, f_n}``.
``face`` (2 <= k <= n-1)
    for ``i <= k``: columns of slice ``i`` with all indices ``<= k`` -> ``e_i``.
    Stationary set ``conv{e_1..e_k}``.
``disconnected`` (2 <= k <= n-1)
    columns whose trailing indices ``i_2..i_m`` are all ``<= k`` -> ``e_i`` for
    ``i <= k`` and ``(e_{k+1} + .. + e_n)/(n-k)`` for ``i > k``; all others ``f_n``.
    Stationary set ``{f_n} ∪ conv{e_1..e_k}``.

For ``disconnected`` with ``m > 2`` the slice index is deliberately left out
of the "indices ``<= k``" test.  Including it leaves the slices ``i > k``
untouched and produces an extra stationary point (for ``n=4, k=2, m=3`` one
near ``(0.309, 0.309, 0.191, 0.191)``), breaking the claimed set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidPermutationError, InvalidSpecError, ShapeError
from .tensor_core import Mode, TransitionTensor, multi_indices, probability_vector
from .characterize import monomial_classes

Variant = Literal["base", "two_points", "k_points", "n_plus_1_points", "face", "disconnected"]
VARIANTS = ("base", "two_points", "k_points", "n_plus_1_points", "face", "disconnected")


@dataclass(frozen=True)
class ConstructionSpec:
    n: int
    m: int
    k: int
    variant: Variant

    def __post_init__(self):
        v = self.variant.replace("-", "_") if isinstance(self.variant, str) else self.variant
        object.__setattr__(self, "variant", v)
        n, m, k = self.n, self.m, self.k
        if v not in VARIANTS:
            raise InvalidSpecError(f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}")
        if n < 1 or m < 1:
            raise InvalidSpecError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if not 1 <= k <= n:
            raise InvalidSpecError(f"k={k} must lie in [1, n={n}]")
        if v == "base":
            return
        if m < 2:
            raise InvalidSpecError(f"variant {v} needs order m >= 2, got {m}")
        if v == "two_points" and (k != 2 or n < 2):
            raise InvalidSpecError("two_points requires k = 2 (and n >= 2)")
        if v == "k_points" and not 2 < k <= n:
            raise InvalidSpecError(f"k_points requires 2 < k <= n, got k={k}, n={n}")
        if v == "n_plus_1_points" and (k != n or n <= 2):
            raise InvalidSpecError(f"n_plus_1_points requires k = n and n > 2, got k={k}, n={n}")
        if v in ("face", "disconnected") and not (n > 2 and 2 <= k <= n - 1):
            raise InvalidSpecError(f"{v} requires n > 2 and 2 <= k <= n-1, got k={k}, n={n}")

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "variant": self.variant}

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionSpec":
        return cls(int(data["n"]), int(data.get("m", 2)), int(data["k"]), data["variant"])


def _unit(n: int, i: int) -> np.ndarray:
    out = np.array([Fraction(0)] * n, dtype=object)
    out[i - 1] = Fraction(1)
    return out


def _bary(n: int, lo: int, hi: int) -> np.ndarray:
    """Uniform vector on states ``lo..hi`` (1-based, inclusive)."""
    out = np.array([Fraction(0)] * n, dtype=object)
    out[lo - 1:hi] = Fraction(1, hi - lo + 1)
    return out


def build_construction(spec: ConstructionSpec, mode: Mode = "rational") -> TransitionTensor:
    """Tensor realising ``spec`` (see the module docstring for the recipes)."""
    n, m, k, v = spec.n, spec.m, spec.k, spec.variant
    idx = multi_indices(n, m)
    lead = idx[:, 0]
    diag = np.all(idx == lead[:, None], axis=1)
    cols = np.empty((n**m, n), dtype=object)

    default = _bary(n, 1, n) if v == "disconnected" else _bary(n, 1, k)
    for c in range(n**m):
        cols[c] = default

    if v == "two_points":
        cols[0] = _unit(n, 1)
        for c in np.flatnonzero(lead == 2):
            cols[c] = _unit(n, 2)
    elif v == "k_points":
        for c in np.flatnonzero(lead <= k):
            cols[c] = _unit(n, lead[c]) if diag[c] else _unit(n, k)
    elif v == "n_plus_1_points":
        for c in np.flatnonzero(diag):
            cols[c] = _unit(n, lead[c])
    elif v == "face":
        for c in np.flatnonzero(np.all(idx <= k, axis=1)):
            cols[c] = _unit(n, lead[c])
    elif v == "disconnected":
        tail_ok = np.all(idx[:, 1:] <= k, axis=1)
        rest = _bary(n, k + 1, n)
        for c in np.flatnonzero(tail_ok):
            cols[c] = _unit(n, lead[c]) if lead[c] <= k else rest
    P = TransitionTensor.from_columns(np.vstack(cols), m, "rational")
    return P.to_mode(mode)


def theorem2(n: int, k: int, variant: Variant, mode: Mode = "rational") -> TransitionTensor:
    return build_construction(ConstructionSpec(n, 2, k, variant), mode)


# ----------------------------------------------------------------------------
# closure operations on universally stationary tensors
# ----------------------------------------------------------------------------

def lift(P: TransitionTensor) -> TransitionTensor:
    """Raise the order by one: ``[P | P | ... | P]`` (``n`` copies).

    Column ``(i_1, i_2, .., i_m)`` of the result is column ``(i_2, .., i_m)``
    of ``P``, so the next state ignores the oldest remembered state.
    """
    return TransitionTensor(P.n, P.m + 1, np.hstack([P.entries] * P.n), P.mode)


def permute_within_classes(P: TransitionTensor, perm: Sequence[int]) -> TransitionTensor:
    """Rearrange columns; new column ``c`` is old column ``perm[c-1]`` (1-based).

    Every column must stay inside its monomial class, otherwise the chain's
    action on the simplex could change.
    """
    N = P.num_columns
    p = [int(c) for c in perm]
    if sorted(p) != list(range(1, N + 1)):
        raise InvalidPermutationError(f"expected a permutation of 1..{N}")
    cls_of = {}
    for cl in monomial_classes(P.n, P.m):
        for c in cl.columns:
            cls_of[c] = cl.exponent
    for new, old in enumerate(p, start=1):
        if cls_of[new] != cls_of[old]:
            raise InvalidPermutationError(
                f"column {old} (class {cls_of[old]}) cannot move to column {new} (class {cls_of[new]})")
    return TransitionTensor(P.n, P.m, P.entries[:, np.asarray(p) - 1], P.mode)


def class_permutation(n: int, m: int, orders: dict) -> list[int]:
    """Full column permutation from per-class orderings.

    ``orders`` maps an exponent tuple to a rearrangement of that class's
    column positions; classes not mentioned stay fixed.
    """
    perm = list(range(1, n**m + 1))
    classes = {cl.exponent: cl.columns for cl in monomial_classes(n, m)}
    for exp, order in orders.items():
        exp = tuple(exp)
        if exp not in classes:
            raise InvalidPermutationError(f"no monomial class with exponent {exp}")
        if sorted(order) != sorted(classes[exp]):
            raise InvalidPermutationError(f"ordering {list(order)} is not a rearrangement of class {exp}")
        for pos, src in zip(classes[exp], order):
            perm[pos - 1] = int(src)
    return perm


def random_class_permutation(n: int, m: int, rng: np.random.Generator) -> list[int]:
    orders = {cl.exponent: list(rng.permutation(cl.columns)) for cl in monomial_classes(n, m)}
    return class_permutation(n, m, orders)


def convex_combine(tensors: Sequence[TransitionTensor], weights) -> TransitionTensor:
    """Entrywise ``sum_j w_j P_j`` for a probability vector of weights."""
    if not tensors:
        raise InvalidArgumentError("need at least one tensor")
    n, m = tensors[0].n, tensors[0].m
    for T in tensors:
        if (T.n, T.m) != (n, m):
            raise ShapeError(f"cannot combine tensors of shapes (n={n}, m={m}) and (n={T.n}, m={T.m})")
    if len(weights) != len(tensors):
        raise ShapeError(f"{len(weights)} weights for {len(tensors)} tensors")
    rational = all(T.mode == "rational" for T in tensors) and all(
        isinstance(w, (int, Fraction)) for w in weights)
    w = probability_vector(list(weights), "rational" if rational else "float")
    if rational:
        E = sum(wj * T.entries for wj, T in zip(w, tensors))
        return TransitionTensor(n, m, E, "rational")
    E = sum(float(wj) * T.as_float() for wj, T in zip(w, tensors))
    return TransitionTensor(n, m, E, "float")
