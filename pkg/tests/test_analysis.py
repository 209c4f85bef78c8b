import itertools
from fractions import Fraction

import numpy as np
import pytest

from homc.analysis import (
    StationaryDescription, all_edge_reports, conjecture_probe, edge_dichotomy_check, face_distance,
    restrict_to_edge, sample_face, verify_description,
)
from homc.characterize import theorem1_tensor
from homc.constructions import VARIANTS, ConstructionSpec, build_construction, theorem2
from homc.errors import InvalidArgumentError, InvalidSpecError, WrongOrderError
from homc.solvers import enumerate_stationary_grid
from homc.tensor_core import TransitionTensor, columns_equal_to

from oracles import apply_by_terms, random_symmetric_v, root_scan

F = Fraction


def claimed_set(spec):
    n, k = spec.n, spec.k
    eye = np.eye(n)
    if spec.variant == "base":
        f = np.zeros(n)
        f[:k] = 1 / k
        return StationaryDescription("single_point", (f,))
    if spec.variant in ("two_points", "k_points"):
        return StationaryDescription("finite_set", tuple(eye[:k]))
    if spec.variant == "n_plus_1_points":
        return StationaryDescription("finite_set", tuple(eye) + (np.full(n, 1 / n),))
    if spec.variant == "face":
        return StationaryDescription("face", face_indices=tuple(range(1, k + 1)))
    return StationaryDescription("face_plus_barycenter", face_indices=tuple(range(1, k + 1)))


def every_spec(max_n=5, orders=(2, 3)):
    for n in range(2, max_n + 1):
        for m in orders:
            for k in range(1, n + 1):
                for v in VARIANTS:
                    try:
                        yield ConstructionSpec(n, m, k, v)
                    except InvalidSpecError:
                        pass


# ---------------------------------------------------------------- descriptions

def test_description_validation_and_json():
    d = StationaryDescription("face-plus-barycenter", face_indices=[1, 2])
    assert d.kind == "face_plus_barycenter"
    again = StationaryDescription.from_json(d.to_json())
    assert again.kind == d.kind and again.face_indices == (1, 2)
    with pytest.raises(InvalidArgumentError):
        StationaryDescription("finite_set", ([1, 0], [1, 0]))
    with pytest.raises(InvalidArgumentError):
        StationaryDescription("face")
    with pytest.raises(InvalidArgumentError):
        StationaryDescription("finite_set", ([0.7, 0.7],))
    with pytest.raises(InvalidArgumentError):
        verify_description(theorem2(3, 3, "n_plus_1_points"), StationaryDescription("face", face_indices=[4]))


def test_face_distance_formula():
    X = np.array([[0.5, 0.5, 0, 0], [0.4, 0.4, 0.2, 0], [0.2, 0.2, 0.3, 0.3], [0, 0, 0, 1]])
    got = face_distance(X, (1, 2))
    # brute force over a fine grid of the edge conv{e1, e2}
    z = np.linspace(0, 1, 20001)
    E = np.zeros((z.size, 4))
    E[:, 0], E[:, 1] = z, 1 - z
    brute = [np.min(np.max(np.abs(E - x), axis=1)) for x in X]
    assert np.allclose(got, brute, atol=1e-4)


def test_sample_face_lies_on_face():
    S = sample_face(5, (2, 4), 50, np.random.default_rng(0))
    assert np.all(S[:, [0, 2, 4]] == 0) and np.allclose(S.sum(axis=1), 1)


# ---------------------------------------------------------------- verification

def test_face_n5_k3_passes():
    rep = verify_description(theorem2(5, 3, "face"), StationaryDescription("face", face_indices=(1, 2, 3)))
    assert rep.verdict and rep.membership_max_residual <= 1e-12 and rep.exclusion_min_residual > 0
    assert rep.exclusion_samples == 100


def test_disconnected_n4_k2_passes():
    rep = verify_description(theorem2(4, 2, "disconnected"),
                             StationaryDescription("face_plus_barycenter", face_indices=(1, 2)))
    assert rep.verdict and rep.midpoint_min_residual > 0


def test_face_vs_full_simplex_fails_with_witness():
    P = theorem2(4, 2, "face")
    rep = verify_description(P, StationaryDescription("full_simplex"))
    assert not rep.verdict and rep.witnesses
    w = rep.witnesses[0]
    x = np.array(w["point"])
    direct = max(abs(a - b) for a, b in zip(apply_by_terms(P.as_float(), 4, 2, x), x))
    assert direct > 1e-12 and direct == pytest.approx(w["residual"], abs=1e-15)
    assert rep.to_json()["verdict"] == "fail"


def test_wrong_face_claim_fails():
    rep = verify_description(theorem2(3, 3, "n_plus_1_points"), StationaryDescription("face", face_indices=(1, 2)))
    assert not rep.verdict


def test_all_constructions_verify():
    count = 0
    for spec in every_spec():
        P = build_construction(spec)
        rep = verify_description(P, claimed_set(spec), samples=60, seed=count)
        assert rep.verdict, (spec, rep.to_json())
        if rep.exclusion_min_residual is not None:
            assert rep.exclusion_min_residual > 0
        count += 1
    assert count > 50


# ---------------------------------------------------------------- edges

def test_edge_theorem1_parameters():
    rng = np.random.default_rng(0)
    for n in range(2, 6):
        v = [[F(int(x), 9) for x in row] for row in np.rint(random_symmetric_v(n, rng) * 9)]
        P = theorem1_tensor(v)
        for i, j in itertools.combinations(range(1, n + 1), 2):
            er = restrict_to_edge(P, i, j)
            assert er.params == (1, 1 - v[i - 1][j - 1], v[i - 1][j - 1], 0)
            assert er.solve().kind == "interval_all"


def test_edge_two_points_tensor():
    P = theorem2(3, 2, "two_points")
    er = restrict_to_edge(P, 1, 2)
    assert er.params == (1, 0, F(1, 2), 0)
    sol = er.solve()
    assert sol.roots == (0, 1)
    assert root_scan(*map(float, er.params)) == ("finite", [0.0, 1.0])
    grid = enumerate_stationary_grid(P, 40)
    assert len(grid) == 2 and all(np.allclose(p, e) for p, e in zip(grid, np.eye(3)[:2]))


def test_edge_all_f2():
    er = restrict_to_edge(columns_equal_to(2, 2, [F(1, 2), F(1, 2)]), 1, 2)
    assert er.params == (F(1, 2),) * 4
    sol = er.solve()
    assert sol.roots == (F(1, 2),) and sol.case_label == "4a"
    kind, roots = root_scan(0.5, 0.5, 0.5, 0.5)
    assert kind == "finite" and np.allclose(roots, [0.5], atol=1e-12)


def test_edge_errors():
    with pytest.raises(WrongOrderError):
        restrict_to_edge(build_construction(ConstructionSpec(3, 3, 3, "n_plus_1_points")), 1, 2)
    with pytest.raises(InvalidArgumentError):
        restrict_to_edge(theorem2(3, 3, "n_plus_1_points"), 2, 2)


def test_dichotomy_theorem1():
    rng = np.random.default_rng(1)
    P = theorem1_tensor(random_symmetric_v(4, rng), "float")
    for rep in all_edge_reports(P):
        assert rep.all_stationary and rep.case1_conditions and not rep.violation
        assert rep.sampled_max_residual <= 1e-12


def test_dichotomy_n_plus_1():
    for n in (3, 4, 5):
        for rep in all_edge_reports(theorem2(n, n, "n_plus_1_points")):
            assert len(rep.interior_points) <= 1 and not rep.violation


def planted_edge_tensor(n, i, j, params, rng):
    """Random tensor whose four ``{i, j}`` columns are supported on ``{i, j}`` with the given parameters."""
    a1, a2, b1, b2 = params
    E = rng.dirichlet(np.ones(n), size=n * n).T
    for (s, t), top in {(i, i): a1, (i, j): b1, (j, i): a2, (j, j): b2}.items():
        c = (s - 1) * n + (t - 1)
        E[:, c] = 0
        E[i - 1, c], E[j - 1, c] = top, 1 - top
    return TransitionTensor(n, 2, E)


def test_dichotomy_fuzz():
    rng = np.random.default_rng(2)
    interior_pairs = 0
    for t in range(300):
        n = int(rng.integers(2, 6))
        if t % 3 == 0:
            P = TransitionTensor(n, 2, rng.dirichlet(np.ones(n), size=n * n).T)
        else:
            i, j = sorted(rng.choice(np.arange(1, n + 1), 2, replace=False)) if n > 2 else (1, 2)
            a = rng.random()
            params = (1.0, 1 - a, a, 0.0) if t % 3 == 1 else tuple(rng.random(4))
            P = planted_edge_tensor(n, int(i), int(j), params, rng)
        for rep in all_edge_reports(P):
            assert not rep.violation, rep.to_json()
            interior_pairs += rep.all_stationary
    assert interior_pairs > 0


# ---------------------------------------------------------------- conjecture probe

def test_probe_theorem1():
    rng = np.random.default_rng(3)
    rep = conjecture_probe(theorem1_tensor(random_symmetric_v(4, rng), "float"), (1, 2, 3), trials=50)
    assert rep.conclusive and rep.face_fully_stationary


def test_probe_face_tensor():
    rep = conjecture_probe(theorem2(5, 3, "face"), (1, 2, 3), trials=50)
    assert rep.conclusive and rep.face_fully_stationary


def test_probe_n_plus_1_inconclusive():
    P = theorem2(3, 3, "n_plus_1_points")
    rep = conjecture_probe(P, (1, 2, 3), trials=100)
    assert not rep.conclusive and len(rep.interior_points) < 3
    assert len(enumerate_stationary_grid(P, 60)) == 4


def test_probe_rejects_small_face():
    with pytest.raises(InvalidArgumentError):
        conjecture_probe(theorem2(4, 2, "face"), (1, 2))
