import json
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridlag.complex import Bigrading, canonical_cycles, gradings, tilde_differential
from gridlag.f2 import (
    BooleanMatrix,
    VanishingCertificate,
    class_is_zero,
    homology_dimensions,
    is_boundary,
    rank,
    replay_certificate,
    solve_in_image,
)
from gridlag.grid import parse_grid, stabilize
from gridlag.kernels import BudgetExceeded

from conftest import grids, random_grid


def dense_rank(a):
    """Row reduction mod 2 on a dense numpy array."""
    a = np.array(a, dtype=np.uint8) % 2
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def boolean_matrices(max_rows=8, max_cols=8):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


# ---------------------------------------------------------------------------
# linear algebra


def test_matrix_basics():
    m = BooleanMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert (m.nrows, m.ncols, m.nnz()) == (2, 3, 4)
    assert m.to_dense().tolist() == [[1, 0, 1], [0, 1, 1]]
    assert m.transpose().transpose() == m
    assert m.matvec([0, 1]) == [0, 1]
    assert m.matvec([0, 1, 2]) == []
    assert rank(BooleanMatrix.identity(5)) == 5
    assert rank(BooleanMatrix.zeros(3, 4)) == 0


@given(boolean_matrices())
def test_rank_matches_dense_oracle(rows):
    m = BooleanMatrix.from_dense(rows)
    assert rank(m) == dense_rank(rows) == rank(m.transpose())


@given(boolean_matrices(), boolean_matrices())
def test_product_matches_numpy(a_rows, b_rows):
    a = np.array(a_rows)
    b = np.array(b_rows)
    if a.shape[1] != b.shape[0]:
        b = np.resize(b, (a.shape[1], b.shape[1]))
    got = BooleanMatrix.from_dense(a) @ BooleanMatrix.from_dense(b)
    assert np.array_equal(got.to_dense() % 2, (a @ b) % 2)


@given(boolean_matrices(max_rows=7, max_cols=10), st.data())
@settings(max_examples=150)
def test_solve_matches_brute_force(rows, data):
    m = BooleanMatrix.from_dense(rows)
    v = data.draw(st.sets(st.integers(0, m.nrows - 1)))
    a = np.array(rows, dtype=np.int64)
    target = np.zeros(m.nrows, dtype=np.int64)
    target[list(v)] = 1
    reachable = any(
        np.array_equal((a @ np.array(c)) % 2, target) for c in product((0, 1), repeat=m.ncols)
    )
    sol = solve_in_image(m, v)
    assert sol.in_image == reachable
    if sol.in_image:
        assert sorted(m.matvec(sol.witness)) == sorted(v)
    else:
        w = np.zeros(m.nrows, dtype=np.int64)
        w[sol.covector] = 1
        assert not ((w @ a) % 2).any()
        assert int(w @ target) % 2 == 1
        assert sol.residual and sol.residual[0] not in sol.pivot_rows


def test_solve_rejects_bad_index():
    with pytest.raises(ValueError):
        solve_in_image(BooleanMatrix.identity(2), [2])


# ---------------------------------------------------------------------------
# vanishing of canonical classes


def test_unknot_classes_nonzero(unknot):
    for s in "+-":
        cert = class_is_zero(unknot, s)
        assert cert.verdict == "nonzero"
        assert cert.verify()


def test_bad_sign(unknot):
    with pytest.raises(ValueError):
        class_is_zero(unknot, "0")


def test_stabilization_kills_one_class(rng):
    """S+ kills lambda+, S- kills lambda-, the other two keep both."""
    for _ in range(20):
        g = random_grid(rng.randint(2, 5), rng)
        before = {s: class_is_zero(g, s).verdict for s in "+-"}
        c = rng.randint(1, g.n)
        assert class_is_zero(stabilize(g, c, "X:NE"), "+").verdict == "zero"
        assert class_is_zero(stabilize(g, c, "X:SW"), "-").verdict == "zero"
        for kind in ("X:NW", "X:SE"):
            h = stabilize(g, c, kind)
            assert {s: class_is_zero(h, s).verdict for s in "+-"} == before


def test_component_and_slice_methods_agree(rng):
    for _ in range(30):
        g = random_grid(rng.randint(2, 6), rng)
        for s in "+-":
            a = class_is_zero(g, s, method="component")
            b = class_is_zero(g, s, method="slice")
            assert a.verdict == b.verdict
            assert b.verify()


def test_certificate_round_trip(rng):
    g = stabilize(random_grid(5, rng), 2, "X:NE")
    for s in "+-":
        cert = class_is_zero(g, s)
        data = json.loads(json.dumps(cert.to_json()))
        assert replay_certificate(data)
        assert replay_certificate(json.dumps(data))
        back = VanishingCertificate.from_json(data)
        assert (back.verdict, back.witness, back.bigrading) == (cert.verdict, cert.witness, cert.bigrading)


def test_tampered_certificates_fail(rng):
    g = stabilize(random_grid(4, rng), 1, "X:NE")
    zero = class_is_zero(g, "+")
    assert zero.is_zero
    data = zero.to_json()
    data["witness"] = data["witness"][:-1]
    assert not replay_certificate(data)
    flipped = zero.to_json()
    flipped["verdict"] = "nonzero"
    assert not replay_certificate(flipped)
    bad_hash = zero.to_json()
    bad_hash["grid_hash"] = "0" * 16
    with pytest.raises(ValueError):
        replay_certificate(bad_hash)


def test_class_budget(rng):
    g = stabilize(stabilize(random_grid(7, rng), 1, "X:NW"), 2, "X:SE")
    with pytest.raises(BudgetExceeded):
        class_is_zero(g, "+", budget=3)


# ---------------------------------------------------------------------------
# boundaries and homology


def test_is_boundary(rng):
    assert is_boundary(parse_grid("X={2,1} O={1,2}"), [])
    for _ in range(20):
        g = random_grid(rng.randint(3, 5), rng)
        x = tuple(rng.sample(range(g.n), g.n))
        dx = tilde_differential(g, x)
        assert is_boundary(g, dx)
        # a canonical cycle plus a boundary is homologous to the cycle
        xp = canonical_cycles(g)[0]
        dy = [z for y in [x] for z in tilde_differential(g, y) if gradings(g, z) == gradings(g, xp)]
        assert is_boundary(g, [xp]) == (class_is_zero(g, "+").verdict == "zero")
        if dy:
            assert is_boundary(g, [xp, *dy]) == is_boundary(g, [xp])


def test_is_boundary_rejects_mixed_gradings(unknot):
    with pytest.raises(ValueError):
        is_boundary(unknot, [(0, 1), (1, 0)])


def test_unknot_homology(unknot):
    assert homology_dimensions(unknot) == {Bigrading(0, 0): 1, Bigrading(-1, -2): 1}


def test_stabilized_unknot_total_dimension():
    g = parse_grid("X={2,1} O={1,2}")
    for n in (3, 4, 5, 6):
        g = stabilize(g, 1, "X:NW")
        dims = homology_dimensions(g)
        assert sum(dims.values()) == 2 ** (n - 1)
    three = homology_dimensions(parse_grid("X={2,3,1} O={1,2,3}"))
    assert three == {Bigrading(0, 0): 1, Bigrading(-1, -2): 2, Bigrading(-2, -4): 1}


@given(grids(max_n=5))
@settings(max_examples=30, deadline=None)
def test_homology_euler_characteristic(g):
    from gridlag.complex import bigrading_counts

    counts = bigrading_counts(g)
    dims = homology_dimensions(g)
    for a2 in {b.alexander2 for b in counts}:
        chain = sum((-1) ** (b.maslov % 2) * k for b, k in counts.items() if b.alexander2 == a2)
        hom = sum((-1) ** (b.maslov % 2) * k for b, k in dims.items() if b.alexander2 == a2)
        assert chain == hom


def test_homology_budget(rng):
    with pytest.raises(BudgetExceeded):
        homology_dimensions(random_grid(6, rng), budget=100)
