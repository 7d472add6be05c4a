from itertools import permutations

import pytest

from gridlag.cobordism import (
    PinchError,
    ReplayError,
    birth_insert,
    birth_map,
    compose_script,
    detect_pinch,
    expected_bidegree,
    identity_map,
    isotopy_map,
    parse_script,
    pinch_map,
)
from gridlag.complex import Bigrading, canonical_cycles, classical_invariants
from gridlag.corpus import load_grid, read_text
from gridlag.grid import (
    GridDiagram,
    IllegalMoveError,
    commute_columns,
    commute_rows,
    is_legal_column_commutation,
    is_legal_row_commutation,
    parse_grid,
    pinch,
)

from conftest import random_grid


def _check_map(f, bidegree):
    assert f.bidegree == bidegree
    assert f.chain_map_failures() == []
    assert f.homogeneity_failures() == []


def _all_grids(n):
    for xs in permutations(range(n)):
        for os_ in permutations(range(n)):
            if all(a != b for a, b in zip(xs, os_)):
                yield GridDiagram.from_zero_based(xs, os_)


# ---------------------------------------------------------------------------
# pinch maps on the corpus fixtures


def test_pinch_case_one_fixture():
    gm, gp = load_grid("pinch_I_4x4_minus"), load_grid("pinch_I_4x4_plus")
    assert pinch(gm, 3, "I") == gp
    f = pinch_map(gp, gm)
    _check_map(f, Bigrading(-1, 0))
    plus, minus = f.preserves_canonical_cycles()
    assert minus
    # adjacent X's: x+ lands on x+ only up to a boundary
    assert f.preserves_canonical_classes() == (True, True)


def test_pinch_case_one_wide_fixture():
    gm, gp = load_grid("pinch_I_5x5_minus"), load_grid("pinch_I_5x5_plus")
    f = pinch_map(gp, gm)
    _check_map(f, Bigrading(-1, 0))
    assert f.preserves_canonical_cycles() == (True, True)


def test_pinch_case_two_fixture():
    gm, gp = load_grid("pinch_II_4x4_minus"), load_grid("pinch_II_4x4_plus")
    assert gm.components == 1 and gp.components == 2
    f = pinch_map(gp, gm)
    _check_map(f, Bigrading(-1, -2))
    assert f.preserves_canonical_cycles() == (True, True)
    assert f.bidegree == expected_bidegree(-1, gm.components, gp.components)


def test_detect_pinch_errors():
    gm = load_grid("pinch_I_4x4_minus")
    with pytest.raises(PinchError, match="identical"):
        detect_pinch(gm, gm)
    with pytest.raises(PinchError):
        detect_pinch(load_grid("unknot_3x3"), gm)
    with pytest.raises(PinchError):
        detect_pinch(load_grid("pinch_II_4x4_plus"), gm)


def test_random_pinches(rng):
    seen = {"I": 0, "II": 0}
    tries = 0
    while min(seen.values()) < 12 and tries < 5000:
        tries += 1
        g = random_grid(rng.randint(3, 6), rng)
        case = rng.choice("I II".split())
        row = rng.randint(1, g.n)
        try:
            up = pinch(g, row, case)
        except IllegalMoveError:
            continue
        f = pinch_map(up, g)
        want = Bigrading(-1, 0) if g.components == up.components + 1 else Bigrading(-1, -2)
        if up.n <= 5:
            _check_map(f, want)
        else:
            assert f.bidegree == want
            gens = [tuple(rng.sample(range(up.n), up.n)) for _ in range(60)]
            assert f.chain_map_failures(gens) == []
            assert f.homogeneity_failures(gens) == []
        assert f.preserves_canonical_classes() == (True, True)
        seen[case] += 1
    assert min(seen.values()) >= 12


# ---------------------------------------------------------------------------
# isotopy maps


def test_commutation_maps_exhaustive_small():
    count = 0
    for n in (3, 4):
        for g in _all_grids(n):
            for low in range(n):
                if not is_legal_row_commutation(g, low):
                    continue
                g1 = commute_rows(g, low + 1)
                f = isotopy_map(g1, {"move": "commute_rows", "r": low + 1})
                assert f.target == g  # commuting twice is the identity
                _check_map(f, Bigrading(0, 0))
                assert f.preserves_canonical_classes() == (True, True)
                count += 1
    assert count > 0


def test_commutation_maps_random_five(rng):
    done = 0
    while done < 40:
        g = random_grid(5, rng)
        low = rng.randrange(5)
        cols = rng.random() < 0.5
        legal = is_legal_column_commutation if cols else is_legal_row_commutation
        if not legal(g, low):
            continue
        move = {"move": "commute_columns", "c": low + 1} if cols else {"move": "commute_rows", "r": low + 1}
        f = isotopy_map(g, move)
        _check_map(f, Bigrading(0, 0))
        assert f.preserves_canonical_classes() == (True, True)
        done += 1


def test_translation_map_is_exact(rng):
    for _ in range(20):
        g = random_grid(rng.randint(2, 6), rng)
        f = isotopy_map(g, {"move": "cyclic_translate", "dx": rng.randint(-3, 3), "dy": rng.randint(-3, 3)})
        _check_map(f, Bigrading(0, 0))
        assert f.preserves_canonical_cycles() == (True, True)


def test_isotopy_map_rejects_other_moves(unknot):
    with pytest.raises(IllegalMoveError):
        isotopy_map(unknot, {"move": "pinch"})
    with pytest.raises(IllegalMoveError):
        isotopy_map(parse_grid("X={1,2,4,3} O={3,4,2,1}"), {"move": "commute_columns", "c": 3})


# ---------------------------------------------------------------------------
# births


def test_birth_fixture():
    gm = load_grid("birth_2x2_minus")
    gp, data = birth_insert(gm, 1)
    assert gp == load_grid("birth_4x4_plus")
    assert gp.components == gm.components + 1
    f = birth_map(gp, gm, data)
    _check_map(f, Bigrading(1, 0))
    assert f.preserves_canonical_cycles() == (True, True)


def test_random_births(rng):
    for _ in range(25):
        g = random_grid(rng.randint(2, 4), rng)
        gp, data = birth_insert(g, rng.randint(1, g.n))
        tb, r, comps = classical_invariants(gp)
        tb0, r0, comps0 = classical_invariants(g)
        assert (tb, r, comps) == (tb0 - 1, r0, comps0 + 1)
        f = birth_map(gp, g, data)
        _check_map(f, Bigrading(1, 0))
        assert f.preserves_canonical_cycles() == (True, True)


# ---------------------------------------------------------------------------
# scripts


def test_birth_pinch_script():
    res = compose_script(load_grid("birth_2x2_minus"), read_text("birth_pinch.json"))
    assert (res.births, res.pinches, res.chi) == (1, 1, 0)
    assert res.expected_bidegree == Bigrading(0, 0)
    assert res.bidegree_ok()
    assert res.phi.preserves_canonical_cycles() == (True, True)
    assert res.canonical_ok() == (True, True)
    assert res.phi.homogeneity_failures() == []
    assert res.phi.chain_map_failures() == []


def test_empty_script_is_identity(unknot):
    res = compose_script(unknot, "[]")
    assert res.g_plus == unknot and res.chi == 0
    assert res.phi(canonical_cycles(unknot)[0]) == (canonical_cycles(unknot)[0],)


def test_script_stabilizations(unknot):
    res = compose_script(unknot, [{"move": "stabilize", "c": 1, "type": "X:NW"}])
    assert res.phi is None
    assert res.bidegree_ok() is None
    assert any("no composite map" in note for note in res.notes)
    assert any("lambda+ nonzero on both sides" in note for note in res.notes)
    with pytest.raises(ReplayError, match="not a Legendrian isotopy"):
        compose_script(unknot, [{"move": "stabilize", "c": 1, "type": "X:NE"}])


def test_script_errors(unknot):
    with pytest.raises(ReplayError, match="unknown move"):
        parse_script('[{"move": "twist"}]')
    with pytest.raises(ReplayError, match="missing"):
        parse_script('[{"move": "pinch", "row_pair": 1}]')
    with pytest.raises(ReplayError) as info:
        compose_script(unknot, [{"move": "birth", "x1_column": 1}, {"move": "commute_rows", "r": 9}])
    assert info.value.step == 1
    assert parse_script({"moves": []}) == []


def test_identity_and_composition(rng):
    g = random_grid(4, rng)
    f = identity_map(g)
    h = isotopy_map(g, {"move": "cyclic_translate", "dx": 1, "dy": 2})
    composite = f.then(h)
    assert composite.bidegree == Bigrading(0, 0)
    with pytest.raises(ValueError):
        h.then(h)


def test_map_export(rng):
    res = compose_script(load_grid("birth_2x2_minus"), read_text("birth.json"))
    record = res.phi.to_json()
    assert record["bidegree"] == {"maslov": 1, "alexander2": 0}
    assert all(c["image"] for c in record["columns"])
    assert len(record["source_hash"]) == 16


def test_expected_bidegree():
    assert expected_bidegree(-1, 1, 2) == Bigrading(-1, -2)
    assert expected_bidegree(-1, 2, 1) == Bigrading(-1, 0)
    assert expected_bidegree(1, 2, 1) == Bigrading(1, 2)
