from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings

from gridlag import _pykernels, kernels
from gridlag.complex import Bigrading, encode, gradings, tables
from gridlag.kernels import BudgetExceeded, enumerate_slice, grading_histogram

from conftest import grids, random_grid

try:
    from gridlag import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _rect_oracle(g, x):
    """Empty marking-free rectangles by direct geometry on the torus."""
    n = g.n
    out = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = (j - i) % n  # columns i .. j-1 to the right of i
            h = (x[j] - x[i]) % n
            if h == 0:
                continue
            cols = [(i + k) % n for k in range(w)]

            def inside(c, v):
                return c in cols and 0 < (v - x[i]) % n < h

            if any(inside(c, g.xs[c] + 0.5) or inside(c, g.os[c] + 0.5) for c in cols):
                continue
            if any(inside(c, x[c]) for c in cols[1:]):
                continue
            y = list(x)
            y[i], y[j] = x[j], x[i]
            out.append(tuple(y))
    return sorted(out)


@given(grids(max_n=6))
@settings(max_examples=60, deadline=None)
def test_forward_targets_match_geometry(g):
    for x in list(permutations(range(g.n)))[:50]:
        got = sorted(tuple(y) for y in _pykernels.forward_targets(g.n, g.xs, g.os, x))
        assert got == _rect_oracle(g, x)


@given(grids(max_n=6))
@settings(max_examples=40, deadline=None)
def test_reverse_inverts_forward(g):
    fwd = {}
    for x in permutations(range(g.n)):
        for y in _pykernels.forward_targets(g.n, g.xs, g.os, x):
            fwd.setdefault(tuple(y), []).append(x)
    for y in permutations(range(g.n)):
        got = sorted(tuple(s) for s in _pykernels.reverse_sources(g.n, g.xs, g.os, y))
        assert got == sorted(fwd.get(y, []))


@needs_c
def test_backends_agree(rng):
    for _ in range(30):
        g = random_grid(rng.randint(2, 9), rng)
        codes = np.array(
            sorted({encode(rng.sample(range(g.n), g.n)) for _ in range(40)}), dtype=np.uint64
        )
        for name in ("forward_batch", "reverse_batch"):
            s1, d1 = getattr(_pykernels, name)(g.n, g.xs, g.os, codes)
            s2, d2 = getattr(_ckernels, name)(g.n, g.xs, g.os, codes)
            assert sorted(zip(s1.tolist(), d1.tolist())) == sorted(zip(s2.tolist(), d2.tolist()))
        x = list(rng.sample(range(g.n), g.n))
        for name in ("forward_targets", "reverse_sources"):
            a = sorted(map(tuple, getattr(_pykernels, name)(g.n, g.xs, g.os, x)))
            b = sorted(map(tuple, getattr(_ckernels, name)(g.n, g.xs, g.os, x)))
            assert a == b


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert kernels.BACKEND == "cython"


def test_pure_fallback_in_subprocess():
    import os
    import subprocess
    import sys

    env = dict(os.environ, GRIDLAG_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import gridlag.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@given(grids(max_n=7))
@settings(max_examples=40, deadline=None)
def test_histogram_matches_brute_force(g):
    t = tables(g)
    hist = grading_histogram(t.n, t.w_o, t.w_x, t.const_o, t.const_x, t.shift2)
    brute = {}
    for x in permutations(range(g.n)):
        b = tuple(gradings(g, x))
        brute[b] = brute.get(b, 0) + 1
    assert hist == brute


def test_slice_budget_and_empty(rng):
    g = random_grid(6, rng)
    t = tables(g)
    args = (t.n, t.w_o, t.w_x, t.const_o, t.const_x, t.shift2)
    assert len(enumerate_slice(*args, 999, 0)) == 0
    hist = grading_histogram(*args)
    (m, a), k = max(hist.items(), key=lambda kv: kv[1])
    assert len(enumerate_slice(*args, m, a, budget=k)) == k
    with pytest.raises(BudgetExceeded) as info:
        enumerate_slice(*args, m, a, budget=k - 1)
    assert info.value.budget == k - 1


def test_slice_is_sorted_and_distinct(rng):
    g = random_grid(8, rng)
    b = max(grading_histogram(*_args(g)).items(), key=lambda kv: kv[1])[0]
    codes = enumerate_slice(*_args(g), *b)
    perms = [tuple((int(c) >> (4 * k)) & 15 for k in range(g.n)) for c in codes]
    assert perms == sorted(set(perms))
    assert all(tuple(gradings(g, p)) == b for p in perms[:200])


def _args(g):
    t = tables(g)
    return (t.n, t.w_o, t.w_x, t.const_o, t.const_x, t.shift2)


@needs_c
def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--n", "5", "--codes", "50", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "forward_batch" in out and "reverse_batch" in out
