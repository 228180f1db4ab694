import random

import numpy as np
import pytest

from coarsekit.balleans import (
    EntourageChain,
    FormatError,
    Tower,
    ball,
    cellular_hull,
    cov,
    format_ballean,
    gen_interval,
    gen_product,
    is_cellular,
    is_large,
    level_dist,
    normalize,
    parse_ballean,
    product_point_index,
    product_point_tuple,
    spectrum,
    subspace,
    validate,
)


def three_point_tower():
    return Tower.from_partitions(3, [[[0], [1, 2]]])


def random_tower(rng, max_n=12, max_levels=4):
    n = rng.randint(1, max_n)
    k = rng.randint(1, max_levels) if n > 1 else 1
    labels = [list(range(n))]
    while len(labels) < k:
        prev = labels[-1]
        ids = sorted(set(prev))
        if len(ids) == 1:
            break
        groups = max(1, rng.randint(1, len(ids) - 1))
        merge = {c: rng.randrange(groups) for c in ids}
        labels.append([merge[c] for c in prev])
    labels.append([0] * n)
    return Tower(labels)


# --- construction and validation ---------------------------------------------

def test_two_point_trivial_chain_valid():
    chain = EntourageChain([np.eye(2, dtype=bool), np.ones((2, 2), dtype=bool)])
    rep = validate(chain)
    assert rep.valid
    assert rep.absorption == (0, 1)


def test_symmetry_violation_reported():
    e1 = np.eye(2, dtype=bool)
    e1[0, 1] = True
    chain = EntourageChain([np.eye(2, dtype=bool), e1, np.ones((2, 2), dtype=bool)])
    rep = validate(chain)
    assert not rep.valid
    assert any("level 1" in s and "symmetric" in s for s in rep.issues)


def test_interval_absorption_witness():
    chain = gen_interval(8, [1, 3, 7])
    rep = validate(chain)
    assert rep.valid
    # radius-1 composed with itself is the radius-2 relation, inside radius 3
    assert rep.absorption[1] == 2


def test_validate_flags_bad_top_and_base():
    e0 = np.eye(3, dtype=bool)
    e0[0, 1] = e0[1, 0] = True
    half = np.eye(3, dtype=bool)
    chain = EntourageChain([e0, half | e0])
    rep = validate(chain)
    assert not rep.valid
    assert any("diagonal" in s for s in rep.issues)
    assert any("full relation" in s for s in rep.issues)


def test_tower_constructor_rejects_non_refinement():
    with pytest.raises(ValueError):
        Tower([[0, 1, 2], [0, 0, 1], [0, 1, 1], [0, 0, 0]])


# --- balls, cov, distances -----------------------------------------------------

def test_ball_examples():
    t = gen_product([2, 2, 2])
    assert ball(t, 5, 0) == {5}
    assert ball(t, 5, 3) == set(range(8))
    c = gen_interval(8, [1, 7])
    assert ball(c, 0, 1) == {0, 1}
    assert ball(c, 3, 1) == {2, 3, 4}
    with pytest.raises(IndexError):
        ball(c, 8, 1)
    with pytest.raises(IndexError):
        ball(t, 0, 4)


def test_cov_on_product_tower():
    t = gen_product([2, 2, 2])
    top = ball(t, 0, 3)
    assert cov(t, top, 0) == 8
    assert cov(t, ball(t, 0, 2), 0) == 4
    assert cov(t, ball(t, 0, 1), 1) == 1
    assert cov(t, top, 0).exact


def test_cov_exact_on_general_chain():
    c = gen_interval(10, [2, 9])
    # radius-2 balls cover 0..9 with ceil(10/5) = 2 balls
    r = cov(c, range(10), 1)
    assert r == 2 and r.exact


def test_cov_greedy_flag_past_limit():
    c = gen_interval(30, [1, 29])
    r = cov(c, range(30), 1)
    assert not r.exact
    assert r >= 10


def test_cov_rejects_empty():
    with pytest.raises(ValueError):
        cov(gen_product([2]), [], 0)


def test_level_dist():
    t = gen_product([2, 2, 2])
    a = product_point_index([2, 2, 2], (0, 0, 0))
    b = product_point_index([2, 2, 2], (1, 0, 0))
    c = product_point_index([2, 2, 2], (0, 1, 0))
    assert level_dist(t, a, a) == 0
    assert level_dist(t, a, b) == 1
    assert level_dist(t, a, c) == 2
    assert product_point_tuple([2, 2, 2], c) == (0, 1, 0)


def test_level_dist_is_ultrametric():
    rng = random.Random(0)
    for _ in range(30):
        t = random_tower(rng)
        d = t.dist_matrix()
        for x in range(t.n):
            for y in range(t.n):
                for z in range(t.n):
                    assert d[x, z] <= max(d[x, y], d[y, z])


# --- spectrum ------------------------------------------------------------------

def test_spectrum_of_products():
    s = spectrum(gen_product([2, 3]))
    assert s.lo == (2, 3) and s.hi == (2, 3) and s.uniform
    s4 = spectrum(gen_product([4]))
    assert s4.lo == s4.hi == (4,)


def test_spectrum_non_uniform():
    s = spectrum(three_point_tower())
    assert s.lo == (1, 2)
    assert s.hi == (2, 2)
    assert not s.uniform


def test_spectrum_matches_sizes_randomly():
    rng = random.Random(1)
    for _ in range(25):
        sizes = [rng.randint(1, 4) for _ in range(rng.randint(0, 4))]
        s = spectrum(gen_product(sizes))
        assert s.lo == tuple(sizes) and s.hi == tuple(sizes)


def test_tower_class_sizes_partition():
    rng = random.Random(2)
    for _ in range(30):
        t = random_tower(rng)
        for i in range(t.num_levels):
            assert sum(len(c) for c in t.classes(i)) == t.n


# --- product and interval generators -------------------------------------------

def test_gen_product_empty():
    t = gen_product([])
    assert t.n == 1 and t.k == 0


def test_gen_product_cube_structure():
    t = gen_product([2, 2, 2])
    assert t.n == 8
    for j in range(4):
        assert len(t.classes(j)) == 2 ** (3 - j)
        assert all(len(c) == 2 ** j for c in t.classes(j))


def test_gen_product_mixed():
    t = gen_product([2, 3])
    assert t.n == 6
    assert len(t.classes(1)) == 3
    assert all(len(c) == 2 for c in t.classes(1))


def test_gen_product_keeps_unit_factors():
    t = gen_product([4, 1])
    assert t.k == 2
    assert spectrum(t).lo == (4, 1)


def test_gen_interval_trivial():
    c = gen_interval(4, [3])
    assert c.num_levels == 2
    assert np.array_equal(c.level(1), np.ones((4, 4), dtype=bool))


def test_gen_interval_precondition():
    with pytest.raises(ValueError):
        gen_interval(8, [3, 2, 7])
    with pytest.raises(ValueError):
        gen_interval(8, [1, 3])


# --- cellularity ----------------------------------------------------------------

def test_towers_are_cellular():
    assert is_cellular(gen_product([2, 3]))


def test_interval_not_cellular():
    assert not is_cellular(gen_interval(8, [1, 7]))


def test_cellular_hull_collapses_interval():
    hull = cellular_hull(gen_interval(8, [1, 7]))
    assert isinstance(hull, Tower)
    assert hull.num_levels == 2
    assert hull.labels[1] == (0,) * 8


def test_cellular_hull_idempotent_and_dominating():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(2, 10)
        radii = sorted(rng.sample(range(1, n), min(2, n - 1)))
        if radii[-1] < n - 1:
            radii.append(n - 1)
        c = gen_interval(n, radii)
        h = cellular_hull(c)
        assert cellular_hull(h) == h
        # domination: every original level lies inside some hull level, and
        # the closure of level i is reachable at an index <= i
        for i in range(c.num_levels):
            m = c.level(i)
            j = min(i, h.k)
            assert not (m & ~h.level(j)).any()


def test_subspace_identity():
    c = gen_interval(6, [2, 5])
    assert subspace(c, range(6)) == normalize(c)
    t = gen_product([2, 2])
    assert subspace(t, range(4)) == t


def test_subspace_restricts():
    t = gen_product([2, 2])
    s = subspace(t, [0, 1, 2])
    assert isinstance(s, Tower)
    assert s.n == 3
    assert s.labels[1] == (0, 0, 1)


def test_is_large():
    c = gen_interval(10, [3, 9])
    assert is_large(c, range(10)) == 0
    assert is_large(c, [0, 4, 8]) == 1
    assert is_large(c, [0]) == 2


def test_cov_monotone():
    rng = random.Random(4)
    for _ in range(20):
        t = random_tower(rng, max_n=10)
        pts = list(range(t.n))
        A = rng.sample(pts, rng.randint(1, t.n))
        B = sorted(set(A) | set(rng.sample(pts, rng.randint(1, t.n))))
        for a in range(t.num_levels - 1):
            assert cov(t, A, a + 1) <= cov(t, A, a)
            assert cov(t, A, a) <= cov(t, B, a)


# --- text format -----------------------------------------------------------------

def test_format_example_matches_spec_layout():
    text = format_ballean(gen_product([2, 2, 2]))
    assert text.splitlines() == [
        "ballean v1",
        "points 8",
        "levels 3",
        "level 1 cells: 0 1 | 2 3 | 4 5 | 6 7",
        "level 2 cells: 0 1 2 3 | 4 5 6 7",
    ]


def test_round_trip_towers():
    rng = random.Random(5)
    for _ in range(25):
        t = random_tower(rng)
        assert parse_ballean(format_ballean(t)) == t


def test_round_trip_chains():
    c = gen_interval(8, [2, 7])
    back = parse_ballean(format_ballean(c))
    assert back == c
    assert format_ballean(back) == format_ballean(c)


def test_parse_comments_and_errors():
    text = "ballean v1\npoints 4 # four points\nlevels 2\nlevel 1 cells: 0 1 | 2 3\n"
    t = parse_ballean(text)
    assert isinstance(t, Tower) and t.n == 4
    with pytest.raises(FormatError) as ei:
        parse_ballean("ballean v1\npoints 4\nlevels 2\nlevel 1 cells: 0 1 | 2\n")
    assert ei.value.line == 4
    with pytest.raises(FormatError):
        parse_ballean("ballean v2\n")
    with pytest.raises(FormatError) as ei:
        parse_ballean(
            "ballean v1\npoints 4\nlevels 3\n"
            "level 1 cells: 0 1 | 2 3\nlevel 2 cells: 0 2 | 1 3\n"
        )
    assert ei.value.line == 5


def test_parse_pairs_becomes_chain():
    text = "ballean v1\npoints 3\nlevels 2\nlevel 1 pairs: (0,1) (1,2)\n"
    c = parse_ballean(text)
    assert not isinstance(c, Tower)
    assert not is_cellular(c)


def test_parse_transitive_pairs_becomes_tower():
    text = "ballean v1\npoints 3\nlevels 2\nlevel 1 pairs: (0,1)\n"
    t = parse_ballean(text)
    assert isinstance(t, Tower)
    assert t.labels[1] == (0, 0, 1)
