import math
from fractions import Fraction
from itertools import combinations, permutations

import pytest

from relaxcert.cover import (Chain, build_full_cover, chains_to_permutations,
                             dominating_facet_family, dominating_facet_vertices,
                             dominating_family, enumerate_simplicial_lower_facets,
                             enumerate_simplicial_upper_facets, exact_min_cover,
                             is_dominating_family, permutation_facet_family,
                             symmetric_chain_cover)
from relaxcert.errors import (PreconditionError, ResourceLimitError,
                              ValidationError)
from relaxcert.lift import check_upper_facet, staircase_height


def cube(k):
    return sorted(tuple((mask >> (k - 1 - i)) & 1 for i in range(k))
                  for mask in range(1 << k))


# ---------------------------------------------------------------------------
# symmetric chain decomposition
# ---------------------------------------------------------------------------

def test_chain_cover_n2_exact():
    chains = symmetric_chain_cover(2)
    as_sets = {tuple(sorted(tuple(sorted(s)) for s in ch.subsets)) for ch in chains}
    assert as_sets == {((), (1,), (1, 2)), ((2,),)}


def test_chain_cover_n0():
    chains = symmetric_chain_cover(0)
    assert len(chains) == 1 and chains[0].subsets == (frozenset(),)


@pytest.mark.parametrize("n", range(0, 11))
def test_chain_cover_partitions_and_counts(n):
    chains = symmetric_chain_cover(n)
    assert len(chains) == math.comb(n, n // 2)
    seen = set()
    for chain in chains:
        for a, b in zip(chain.subsets, chain.subsets[1:]):
            assert a < b and len(b) == len(a) + 1
        # symmetric: sizes run from a to n-a
        sizes = [len(s) for s in chain.subsets]
        assert sizes[0] + sizes[-1] == n
        seen.update(chain.subsets)
    assert len(seen) == 1 << n


def test_chain_validation():
    with pytest.raises(ValidationError):
        Chain((frozenset({1}), frozenset({2})))


def test_minimum_chain_cover_matches_construction_small():
    # oracle: exact set cover over all maximal chains
    for n in range(1, 5):
        subsets = [frozenset(s) for r in range(n + 1)
                   for s in combinations(range(1, n + 1), r)]
        chains = []
        for perm in permutations(range(1, n + 1)):
            members = [frozenset(perm[:t]) for t in range(n + 1)]
            chains.append(frozenset(members))
        optimum = exact_min_cover(chains, subsets)
        assert optimum == math.comb(n, n // 2)
        assert len(symmetric_chain_cover(n)) == optimum


# ---------------------------------------------------------------------------
# chains to permutations
# ---------------------------------------------------------------------------

def test_single_subset_chain_completion():
    chain = Chain((frozenset({2}),))
    perms = chains_to_permutations([chain] + symmetric_chain_cover(2)[:1], 2)
    assert perms[0] == (2, 1)


def test_full_chain_read_directly():
    chain = Chain((frozenset(), frozenset({3}), frozenset({1, 3}), frozenset({1, 2, 3})))
    fill = [c for c in symmetric_chain_cover(3)]
    perms = chains_to_permutations([chain] + fill, 3)
    assert perms[0] == (3, 1, 2)


@pytest.mark.parametrize("n", range(1, 8))
def test_prefix_coverage(n):
    perms = chains_to_permutations(symmetric_chain_cover(n), n)
    assert len(perms) == math.comb(n, n // 2)
    prefix_sets = {frozenset(p[:t]) for p in perms for t in range(n + 1)}
    assert len(prefix_sets) == 1 << n


def test_non_covering_chains_rejected():
    with pytest.raises(ValidationError):
        chains_to_permutations([Chain((frozenset({1}),))], 2)


# ---------------------------------------------------------------------------
# dominating families
# ---------------------------------------------------------------------------

def test_dominating_n2_minimum_is_two():
    family = dominating_family(2)
    assert is_dominating_family(family, 2)
    assert len(family) == 2
    # oracle: no single nonempty subset dominates everything
    for mask_set in (frozenset({1}), frozenset({2}), frozenset({1, 2})):
        assert not is_dominating_family([mask_set], 2)


def test_dominating_n1():
    assert dominating_family(1) == (frozenset({1}),)


def test_dominating_n10_bound():
    family = dominating_family(10)
    assert is_dominating_family(family, 10)
    k = 11
    assert len(family) <= 2 ** (k + 3) * math.log(k) / (k + 1)


@pytest.mark.parametrize("seed", range(5))
def test_randomized_dominating(seed):
    family = dominating_family(6, "randomized", seed=seed)
    assert is_dominating_family(family, 6)
    assert all(family)  # never contains the empty set


def test_cover_variant_exempts_empty_set():
    family = dominating_family(2, require_empty=False)
    assert family == (frozenset({1, 2}),)
    assert is_dominating_family(family, 2, require_empty=False)
    assert not is_dominating_family(family, 2, require_empty=True)


def test_dominating_family_deterministic():
    assert dominating_family(7) == dominating_family(7)


# ---------------------------------------------------------------------------
# facet families
# ---------------------------------------------------------------------------

def test_permutation_family_k3():
    perms = chains_to_permutations(symmetric_chain_cover(2), 2)
    family = permutation_facet_family(3, perms)
    assert family.size == 2
    covered = family.covered_points()
    top = {p for p in cube(3) if p[-1] == 1}
    assert top <= covered
    assert (0, 0, 0) in covered


def test_permutation_facet_k2():
    family = permutation_facet_family(2, [(1,)])
    # the constructor may swap two vertices to fix the orientation sign
    assert set(family.facets[0].vertices) == {(0, 0), (0, 1), (1, 1)}


def test_full_support_vertex_in_every_permutation_facet():
    k = 4
    perms = chains_to_permutations(symmetric_chain_cover(k - 1), k - 1)
    family = permutation_facet_family(k, perms)
    all_ones = (1,) * k
    for facet in family.facets:
        assert all_ones in facet.vertices


def test_dominating_facet_family_k3():
    family = dominating_facet_family(3, [frozenset({1, 2})])
    assert family.size == 1
    verts = set(family.facets[0].vertices)
    assert {(1, 1, 0), (1, 0, 0), (0, 1, 0)} <= verts


def test_dominating_facet_rejects_empty_generator():
    with pytest.raises(ValidationError):
        dominating_facet_vertices(3, frozenset())
    with pytest.raises(PreconditionError):
        dominating_facet_family(3, [])


def test_dominating_facet_k4_single_subset():
    verts = dominating_facet_vertices(4, frozenset({2}))
    assert (0, 1, 0, 0) in verts and (0, 0, 0, 0) in verts


def test_closed_form_rows_match_determinant_rows():
    # the inequalities y <= sum (2i-1) x_pi(i) and the subset variant are an
    # independent oracle for the determinant construction
    for k in (2, 3, 4):
        h = staircase_height(k)
        perms = chains_to_permutations(symmetric_chain_cover(k - 1), k - 1)
        for perm in perms:
            facet = permutation_facet_family(k, [perm]).facets[0]
            scale = facet.y_coeff
            coeffs = [(c / scale).as_fraction() for c in facet.coeffs]
            expected = [Fraction(0)] * k
            for i, var in enumerate(perm, start=1):
                expected[var - 1] = Fraction(-(2 * i - 1))
            assert coeffs == expected
            assert (facet.rhs / scale).as_fraction() == 0
        from relaxcert.lift import facet_inequality_from_simplex
        for family in (dominating_family(k - 1, require_empty=False),):
            for subset in family:
                facet = facet_inequality_from_simplex(
                    dominating_facet_vertices(k, subset), h, "upper")
                b = len(subset)
                scale = facet.y_coeff
                coeffs = [(c / scale).as_fraction() for c in facet.coeffs]
                rest = sorted(set(range(1, k)) - subset)
                expected = [Fraction(0)] * k
                for i in subset:
                    expected[i - 1] = Fraction(2 * b - 1)
                for i, var in enumerate(rest, start=1):
                    expected[var - 1] = Fraction(-(2 * b + 2 * i - 1))
                expected[k - 1] = Fraction(-2 * b * b)
                assert coeffs == expected
                assert (facet.rhs / scale).as_fraction() == b * b - b


# ---------------------------------------------------------------------------
# full covers
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,expected_upper", [(2, 2), (3, 3)])
def test_full_cover_sizes(k, expected_upper):
    upper, lower = build_full_cover(k)
    assert upper.size == expected_upper
    assert lower.size == expected_upper
    points = set(cube(k))
    assert upper.covered_points() == points
    assert lower.covered_points() == points


def test_full_cover_every_vertex_on_upper_and_lower():
    k = 4
    upper, lower = build_full_cover(k)
    for p in cube(k):
        assert any(p in f.vertices for f in upper.facets)
        assert any(p in f.vertices for f in lower.facets)


# ---------------------------------------------------------------------------
# brute-force facet enumeration
# ---------------------------------------------------------------------------

def test_enumerate_upper_facets_k2():
    h = staircase_height(2)
    uppers = enumerate_simplicial_upper_facets(cube(2), h)
    covered = set()
    for f in uppers:
        covered.update(f.vertices)
    assert covered == set(cube(2))


def test_enumerate_affine_heights():
    from relaxcert.field import make_context
    from relaxcert.lift import HeightFunction
    ctx = make_context(1, 2)
    pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
    h = HeightFunction.from_pairs((p, ctx.from_rational(p[0] + p[1])) for p in pts)
    # a flat lift has no simplicial facet among four coplanar lifted points
    assert enumerate_simplicial_upper_facets(pts, h) == []
    tri = pts[:3]
    h3 = HeightFunction.from_pairs((p, ctx.from_rational(p[0] + p[1])) for p in tri)
    assert len(enumerate_simplicial_upper_facets(tri, h3)) == 1


def test_enumeration_guard():
    from relaxcert.field import make_context
    from relaxcert.lift import HeightFunction
    ctx = make_context(1, 2)
    pts = [(i,) for i in range(5000)]
    h = HeightFunction.from_pairs((p, ctx.zero) for p in pts)
    with pytest.raises(ResourceLimitError):
        enumerate_simplicial_upper_facets(pts, h)


@pytest.mark.parametrize("k", [2, 3])
def test_involution_bijection_between_facet_lists(k):
    h = staircase_height(k)
    uppers = enumerate_simplicial_upper_facets(cube(k), h)
    lowers = enumerate_simplicial_lower_facets(cube(k), h)
    assert len(uppers) == len(lowers)
    reflect = lambda vs: frozenset(v[:-1] + (1 - v[-1],) for v in vs)
    assert {reflect(f.vertices) for f in uppers} == {frozenset(f.vertices) for f in lowers}


# ---------------------------------------------------------------------------
# exact set cover
# ---------------------------------------------------------------------------

def test_exact_cover_single_set():
    assert exact_min_cover([{1, 2, 3}], [1, 2, 3]) == 1


def test_exact_cover_guard():
    sets = [{i} for i in range(25)]
    with pytest.raises(ResourceLimitError):
        exact_min_cover(sets, list(range(25)))


def test_exact_cover_uncoverable():
    with pytest.raises(ValidationError):
        exact_min_cover([{1}], [1, 2])


def test_exact_cover_small_instances():
    sets = [{1, 2}, {2, 3}, {3, 4}, {1, 4}]
    assert exact_min_cover(sets, [1, 2, 3, 4]) == 2


def test_sucn_equals_slcn_k2_by_exact_search():
    h = staircase_height(2)
    pts = cube(2)
    uppers = enumerate_simplicial_upper_facets(pts, h)
    lowers = enumerate_simplicial_lower_facets(pts, h)
    sucn = exact_min_cover(uppers, pts)
    slcn = exact_min_cover(lowers, pts)
    assert sucn == slcn == 2


def test_facet_validation_inside_family_construction():
    # every realized facet passes the determinant oracle at every cube vertex
    for k in (2, 3, 4):
        upper, lower = build_full_cover(k)
        h = staircase_height(k)
        pts = cube(k)
        for facet in upper.facets + lower.facets:
            assert check_upper_facet(facet, pts, h).valid
