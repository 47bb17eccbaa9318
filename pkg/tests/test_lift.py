import random
from fractions import Fraction

import pytest

from relaxcert.errors import (DegenerateSimplexError, PreconditionError,
                              ValidationError)
from relaxcert.field import make_context
from relaxcert.lift import (HeightFunction, affine_interpolant,
                            check_upper_facet, facet_inequality_from_simplex,
                            perturb_heights, staircase_height)

CTX1 = make_context(1, 2)


def cube(k):
    return sorted(tuple((mask >> (k - 1 - i)) & 1 for i in range(k))
                  for mask in range(1 << k))


def rational_heights(pairs):
    return HeightFunction.from_pairs(
        (p, CTX1.from_rational(v)) for p, v in pairs)


# ---------------------------------------------------------------------------
# staircase heights
# ---------------------------------------------------------------------------

def test_staircase_values_k3():
    h = staircase_height(3)
    assert h((1, 1, 1)).as_fraction() == 4
    assert h((1, 1, 0)).as_fraction() == -4
    assert h((0, 0, 1)).as_fraction() == 0
    assert h((0, 0, 0)).as_fraction() == 0
    assert h((1, 0, 1)).as_fraction() == 1
    assert h((0, 1, 0)).as_fraction() == -1


def test_staircase_antisymmetry():
    for k in (2, 3, 4):
        h = staircase_height(k)
        for p in cube(k):
            mirrored = p[:-1] + (1 - p[-1],)
            assert h(mirrored).as_fraction() == -h(p).as_fraction()


def test_staircase_needs_k_at_least_two():
    with pytest.raises(ValidationError):
        staircase_height(1)


# ---------------------------------------------------------------------------
# facet inequalities from vertex sets
# ---------------------------------------------------------------------------

def test_permutation_facet_inequality_k3():
    h = staircase_height(3)
    facet = facet_inequality_from_simplex(
        [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)], h, "upper")
    # y <= x1 + 3*x2, i.e. -x1 - 3*x2 + y <= 0 up to positive scaling
    scale = facet.y_coeff
    assert scale.sign() > 0
    coeffs = [c / scale for c in facet.coeffs]
    assert [c.as_fraction() for c in coeffs] == [-1, -3, 0]
    assert (facet.rhs / scale).as_fraction() == 0


def test_affine_heights_give_exact_plane():
    pts = [(0, 0), (1, 0), (0, 1)]
    h = rational_heights([((0, 0), 5), ((1, 0), 7), ((0, 1), 2)])
    facet = facet_inequality_from_simplex(pts, h, "upper")
    scale = facet.y_coeff
    coeffs = [(c / scale).as_fraction() for c in facet.coeffs]
    assert coeffs == [-2, 3]
    assert (facet.rhs / scale).as_fraction() == 5


def test_dominating_facet_inequality_b2_k3():
    h = staircase_height(3)
    facet = facet_inequality_from_simplex(
        [(1, 1, 0), (1, 1, 1), (0, 1, 0), (1, 0, 0)], h, "upper")
    scale = facet.y_coeff
    coeffs = [(c / scale).as_fraction() for c in facet.coeffs]
    # y <= 2 - 3*x1 - 3*x2 + 8*x3
    assert coeffs == [3, 3, -8]
    assert (facet.rhs / scale).as_fraction() == 2


def test_degenerate_vertices_rejected():
    h = rational_heights([((0, 0), 0), ((1, 0), 1), ((2, 0), 2)])
    with pytest.raises(DegenerateSimplexError):
        facet_inequality_from_simplex([(0, 0), (1, 0), (2, 0)], h)


def test_facet_tight_at_own_vertices_random():
    rng = random.Random(31)
    for _ in range(30):
        pts = [(0, 0), (1, 0), (0, 1)]
        h = rational_heights([(p, Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
                              for p in pts])
        for orientation in ("upper", "lower"):
            facet = facet_inequality_from_simplex(pts, h, orientation)
            want = 1 if orientation == "upper" else -1
            assert facet.y_coeff.sign() == want
            for p in pts:
                assert facet.evaluate(p, h(p)).is_zero()


# ---------------------------------------------------------------------------
# facet validity checks
# ---------------------------------------------------------------------------

def test_check_valid_permutation_facet():
    h = staircase_height(3)
    facet = facet_inequality_from_simplex(
        [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)], h, "upper")
    assert check_upper_facet(facet, cube(3), h).valid


def test_check_flipped_orientation_reports_violation():
    h = staircase_height(3)
    facet = facet_inequality_from_simplex(
        [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)], h, "lower")
    result = check_upper_facet(facet, cube(3), h)
    assert not result.valid
    witness = result.violated_at
    # (1,1,0) is one of several violated points; the reported witness must
    # be a genuine non-vertex violation
    assert witness not in facet.vertices
    assert facet.evaluate(witness, h(witness)).sign() < 0
    assert facet.evaluate((1, 1, 0), h((1, 1, 0))).sign() < 0


def test_check_reports_extra_tight_point():
    # flat heights: every candidate plane through three points is tight at the rest
    pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
    h = rational_heights([(p, 0) for p in pts])
    facet = facet_inequality_from_simplex(pts[:3], h, "upper")
    result = check_upper_facet(facet, pts, h)
    assert not result.valid and result.tight_extra == (1, 1)


# ---------------------------------------------------------------------------
# perturbation
# ---------------------------------------------------------------------------

def build_cover_k3():
    from relaxcert.cover import build_full_cover
    upper, lower = build_full_cover(3)
    return upper.facets + lower.facets


def test_perturb_keeps_base_and_shifts_moved():
    points = cube(3)
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    moved = sorted(set(points) - set(base))
    h = staircase_height(3)
    cover = build_cover_k3()
    perturbed, eps = perturb_heights(points, base, moved, h, cover)
    assert eps > 0
    ctx = perturbed.context
    assert ctx.degree == len(moved) + 1 == 5
    for p in base:
        assert perturbed(p).is_rational()
        assert perturbed(p).as_fraction() == h(p).as_fraction()
    for j, p in enumerate(moved, start=1):
        offset = perturbed(p) - ctx.from_rational(h(p).as_fraction())
        assert offset == ctx.root_power(j) * eps


def test_perturb_values_independent_over_q():
    points = cube(3)
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    moved = sorted(set(points) - set(base))
    perturbed, _ = perturb_heights(points, base, moved, staircase_height(3),
                                   build_cover_k3())
    # coefficient vectors of 1 and the moved heights must have full rank
    vectors = [tuple(perturbed(p).coeffs) for p in moved]
    vectors.append((Fraction(1),) + (Fraction(0),) * 4)
    from relaxcert._linalg import kernel_basis
    ctx = perturbed.context
    matrix = [[ctx.from_rational(vec[i]) for vec in vectors] for i in range(5)]
    assert kernel_basis(matrix, ctx) == []


def test_perturb_halved_eps_still_valid():
    points = cube(3)
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    moved = sorted(set(points) - set(base))
    h = staircase_height(3)
    cover = build_cover_k3()
    perturbed, eps = perturb_heights(points, base, moved, h, cover)
    ctx = perturbed.context
    half = HeightFunction.from_pairs(
        (p, ctx.from_rational(h(p).as_fraction())
            + (ctx.root_power(j + 1) * (eps / 2) if p in moved else ctx.zero))
        for j, p in ((moved.index(q), q) if q in moved else (0, q) for q in points))
    for facet in cover:
        rebuilt = facet_inequality_from_simplex(facet.vertices, half, facet.orientation)
        assert check_upper_facet(rebuilt, points, half).valid


def test_perturb_empty_moved_set_is_identity():
    points = [(0, 0), (1, 0), (0, 1)]
    h = rational_heights([(p, 1) for p in points])
    perturbed, eps = perturb_heights(points, points, [], h, [])
    assert eps == 0
    assert all(perturbed(p) == h(p) for p in points)


def test_perturb_rejects_invalid_cover():
    points = cube(3)
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    moved = sorted(set(points) - set(base))
    h = staircase_height(3)
    bad = facet_inequality_from_simplex(
        [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)], h, "lower")
    with pytest.raises(PreconditionError):
        perturb_heights(points, base, moved, h, [bad])


def test_perturb_rejects_bad_partition():
    points = cube(2)
    with pytest.raises(PreconditionError):
        perturb_heights(points, points[:2], points[1:], staircase_height(2), [])


# ---------------------------------------------------------------------------
# affine interpolation
# ---------------------------------------------------------------------------

def test_interpolant_on_simplex_matches_staircase():
    h = staircase_height(3)
    base = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    f = affine_interpolant(base, h)
    assert f.coeffs == (Fraction(-1), Fraction(-1), Fraction(0))
    assert f.offset == 0
    for p in base:
        assert f(p) == h(p).as_fraction()


def test_interpolant_of_zero_heights_is_zero():
    pts = [(0, 0), (1, 0), (0, 1)]
    f = affine_interpolant(pts, rational_heights([(p, 0) for p in pts]))
    assert f.coeffs == (0, 0) and f.offset == 0


def test_interpolant_two_dimensional_example():
    pts = [(0, 0), (1, 0), (0, 1)]
    h = rational_heights([((0, 0), 0), ((1, 0), 1), ((0, 1), 2)])
    f = affine_interpolant(pts, h)
    assert f.coeffs == (1, 2) and f.offset == 0


def test_interpolant_rejects_dependent_points():
    pts = [(0, 0), (1, 1), (2, 2)]
    h = rational_heights([(p, 0) for p in pts])
    with pytest.raises(DegenerateSimplexError):
        affine_interpolant(pts, h)


# ---------------------------------------------------------------------------
# orientation involution (reflection law)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3])
def test_reflection_maps_upper_to_lower(k):
    from relaxcert.cover import (enumerate_simplicial_lower_facets,
                                 enumerate_simplicial_upper_facets)
    h = staircase_height(k)
    pts = cube(k)
    uppers = enumerate_simplicial_upper_facets(pts, h)
    lowers = enumerate_simplicial_lower_facets(pts, h)
    reflect = lambda vs: frozenset(v[:-1] + (1 - v[-1],) for v in vs)
    assert {reflect(f.vertices) for f in uppers} == \
           {frozenset(f.vertices) for f in lowers}


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_height_function_json_round_trip():
    h = staircase_height(3)
    data = h.to_json_dict()
    back = HeightFunction.from_json_dict(data)
    assert back.domain == h.domain
    assert all(back(p) == h(p) for p in h.domain)


def test_facet_json_dict_shape():
    h = staircase_height(2)
    facet = facet_inequality_from_simplex([(0, 0), (0, 1), (1, 1)], h, "upper")
    data = facet.to_json_dict()
    assert data["orientation"] == "upper"
    assert len(data["coeffs"]) == 2 and len(data["vertices"]) == 3
