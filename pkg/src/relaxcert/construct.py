"""Builders for every certified relaxation in the library.

Covers the five-row mixed system and its pullback to a 5-dimensional
simplex vertex set, the stretched one-parameter family, free-join
composition and the join-based bound for arbitrary dimension, the
cube-projection simplex copy, and the full project/lift/relax chain for
dimensions of the form 2**k - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cover import build_full_cover, dominating_family
from .errors import CertificationError, PreconditionError, ValidationError
from .field import FieldContext, as_fraction, make_context
from .lift import (HeightFunction, affine_interpolant, facet_inequality_from_simplex,
                   perturb_heights, staircase_height)
from .poly import Box, DEFAULT_POINT_CAP, LinearSystem, PointSet, Row
from .verify import Certificate, certify_mixed

DEFAULT_EPS = Fraction(1, 8)


@dataclass(frozen=True)
class RelaxationBundle:
    """A system, the point set it claims to relax, and how it was built."""

    system: LinearSystem
    target: PointSet
    provenance: dict
    default_box: Box

    def __post_init__(self):
        if self.system.num_vars != self.target.dimension:
            raise ValidationError("system and target dimensions differ")

    @property
    def claimed_facets(self) -> int:
        return self.system.num_rows

    def to_json_dict(self) -> dict:
        return {
            "system": self.system.to_json_dict(),
            "target": self.target.to_json_dict(),
            "provenance": self.provenance,
            "default_box": [list(b) for b in self.default_box.bounds],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "RelaxationBundle":
        return RelaxationBundle(
            LinearSystem.from_json_dict(data["system"]),
            PointSet.from_json_dict(data["target"]),
            dict(data["provenance"]),
            Box(tuple((int(lo), int(hi)) for lo, hi in data["default_box"])))


# ---------------------------------------------------------------------------
# reference point sets
# ---------------------------------------------------------------------------

def simplex_points(d: int) -> PointSet:
    """The origin and the d unit vectors in Z^d."""
    if d < 0:
        raise ValidationError("dimension must be nonnegative")
    points = [tuple([0] * d)]
    for i in range(d):
        points.append(tuple(1 if j == i else 0 for j in range(d)))
    if d == 0:
        return PointSet(0, (tuple(),), label="Delta_0")
    return PointSet(d, tuple(points), label=f"Delta_{d}")


def stretched_simplex_points(a: int) -> PointSet:
    """Vertex set of a 5-simplex whose last generator is stretched by a."""
    if a < 1:
        raise ValidationError("stretch factor must be a positive integer")
    points = (
        (0, 0, 0, 0, 0),
        (1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0),
        (0, 0, 1, 0, 0),
        (1, 0, 1, 1, 0),
        (0, 1, 1, 0, a),
    )
    return PointSet(5, points, label=f"stretched_simplex_a{a}")


def projected_simplex_points() -> PointSet:
    """Integer parts of the projected 5-simplex: the base points in Z^3."""
    return PointSet(3, ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)),
                    label="projected_simplex_base")


def projected_simplex_heights(eps_context: FieldContext | None = None) -> HeightFunction:
    """Continuous coordinates of the projected 5-simplex over Q[sqrt2]."""
    ctx = eps_context if eps_context is not None else make_context(2, 2)
    minus_inv_sqrt2 = ctx.element((0, Fraction(-1, 2)))
    values = {
        (0, 0, 0): ctx.zero,
        (1, 0, 0): ctx.zero,
        (0, 1, 0): ctx.zero,
        (0, 0, 1): ctx.zero,
        (1, 0, 1): ctx.one,
        (0, 1, 1): minus_inv_sqrt2,
    }
    base = projected_simplex_points()
    return HeightFunction(base.points, values)


# ---------------------------------------------------------------------------
# the five-row mixed system and its pullbacks
# ---------------------------------------------------------------------------

def projected_simplex_relaxation(eps: Fraction | int | str = DEFAULT_EPS) -> LinearSystem:
    """Five inequalities over Q[sqrt2] in (x1, x2, x3, x4), x4 continuous.

    Rows, all written as <=:
        x4 - x1 <= 0
        x4 - x3 <= 0
        eps*x1 + x2 + (1-eps)(sqrt2-1)*x3 + (1-eps)(2-sqrt2)*x4 <= 1
        -x3 - sqrt2*x4 <= 0
        x1 - (1+eps)*x2 + x3 - x4 <= 1
    The sqrt2+1 denominators of the third row are cleared exactly.
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie strictly between 0 and 1, got {eps}")
    ctx = make_context(2, 2)

    def e(a, b=0):
        return ctx.element((as_fraction(a), as_fraction(b)))

    one_minus = 1 - eps
    rows = [
        ((e(-1), e(0), e(0), e(1)), e(0)),
        ((e(0), e(0), e(-1), e(1)), e(0)),
        ((e(eps), e(1), e(-one_minus, one_minus), e(2 * one_minus, -one_minus)), e(1)),
        ((e(0), e(0), e(-1), e(0, -1)), e(0)),
        ((e(1), e(-(1 + eps)), e(1), e(-1)), e(1)),
    ]
    return LinearSystem.from_rows(ctx, rows, 4, names=("x1", "x2", "x3", "x4"))


def _pullback_matrix(ctx: FieldContext, a: int):
    """Matrix of (x1..x5) -> (x1, x2, x3, x4 - x5/(a*sqrt2)) as a 4x5 block."""
    zero, one = ctx.zero, ctx.one
    minus_inv = ctx.element((0, Fraction(-1, 2 * a)))  # -1/(a*sqrt2) = -sqrt2/(2a)
    return [
        (one, zero, zero, zero, zero),
        (zero, one, zero, zero, zero),
        (zero, zero, one, zero, zero),
        (zero, zero, zero, one, minus_inv),
    ]


def stretched_simplex_relaxation(a: int, eps: Fraction | int | str = DEFAULT_EPS,
                                 cap: int = DEFAULT_POINT_CAP) -> RelaxationBundle:
    """Five-row relaxation of the stretched simplex vertex set in Z^5.

    The base mixed system is re-certified for the given eps before the
    pullback under the projection with kernel direction (0,0,0,1,a*sqrt2).
    """
    if a < 1:
        raise ValidationError("stretch factor must be a positive integer")
    base = projected_simplex_relaxation(eps)
    certificate = certify_mixed(base, projected_simplex_points(),
                                projected_simplex_heights(base.context), cap=cap)
    if not certificate.certified:
        raise CertificationError(
            f"mixed certificate failed for eps={eps}: {certificate.witness}",
            stage="mixed-system")
    system = base.substitute_affine(_pullback_matrix(base.context, a))
    system = LinearSystem(system.context, 5, system.rows,
                          ("x1", "x2", "x3", "x4", "x5"))
    target = stretched_simplex_points(a)
    box = Box(((-2, 3),) * 4 + ((-1, max(2, 2 * a)),))
    provenance = {
        "construction": "stretched_simplex" if a != 1 else "dim5",
        "a": a,
        "eps": str(as_fraction(eps)),
        "field_degree": 2,
        "mixed_certified": True,
    }
    return RelaxationBundle(system, target, provenance, box)


def simplex5_relaxation(eps: Fraction | int | str = DEFAULT_EPS,
                        cap: int = DEFAULT_POINT_CAP) -> RelaxationBundle:
    """The five-facet relaxation of the 5-dimensional simplex vertex set."""
    bundle = stretched_simplex_relaxation(1, eps, cap=cap)
    target = PointSet(5, bundle.target.points, label="Delta_equivalent_dim5")
    return RelaxationBundle(bundle.system, target, dict(bundle.provenance),
                            Box.uniform(-2, 3, 5))


# ---------------------------------------------------------------------------
# free joins
# ---------------------------------------------------------------------------

def delta0_bundle(context: FieldContext | None = None) -> RelaxationBundle:
    """The zero-dimensional simplex {()} with its one-row relaxation 0 <= 1."""
    ctx = context if context is not None else make_context(2, 2)
    system = LinearSystem(ctx, 0, (Row(tuple(), ctx.one),))
    return RelaxationBundle(system, PointSet(0, (tuple(),), label="Delta_0"),
                            {"construction": "delta0"}, Box(tuple()))


def standard_simplex_bundle(d: int, context: FieldContext | None = None) -> RelaxationBundle:
    """The d+1 row system -x_i <= 0, sum x_i <= 1 for the standard simplex."""
    if d < 0:
        raise ValidationError("dimension must be nonnegative")
    if d == 0:
        return delta0_bundle(context)
    ctx = context if context is not None else make_context(2, 2)
    zero, one = ctx.zero, ctx.one
    rows = []
    for i in range(d):
        rows.append(Row(tuple(-one if j == i else zero for j in range(d)), zero))
    rows.append(Row((one,) * d, one))
    system = LinearSystem(ctx, d, tuple(rows))
    return RelaxationBundle(system, simplex_points(d),
                            {"construction": "standard_simplex", "d": d},
                            Box.uniform(-1, 2, d))


def free_join_compose(left: RelaxationBundle, right: RelaxationBundle) -> RelaxationBundle:
    """Relaxation of the free join: left at level z=0, right at level z=1.

    Rows become A x + b z <= b and C y - d z <= 0 over k + l + 1 variables;
    requires the origin in both targets and nonnegative right-hand sides
    with a strictly positive entry on each side.
    """
    ctx = left.system.context
    if right.system.context != ctx:
        raise ValidationError("free join requires a shared field context")
    k, l = left.system.num_vars, right.system.num_vars
    if tuple([0] * k) not in left.target or tuple([0] * l) not in right.target:
        raise PreconditionError(
            "free join needs the origin in both point sets; translate first")
    for name, bundle in (("left", left), ("right", right)):
        signs = [row.rhs.sign() for row in bundle.system.rows]
        if any(s < 0 for s in signs):
            raise PreconditionError(f"{name} system has a negative right-hand side")
        if not any(s > 0 for s in signs):
            raise PreconditionError(f"{name} system has no strictly positive right-hand side")
    zero = ctx.zero
    rows = []
    for row in left.system.rows:
        rows.append(Row(row.coeffs + (zero,) * l + (row.rhs,), row.rhs))
    for row in right.system.rows:
        rows.append(Row((zero,) * k + row.coeffs + (-row.rhs,), zero))
    system = LinearSystem(ctx, k + l + 1, tuple(rows))
    points = [p + (0,) * l + (0,) for p in left.target.points]
    points += [(0,) * k + q + (1,) for q in right.target.points]
    target = PointSet(k + l + 1, tuple(points), label="free_join")
    provenance = {
        "construction": "free_join",
        "left": left.provenance.get("construction"),
        "right": right.provenance.get("construction"),
        "rows": len(rows),
    }
    return RelaxationBundle(system, target, provenance,
                            Box.uniform(-1, 2, k + l + 1))


def composed_simplex_relaxation(d: int, eps: Fraction | int | str = DEFAULT_EPS
                                ) -> RelaxationBundle:
    """Join-composed relaxation of a simplex vertex set of dimension d.

    Uses floor((d+1)/6) copies of the five-row block plus one standard
    simplex factor for the remainder, for 5*floor((d+1)/6) + ((d+1) mod 6)
    rows in total.
    """
    if d < 1:
        raise ValidationError("dimension must be at least 1")
    copies, remainder = divmod(d + 1, 6)
    parts: list[RelaxationBundle] = []
    if copies:
        block = simplex5_relaxation(eps)
        parts = [block] * copies
    if remainder:
        parts.append(standard_simplex_bundle(remainder - 1))
    bundle = parts[0]
    for part in parts[1:]:
        bundle = free_join_compose(bundle, part)
    provenance = {
        "construction": "composed_simplex",
        "d": d,
        "eps": str(as_fraction(eps)),
        "copies_of_dim5": copies,
        "remainder_rows": remainder,
        "rows": bundle.system.num_rows,
    }
    return RelaxationBundle(bundle.system, bundle.target, provenance,
                            Box.uniform(-1, 2, d))


# ---------------------------------------------------------------------------
# the cube-projection simplex copy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubeSimplexSplit:
    """Unimodular simplex copy whose first-k projection is the 0/1 cube."""

    points: PointSet               # d+1 points in Z^d, d = 2^k - 1
    base: PointSet                 # projections of the first k+1 columns
    moved: PointSet                # projections of the remaining columns
    basis_matrix: tuple[tuple[int, ...], ...]  # unimodular witness, d x d


def cube_simplex_split(k: int) -> CubeSimplexSplit:
    """Columns 0, (e_i, 0), (B_j, e_j) with B_j the 0/1 vectors of weight >= 2."""
    if k < 2:
        raise ValidationError("construction needs k >= 2")
    d = (1 << k) - 1
    heavy = sorted(tuple((mask >> (k - 1 - i)) & 1 for i in range(k))
                   for mask in range(1 << k)
                   if bin(mask).count("1") >= 2)
    m = d - k
    assert len(heavy) == m
    columns = [tuple([0] * d)]
    for i in range(k):
        columns.append(tuple(1 if j == i else 0 for j in range(d)))
    for j, b in enumerate(heavy):
        columns.append(b + tuple(1 if t == j else 0 for t in range(m)))
    # witness: the matrix with the nonzero columns maps the unit vectors there
    basis = tuple(tuple(columns[i + 1][r] for i in range(d)) for r in range(d))
    base = PointSet(k, tuple(c[:k] for c in columns[:k + 1]), label=f"Delta_{k}")
    moved = PointSet(k, tuple(heavy), label="cube_rest")
    return CubeSimplexSplit(PointSet(d, tuple(columns), label="cube_projection_simplex"),
                            base, moved, basis)


# ---------------------------------------------------------------------------
# the project / lift / relax chain
# ---------------------------------------------------------------------------

def pipeline_cover_sizes(k: int) -> dict:
    """Row-count bookkeeping for the chain at a given k, no field arithmetic."""
    if k < 2:
        raise ValidationError("pipeline needs k >= 2")
    perm_count = math.comb(k - 1, (k - 1) // 2)
    dom = dominating_family(k - 1, "greedy", require_empty=False)
    upper = perm_count + len(dom)
    return {
        "k": k,
        "permutation_facets": perm_count,
        "dominating_facets": len(dom),
        "upper_total": upper,
        "rows": 2 * k + 2 * upper,
    }


def pipeline_row_count(k: int) -> int:
    return pipeline_cover_sizes(k)["rows"]


@dataclass(frozen=True)
class PipelineRun:
    """All intermediate artifacts of one project/lift/relax execution."""

    k: int
    heights: HeightFunction            # rational staircase heights
    perturbed: HeightFunction          # heights with irrational offsets
    eps: Fraction
    mixed_system: LinearSystem
    certificate: Certificate | None
    bundle: RelaxationBundle


def pipeline_relaxation(k: int, cap: int = DEFAULT_POINT_CAP,
                        certify: bool = True) -> RelaxationBundle:
    """Certified relaxation of the simplex of dimension 2^k - 1; see pipeline_run."""
    return pipeline_run(k, cap=cap, certify=certify).bundle


def pipeline_run(k: int, cap: int = DEFAULT_POINT_CAP,
                 certify: bool = True) -> PipelineRun:
    """Build and certify the relaxation of the simplex of dimension 2^k - 1.

    Stages: split the cube into base and moved points; build the staircase
    heights and the upper/lower facet covers; perturb the moved heights
    into an irrational family while re-verifying the cover; assemble the
    mixed system from 2k box rows plus the cover facets; certify it; then
    subtract the affine interpolant of the base heights and pull back
    under the block substitution that folds the moved points into extra
    coordinates.  Row count is 2k plus twice the cover size.
    """
    if k < 2:
        raise ValidationError("pipeline needs k >= 2")
    if certify and k > 4:
        raise ValidationError(
            "full certification is supported for k <= 4; pass certify=False "
            "to build an uncertified system")
    split = cube_simplex_split(k)
    cube = sorted(set(split.base.points) | set(split.moved.points))
    heights = staircase_height(k)
    upper, lower = build_full_cover(k)
    perturbed, eps = perturb_heights(cube, split.base.points, split.moved.points,
                                     heights, upper.facets + lower.facets)
    ctx = perturbed.context
    zero, one = ctx.zero, ctx.one

    rows = []
    for i in range(k):
        rows.append(Row(tuple(one if j == i else zero for j in range(k)) + (zero,), one))
        rows.append(Row(tuple(-one if j == i else zero for j in range(k)) + (zero,), zero))
    for family in (upper, lower):
        for facet in family.facets:
            rebuilt = facet_inequality_from_simplex(facet.vertices, perturbed,
                                                    facet.orientation)
            rows.append(Row(rebuilt.coeffs + (rebuilt.y_coeff,), rebuilt.rhs))
    mixed = LinearSystem(ctx, k + 1, tuple(rows))

    certificate = None
    if certify:
        certificate = certify_mixed(mixed, PointSet(k, tuple(cube)), perturbed, cap=cap)
        if not certificate.certified:
            raise CertificationError(
                f"mixed certificate failed at k={k}: {certificate.witness}",
                stage="mixed-certificate")

    interpolant = affine_interpolant(split.base.points, heights)
    # shear away the rational affine part: (x, y) -> (x, y + f(x))
    shear = []
    for i in range(k):
        shear.append(tuple(one if j == i else zero for j in range(k)) + (zero,))
    shear.append(tuple(ctx.from_rational(c) for c in interpolant.coeffs) + (one,))
    shift = (zero,) * k + (ctx.from_rational(interpolant.offset),)
    sheared = mixed.substitute_affine(shear, shift)

    moved = list(split.moved.points)
    m = len(moved)
    folded_heights = {p: perturbed(p) - ctx.from_rational(interpolant(p)) for p in moved}
    # block substitution (u, v) -> (u + sum v_i p_i, sum h(p_i) v_i)
    block = []
    for i in range(k):
        block.append(tuple(one if j == i else zero for j in range(k))
                     + tuple(ctx.from_rational(moved[t][i]) for t in range(m)))
    block.append((zero,) * k + tuple(folded_heights[p] for p in moved))
    final = sheared.substitute_affine(block)

    d = (1 << k) - 1
    target = simplex_points(d)
    spot = [final.contains(p) for p in target.points]
    if not all(s.inside for s in spot):
        raise CertificationError("a target point violates the assembled system",
                                 stage="assembly")
    provenance = {
        "construction": "pipeline",
        "k": k,
        "d": d,
        "eps": str(eps),
        "field_degree": ctx.degree,
        "upper_facets": upper.size,
        "lower_facets": lower.size,
        "rows": final.num_rows,
        "mixed_certified": bool(certificate and certificate.certified),
    }
    if not certify:
        provenance["certification"] = "uncertified (construction and spot checks only)"
    bundle = RelaxationBundle(final, target, provenance, Box.uniform(-1, 2, d))
    return PipelineRun(k, heights, perturbed, eps, mixed, certificate, bundle)


# ---------------------------------------------------------------------------
# bound tabulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundRow:
    d: int
    trivial: int
    composed: int
    pipeline: int
    best: int


def relaxation_bound_table(d_max: int) -> list[BoundRow]:
    """Facet-count upper bounds per dimension from each construction.

    The pipeline column pads d up to the next 2^k - 1 and relies on the
    monotonicity of the bound in the dimension.
    """
    if d_max < 1:
        raise ValidationError("d_max must be at least 1")
    pipeline_at: dict[int, int] = {}
    k = 2
    while (1 << k) - 1 < d_max * 2 + 2:
        pipeline_at[(1 << k) - 1] = pipeline_row_count(k)
        k += 1
    rows = []
    for d in range(1, d_max + 1):
        trivial = d + 1
        composed = 5 * ((d + 1) // 6) + (d + 1) % 6
        padded = min(v for dd, v in pipeline_at.items() if dd >= d)
        rows.append(BoundRow(d, trivial, composed, padded,
                             min(trivial, composed, padded)))
    return rows
