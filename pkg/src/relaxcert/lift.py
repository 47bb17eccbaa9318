"""Height functions on lattice point sets and facets of their convex lifts.

A height function lifts points of T into R^(k+1); the simplicial upper and
lower facets of the lifted hull carry determinant-derived inequalities in
(x, y).  The perturbation routine replaces rational heights on a chosen
subset by heights with irrational offsets along powers of a root of 2,
keeping a given facet cover valid, which it re-verifies exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._linalg import determinant, kernel_basis, solve
from .errors import DegenerateSimplexError, PreconditionError, ValidationError
from .field import FieldContext, FieldElement, as_fraction, make_context

Point = tuple[int, ...]


@dataclass(frozen=True)
class HeightFunction:
    """A total map from a finite ordered domain in Z^k to field elements."""

    domain: tuple[Point, ...]
    values: dict[Point, FieldElement]

    def __post_init__(self):
        for p in self.domain:
            if p not in self.values:
                raise ValidationError(f"no height for domain point {p}")
        if len(self.values) != len(self.domain):
            raise ValidationError("height values outside the stated domain")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Sequence[int], FieldElement]]) -> "HeightFunction":
        domain = []
        values = {}
        for point, value in pairs:
            point = tuple(int(x) for x in point)
            domain.append(point)
            values[point] = value
        return HeightFunction(tuple(domain), values)

    @property
    def context(self) -> FieldContext:
        return self.values[self.domain[0]].context

    @property
    def dimension(self) -> int:
        return len(self.domain[0])

    def __call__(self, point: Sequence[int]) -> FieldElement:
        return self.values[tuple(point)]

    def is_rational(self) -> bool:
        return all(v.is_rational() for v in self.values.values())

    def to_json_dict(self) -> dict:
        return {
            "field": self.context.to_json_dict(),
            "entries": [[list(p), self.values[p].to_json_list()] for p in self.domain],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "HeightFunction":
        ctx = FieldContext.from_json_dict(data["field"])
        return HeightFunction.from_pairs(
            (tuple(int(x) for x in point), ctx.element(coeffs))
            for point, coeffs in data["entries"])


@dataclass(frozen=True)
class FacetSimplex:
    """k+1 lifted points spanning a candidate upper or lower facet.

    The inequality coeffs . x + y_coeff * y <= rhs is tight at every lifted
    vertex; y_coeff is positive for upper orientation, negative for lower.
    """

    vertices: tuple[Point, ...]
    orientation: str
    coeffs: tuple[FieldElement, ...]
    y_coeff: FieldElement
    rhs: FieldElement

    def evaluate(self, point: Sequence[int], height: FieldElement) -> FieldElement:
        """Slack rhs - (coeffs . x + y_coeff * height); negative means violated."""
        total = self.rhs
        for c, x in zip(self.coeffs, point):
            if x and not c.is_zero():
                total = total - c * x
        return total - self.y_coeff * height

    def to_json_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "orientation": self.orientation,
            "coeffs": [c.to_json_list() for c in self.coeffs],
            "y_coeff": self.y_coeff.to_json_list(),
            "rhs": self.rhs.to_json_list(),
        }


@dataclass(frozen=True)
class FacetCheck:
    valid: bool
    violated_at: Point | None = None
    tight_extra: Point | None = None


@dataclass(frozen=True)
class AffineFunction:
    """Rational affine map x -> coeffs . x + offset."""

    coeffs: tuple[Fraction, ...]
    offset: Fraction

    def __call__(self, point: Sequence[int]) -> Fraction:
        return sum((c * x for c, x in zip(self.coeffs, point) if x), self.offset)


def staircase_height(k: int) -> HeightFunction:
    """Height (2*x_k - 1) * (x_1 + ... + x_(k-1))**2 on all of {0,1}^k."""
    if k < 2:
        raise ValidationError("staircase heights need dimension k >= 2")
    ctx = make_context(1, 2)
    pairs = []
    for mask in range(1 << k):
        point = tuple((mask >> (k - 1 - i)) & 1 for i in range(k))
        base = sum(point[:-1]) ** 2
        value = (2 * point[-1] - 1) * base
        pairs.append((point, ctx.from_rational(value)))
    pairs.sort(key=lambda pv: pv[0])
    return HeightFunction.from_pairs(pairs)


def _leading_determinant(vertices: Sequence[Point], ctx: FieldContext) -> FieldElement:
    one = ctx.one
    matrix = [[one] * len(vertices)]
    dim = len(vertices[0])
    for i in range(dim):
        matrix.append([ctx.from_rational(v[i]) for v in vertices])
    return determinant(matrix, ctx)


def facet_inequality_from_simplex(vertices: Sequence[Sequence[int]],
                                  heights: HeightFunction,
                                  orientation: str = "upper") -> FacetSimplex:
    """Inequality of the hyperplane through the lifted vertices.

    Expands the (k+2)x(k+2) determinant with the generic column (1, x, y)
    along that column; vertices are reordered (one swap) so that the sign
    of the leading determinant matches the requested orientation, making
    the row read y <= ... for upper and y >= ... for lower.
    """
    if orientation not in ("upper", "lower"):
        raise ValidationError(f"unknown orientation {orientation!r}")
    verts = [tuple(int(x) for x in v) for v in vertices]
    k = len(verts[0])
    if len(verts) != k + 1:
        raise DegenerateSimplexError(
            f"need exactly {k + 1} vertices in dimension {k}, got {len(verts)}")
    ctx = heights.context
    lead = _leading_determinant(verts, ctx)
    if lead.is_zero():
        raise DegenerateSimplexError(f"affinely dependent vertex set {verts}")
    want = 1 if orientation == "upper" else -1
    if lead.sign() != want:
        verts[0], verts[1] = verts[1], verts[0]
        lead = -lead
    # cofactors of the last column of rows (1...1 | v | h(v)) + (1, x, y)
    size = k + 2
    base_cols = []
    for v in verts:
        base_cols.append([ctx.one] + [ctx.from_rational(x) for x in v] + [heights(v)])
    cofactors = []
    for drop in range(size):
        minor = [[base_cols[c][r] for c in range(k + 1)]
                 for r in range(size) if r != drop]
        cof = determinant(minor, ctx)
        # the generic column sits at 0-indexed position size-1
        if (drop + size - 1) % 2 == 1:
            cof = -cof
        cofactors.append(cof)
    rhs = -cofactors[0]
    coeffs = tuple(cofactors[1:k + 1])
    y_coeff = cofactors[k + 1]
    facet = FacetSimplex(tuple(verts), orientation, coeffs, y_coeff, rhs)
    for v in verts:
        if not facet.evaluate(v, heights(v)).is_zero():
            raise AssertionError("facet inequality not tight at its own vertex")
    return facet


def check_upper_facet(facet: FacetSimplex, points: Iterable[Sequence[int]],
                      heights: HeightFunction) -> FacetCheck:
    """Validate a facet candidate against all lifted points of T.

    Valid means: the leading determinant sign matches the orientation (it
    does by construction), every non-vertex lifted point satisfies the
    inequality strictly, and no extra point is tight (which would make the
    facet non-simplicial).
    """
    vertex_set = set(facet.vertices)
    for point in points:
        point = tuple(int(x) for x in point)
        if point in vertex_set:
            continue
        s = facet.evaluate(point, heights(point)).sign()
        if s < 0:
            return FacetCheck(False, violated_at=point)
        if s == 0:
            return FacetCheck(False, tight_extra=point)
    return FacetCheck(True)


def perturb_heights(points: Iterable[Sequence[int]],
                    base: Iterable[Sequence[int]],
                    moved: Iterable[Sequence[int]],
                    heights: HeightFunction,
                    cover: Sequence[FacetSimplex]) -> tuple[HeightFunction, Fraction]:
    """Add independent irrational offsets on `moved`, preserving a facet cover.

    The j-th point of `moved` (in lexicographic order, counted from 1)
    receives offset eps * c**j with c = 2**(1/(len(moved)+1)), so the new
    heights on `moved` together with 1 are linearly independent over Q.
    eps = 2**-t for the smallest t such that every cover facet, rebuilt
    from its vertices under the new heights, is still valid; validity is
    re-verified with exact arithmetic.
    """
    t_points = sorted(tuple(int(x) for x in p) for p in points)
    x_set = {tuple(int(v) for v in p) for p in base}
    y_list = sorted(tuple(int(v) for v in p) for p in moved)
    if x_set & set(y_list):
        raise PreconditionError("base and moved point sets overlap")
    if x_set | set(y_list) != set(t_points):
        raise PreconditionError("base and moved sets do not partition the domain")
    if not heights.is_rational():
        raise PreconditionError("perturbation starts from rational heights")
    for facet in cover:
        if not check_upper_facet(facet, t_points, heights).valid:
            raise PreconditionError(
                f"cover facet {facet.vertices} is not valid under the given heights")
    if not y_list:
        return heights, Fraction(0)

    degree = len(y_list) + 1
    ctx = make_context(degree, 2)
    rational = {p: heights(p).as_fraction() for p in t_points}

    def build(eps: Fraction) -> HeightFunction:
        pairs = []
        for p in t_points:
            value = ctx.from_rational(rational[p])
            if p in offsets:
                value = value + ctx.root_power(offsets[p]) * eps
            pairs.append((p, value))
        return HeightFunction.from_pairs(pairs)

    offsets = {p: j + 1 for j, p in enumerate(y_list)}
    for t in range(64):
        eps = Fraction(1, 1 << t)
        candidate = build(eps)
        ok = True
        for facet in cover:
            rebuilt = facet_inequality_from_simplex(facet.vertices, candidate,
                                                    facet.orientation)
            if not check_upper_facet(rebuilt, t_points, candidate).valid:
                ok = False
                break
        if ok:
            return candidate, eps
    raise ArithmeticError("no perturbation size accepted after 64 halvings")


def affine_interpolant(points: Sequence[Sequence[int]],
                       heights: HeightFunction) -> AffineFunction:
    """Rational affine function agreeing with the heights on the given points."""
    pts = [tuple(int(x) for x in p) for p in points]
    if not pts:
        raise ValidationError("no interpolation points")
    dim = len(pts[0])
    ctx = make_context(1, 2)
    matrix = [[ctx.one] + [ctx.from_rational(x) for x in p] for p in pts]
    if len(pts) > 1:
        # affine independence <=> trivial left kernel of the homogenized matrix
        transposed = [[matrix[r][c] for r in range(len(pts))] for c in range(dim + 1)]
        if kernel_basis(transposed, ctx):
            raise DegenerateSimplexError("interpolation points are affinely dependent")
    rhs = []
    for p in pts:
        value = heights(p)
        if not value.is_rational():
            raise ValidationError("interpolant requires rational heights")
        rhs.append(ctx.from_rational(value.as_fraction()))
    solution = solve(matrix, rhs, ctx)
    if solution is None:
        raise DegenerateSimplexError("no affine function matches the heights")
    offset = solution[0].as_fraction()
    coeffs = tuple(v.as_fraction() for v in solution[1:])
    return AffineFunction(coeffs, offset)
