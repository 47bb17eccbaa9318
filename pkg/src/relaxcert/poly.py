"""H-representation polyhedra over a field context.

Systems are finite lists of rows ``coeffs . x <= rhs`` with exact field
coefficients.  Provides exact membership, Fourier-Motzkin elimination,
coordinate bounds, lattice-point enumeration in boxes, affine pullbacks,
recession systems, and coordinate-subspace restriction.  Nothing here is
ever evaluated in floating point; the vectorized enumeration path uses
exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .field import FieldContext, FieldElement

DEFAULT_POINT_CAP = 1 << 26


@dataclass(frozen=True)
class PointSet:
    """A finite set of integer points with a fixed ambient dimension."""

    dimension: int
    points: tuple[tuple[int, ...], ...]
    label: str | None = None

    def __post_init__(self):
        seen = set()
        for p in self.points:
            if len(p) != self.dimension:
                raise ValidationError(
                    f"point {p} has length {len(p)}, expected {self.dimension}")
            if p in seen:
                raise ValidationError(f"duplicate point {p}")
            seen.add(p)

    def __contains__(self, point) -> bool:
        return tuple(point) in set(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def as_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.points)

    def to_json_dict(self) -> dict:
        data = {"dimension": self.dimension, "points": [list(p) for p in self.points]}
        if self.label:
            data["label"] = self.label
        return data

    @staticmethod
    def from_json_dict(data: dict) -> "PointSet":
        return PointSet(int(data["dimension"]),
                        tuple(tuple(int(x) for x in p) for p in data["points"]),
                        data.get("label"))


@dataclass(frozen=True)
class Box:
    """Per-variable integer bounds, lower <= upper componentwise."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValidationError(f"empty box range [{lo}, {hi}]")

    @staticmethod
    def uniform(lo: int, hi: int, dimension: int) -> "Box":
        return Box(((lo, hi),) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def volume(self) -> int:
        v = 1
        for lo, hi in self.bounds:
            v *= hi - lo + 1
        return v

    def contains_point(self, point: Sequence[int]) -> bool:
        return all(lo <= x <= hi for (lo, hi), x in zip(self.bounds, point))

    def __str__(self) -> str:
        return ",".join(f"{lo}:{hi}" for lo, hi in self.bounds)


@dataclass(frozen=True)
class Row:
    coeffs: tuple[FieldElement, ...]
    rhs: FieldElement


@dataclass(frozen=True)
class Membership:
    inside: bool
    tight_rows: tuple[int, ...]
    violated_rows: tuple[int, ...]


@dataclass(frozen=True)
class VarBounds:
    """Result of coordinate_bounds: None stands for an unbounded side."""

    lower: FieldElement | None
    upper: FieldElement | None
    infeasible: bool = False

    @property
    def bounded(self) -> bool:
        return not self.infeasible and self.lower is not None and self.upper is not None


def _default_names(num_vars: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(num_vars))


@dataclass(frozen=True)
class LinearSystem:
    """Finite inequality system coeffs . x <= rhs over a shared field context.

    The row list is never implicitly simplified: its length is the facet
    count reported to callers.
    """

    context: FieldContext
    num_vars: int
    rows: tuple[Row, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        for row in self.rows:
            if len(row.coeffs) != self.num_vars:
                raise ValidationError(
                    f"row has {len(row.coeffs)} coefficients, expected {self.num_vars}")
        if self.names is not None and len(self.names) != self.num_vars:
            raise ValidationError("variable name list has the wrong length")

    @staticmethod
    def from_rows(context: FieldContext,
                  rows: Iterable[tuple[Sequence, object]],
                  num_vars: int,
                  names: Sequence[str] | None = None) -> "LinearSystem":
        built = []
        for coeffs, rhs in rows:
            built.append(Row(tuple(context.coerce(c) for c in coeffs), context.coerce(rhs)))
        return LinearSystem(context, num_vars, tuple(built),
                            tuple(names) if names is not None else None)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def variable_names(self) -> tuple[str, ...]:
        return self.names if self.names is not None else _default_names(self.num_vars)

    # -- membership ---------------------------------------------------------

    def coerce_point(self, point: Sequence) -> tuple[FieldElement, ...]:
        if len(point) != self.num_vars:
            raise ValidationError(
                f"point of length {len(point)} in a {self.num_vars}-variable system")
        return tuple(self.context.coerce(x) for x in point)

    def row_slack(self, row: Row, point: tuple[FieldElement, ...]) -> FieldElement:
        """rhs - coeffs . point; negative sign means the row is violated."""
        total = row.rhs
        for c, x in zip(row.coeffs, point):
            if not c.is_zero() and not x.is_zero():
                total = total - c * x
        return total

    def contains(self, point: Sequence) -> Membership:
        p = self.coerce_point(point)
        tight, violated = [], []
        for i, row in enumerate(self.rows):
            s = self.row_slack(row, p).sign()
            if s < 0:
                violated.append(i)
            elif s == 0:
                tight.append(i)
        return Membership(not violated, tuple(tight), tuple(violated))

    def is_syntactically_infeasible(self) -> bool:
        """True when some row reads 0 . x <= negative."""
        for row in self.rows:
            if all(c.is_zero() for c in row.coeffs) and row.rhs.sign() < 0:
                return True
        return False

    # -- Fourier-Motzkin ------------------------------------------------------

    def eliminate_variable(self, j: int) -> "LinearSystem":
        """Project out variable j by combining its upper and lower bound rows.

        Only syntactic redundancy is removed afterwards: exact duplicates
        (after positive scaling), rows dominated by an identical coefficient
        vector with smaller rhs, and vacuous constant rows.  Infeasibility
        witnesses (0 <= negative) are kept.
        """
        if not 0 <= j < self.num_vars:
            raise ValidationError(f"variable index {j} out of range")
        tracked = [(row.coeffs, row.rhs, frozenset((i,))) for i, row in enumerate(self.rows)]
        survivors = _eliminate_tracked(tracked, j, level=1)
        names = None
        if self.names is not None:
            names = self.names[:j] + self.names[j + 1:]
        return LinearSystem(self.context, self.num_vars - 1,
                            tuple(Row(c, r) for c, r, _ in survivors), names)

    def coordinate_bounds(self, j: int) -> VarBounds:
        """Best bounds on variable j obtained by eliminating all others.

        Elimination order is chosen greedily (fewest pairings first).  The
        chained elimination drops rows whose combination history exceeds
        one plus the number of variables eliminated so far; such rows are
        always redundant, so the projection, and with it the bounds, stay
        exact.
        """
        if not 0 <= j < self.num_vars:
            raise ValidationError(f"variable index {j} out of range")
        tracked = [(row.coeffs, row.rhs, frozenset((i,))) for i, row in enumerate(self.rows)]
        remaining = self.num_vars
        target = j
        level = 1
        while remaining > 1:
            if _tracked_infeasible(tracked):
                return VarBounds(None, None, infeasible=True)
            best, best_cost = None, None
            for v in range(remaining):
                if v == target:
                    continue
                pos = sum(1 for c, _, _ in tracked if c[v].sign() > 0)
                neg = sum(1 for c, _, _ in tracked if c[v].sign() < 0)
                cost = pos * neg - pos - neg
                if best_cost is None or cost < best_cost:
                    best, best_cost = v, cost
            tracked = _eliminate_tracked(tracked, best, level)
            level += 1
            remaining -= 1
            if best < target:
                target -= 1
        if _tracked_infeasible(tracked):
            return VarBounds(None, None, infeasible=True)
        lower = upper = None
        for coeffs, rhs, _ in tracked:
            c = coeffs[0]
            s = c.sign()
            if s > 0:
                bound = rhs / c
                if upper is None or bound < upper:
                    upper = bound
            elif s < 0:
                bound = rhs / c
                if lower is None or bound > lower:
                    lower = bound
        if lower is not None and upper is not None and (upper - lower).sign() < 0:
            return VarBounds(None, None, infeasible=True)
        return VarBounds(lower, upper)

    def propagated_bounds(self, max_rounds: int = 8) -> list[VarBounds]:
        """Per-variable bounds by exact interval propagation over the rows.

        Sound but not necessarily tight: every feasible point respects the
        returned intervals, while an unbounded verdict here only means the
        propagation could not prove a bound (coordinate_bounds decides it
        exactly).  Cheap, and immediate whenever single-variable rows are
        present.
        """
        lower: list[FieldElement | None] = [None] * self.num_vars
        upper: list[FieldElement | None] = [None] * self.num_vars
        row_signs = [[c.sign() for c in row.coeffs] for row in self.rows]
        for _ in range(max_rounds):
            changed = False
            for row, signs in zip(self.rows, row_signs):
                support = [v for v, s in enumerate(signs) if s]
                for v in support:
                    residual = row.rhs
                    ok = True
                    for u in support:
                        if u == v:
                            continue
                        bound = lower[u] if signs[u] > 0 else upper[u]
                        if bound is None:
                            ok = False
                            break
                        residual = residual - row.coeffs[u] * bound
                    if not ok:
                        continue
                    candidate = residual / row.coeffs[v]
                    if signs[v] > 0:
                        if upper[v] is None or (candidate - upper[v]).sign() < 0:
                            upper[v] = candidate
                            changed = True
                    else:
                        if lower[v] is None or (candidate - lower[v]).sign() > 0:
                            lower[v] = candidate
                            changed = True
            if not changed:
                break
        return [VarBounds(lo, hi) for lo, hi in zip(lower, upper)]

    # -- affine operations ------------------------------------------------------

    def substitute_affine(self, matrix: Sequence[Sequence], shift: Sequence | None = None
                          ) -> "LinearSystem":
        """Pull the system back under z -> matrix . z + shift (new vars z).

        matrix has one row per old variable; row count of the system is
        preserved exactly.
        """
        if len(matrix) != self.num_vars:
            raise ValidationError(
                f"substitution matrix has {len(matrix)} rows, expected {self.num_vars}")
        mat = [tuple(self.context.coerce(v) for v in row) for row in matrix]
        new_dim = len(mat[0]) if mat else 0
        for row in mat:
            if len(row) != new_dim:
                raise ValidationError("ragged substitution matrix")
        if shift is None:
            t = (self.context.zero,) * self.num_vars
        else:
            if len(shift) != self.num_vars:
                raise ValidationError("shift vector has the wrong length")
            t = tuple(self.context.coerce(v) for v in shift)
        zero = self.context.zero
        new_rows = []
        for row in self.rows:
            new_coeffs = []
            for col in range(new_dim):
                acc = zero
                for a, mrow in zip(row.coeffs, mat):
                    if not a.is_zero() and not mrow[col].is_zero():
                        acc = acc + a * mrow[col]
                new_coeffs.append(acc)
            offset = zero
            for a, tv in zip(row.coeffs, t):
                if not a.is_zero() and not tv.is_zero():
                    offset = offset + a * tv
            new_rows.append(Row(tuple(new_coeffs), row.rhs - offset))
        return LinearSystem(self.context, new_dim, tuple(new_rows))

    def recession_system(self) -> "LinearSystem":
        zero = self.context.zero
        return LinearSystem(self.context, self.num_vars,
                            tuple(Row(row.coeffs, zero) for row in self.rows),
                            self.names)

    def restrict_to_subspace(self, fixed: dict[int, int]) -> "LinearSystem":
        """Substitute integer constants for the given variables."""
        for idx in fixed:
            if not 0 <= idx < self.num_vars:
                raise ValidationError(f"variable index {idx} out of range")
        keep = [i for i in range(self.num_vars) if i not in fixed]
        new_rows = []
        for row in self.rows:
            rhs = row.rhs
            for idx, value in fixed.items():
                c = row.coeffs[idx]
                if not c.is_zero() and value:
                    rhs = rhs - c * value
            new_rows.append(Row(tuple(row.coeffs[i] for i in keep), rhs))
        names = None
        if self.names is not None:
            names = tuple(self.names[i] for i in keep)
        return LinearSystem(self.context, len(keep), _cleanup_rows(new_rows), names)

    # -- lattice point enumeration ----------------------------------------------

    def enumerate_lattice_points(self, box: Box, cap: int = DEFAULT_POINT_CAP,
                                 jobs: int = 1) -> list[tuple[int, ...]]:
        """All integer points of the box satisfying the system, in lex order."""
        if box.dimension != self.num_vars:
            raise ValidationError(
                f"box dimension {box.dimension} does not match {self.num_vars} variables")
        volume = box.volume
        if volume > cap:
            raise ResourceLimitError(
                f"box holds {volume} lattice points, above the cap of {cap}",
                required=volume)
        if self.num_vars == 0:
            ok = all(row.rhs.sign() >= 0 for row in self.rows)
            return [()] if ok else []
        int_rows = _integer_rows(self)
        fast = _fast_enumerate(self, int_rows, box)
        if fast is not None:
            return fast
        if jobs > 1 and box.bounds[0][1] > box.bounds[0][0]:
            return _enumerate_parallel(self, int_rows, box, jobs)
        return _slow_enumerate(self.context, int_rows, box)

    # -- serialization --------------------------------------------------------------

    def to_json_dict(self) -> dict:
        data = {
            "field": self.context.to_json_dict(),
            "num_vars": self.num_vars,
            "rows": [{"coeffs": [c.to_json_list() for c in row.coeffs],
                      "rhs": row.rhs.to_json_list()} for row in self.rows],
        }
        if self.names is not None:
            data["names"] = list(self.names)
        return data

    @staticmethod
    def from_json_dict(data: dict) -> "LinearSystem":
        ctx = FieldContext.from_json_dict(data["field"])
        rows = tuple(Row(tuple(ctx.element(c) for c in row["coeffs"]),
                         ctx.element(row["rhs"]))
                     for row in data["rows"])
        names = tuple(data["names"]) if "names" in data else None
        return LinearSystem(ctx, int(data["num_vars"]), rows, names)


# -----------------------------------------------------------------------------
# row cleanup and tracked elimination
# -----------------------------------------------------------------------------

def _normalize_row(row: Row) -> Row | None:
    """Scale so the first nonzero coefficient is +-1; drop vacuous rows.

    Returns None for constant rows 0 <= nonnegative; keeps infeasible
    constant rows so infeasibility is reported, never hidden.
    """
    pivot = None
    for c in row.coeffs:
        if not c.is_zero():
            pivot = c
            break
    if pivot is None:
        return None if row.rhs.sign() >= 0 else row
    scale = pivot.inverse() if pivot.sign() > 0 else (-pivot).inverse()
    return Row(tuple(c * scale for c in row.coeffs), row.rhs * scale)


def _cleanup_rows(rows: Iterable[Row]) -> tuple[Row, ...]:
    """Deduplicate normalized rows; for equal coefficient vectors keep min rhs."""
    tracked = [(row.coeffs, row.rhs, frozenset()) for row in rows]
    return tuple(Row(c, r) for c, r, _ in _cleanup_tracked(tracked))


_TrackedRow = tuple  # (coeffs, rhs, history frozenset of original row indices)


def _tracked_infeasible(rows) -> bool:
    return any(all(c.is_zero() for c in coeffs) and rhs.sign() < 0
               for coeffs, rhs, _ in rows)


def _cleanup_tracked(rows) -> list[_TrackedRow]:
    """Normalize, drop vacuous rows, and deduplicate equal coefficient vectors."""
    best: dict[tuple, _TrackedRow] = {}
    order: list[tuple] = []
    for coeffs, rhs, history in rows:
        norm = _normalize_row(Row(coeffs, rhs))
        if norm is None:
            continue
        key = norm.coeffs
        candidate = (norm.coeffs, norm.rhs, history)
        kept = best.get(key)
        if kept is None:
            best[key] = candidate
            order.append(key)
        else:
            cmp = (norm.rhs - kept[1]).sign()
            if cmp < 0 or (cmp == 0 and len(history) < len(kept[2])):
                best[key] = candidate
    return [best[key] for key in order]


def _eliminate_tracked(rows, j: int, level: int) -> list[_TrackedRow]:
    """One Fourier-Motzkin step on history-tracked rows.

    A combined row whose history holds more than level+1 original rows is
    redundant for the projection after `level` eliminations and is
    dropped; the remaining rows describe the projection exactly.
    """
    uppers, lowers, carried = [], [], []
    for coeffs, rhs, history in rows:
        s = coeffs[j].sign()
        if s > 0:
            inv = coeffs[j].inverse()
            uppers.append((tuple(c * inv for c in coeffs), rhs * inv, history))
        elif s < 0:
            inv = (-coeffs[j]).inverse()
            lowers.append((tuple(c * inv for c in coeffs), rhs * inv, history))
        else:
            carried.append((coeffs[:j] + coeffs[j + 1:], rhs, history))
    limit = level + 1
    combined = []
    for uc, ur, uh in uppers:
        for lc, lr, lh in lowers:
            history = uh | lh
            if len(history) > limit:
                continue
            coeffs = tuple(a + b for a, b in zip(uc, lc))
            combined.append((coeffs[:j] + coeffs[j + 1:], ur + lr, history))
    return _cleanup_tracked(carried + combined)


# -----------------------------------------------------------------------------
# enumeration back ends
# -----------------------------------------------------------------------------

def _integer_rows(system: LinearSystem):
    """Clear denominators: per row, integer coefficient matrix by basis power.

    Returns (degree, [(A, b)]) where A is a degree x num_vars integer array
    and b an integer vector of length degree, encoding sum_i (b[i] - A[i].x) c^i.
    """
    n = system.context.degree
    out = []
    for row in system.rows:
        den = 1
        for e in row.coeffs + (row.rhs,):
            for v in e.coeffs:
                d = v.denominator
                den = den // _gcd_int(den, d) * d
        a = [[int(e.coeffs[i] * den) for e in row.coeffs] for i in range(n)]
        b = [int(row.rhs.coeffs[i] * den) for i in range(n)]
        out.append((a, b))
    return out


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _slow_enumerate(context: FieldContext, int_rows, box: Box) -> list[tuple[int, ...]]:
    n = context.degree
    ranges = [range(lo, hi + 1) for lo, hi in box.bounds]
    result = []
    sign_of = context.sign_of_int_vector
    for point in itertools.product(*ranges):
        ok = True
        for a, b in int_rows:
            vec = tuple(b[i] - sum(a[i][j] * point[j] for j in range(len(point)) if a[i][j])
                        for i in range(n))
            if sign_of(vec) < 0:
                ok = False
                break
        if ok:
            result.append(point)
    return result


def _enum_chunk(args):
    system_json, sub_bounds = args
    system = LinearSystem.from_json_dict(system_json)
    return _slow_enumerate(system.context, _integer_rows(system), Box(tuple(sub_bounds)))


def _enumerate_parallel(system: LinearSystem, int_rows, box: Box, jobs: int
                        ) -> list[tuple[int, ...]]:
    lo0, hi0 = box.bounds[0]
    span = hi0 - lo0 + 1
    jobs = min(jobs, span)
    edges = [lo0 + (span * i) // jobs for i in range(jobs)] + [hi0 + 1]
    tasks = []
    sys_json = system.to_json_dict()
    for i in range(jobs):
        sub = ((edges[i], edges[i + 1] - 1),) + box.bounds[1:]
        tasks.append((sys_json, sub))
    result: list[tuple[int, ...]] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_enum_chunk, tasks):
            result.extend(part)
    return result


_FAST_MAGNITUDE_LIMIT = 1 << 30
_FAST_CHUNK = 1 << 18


def _fast_enumerate(system: LinearSystem, int_rows, box: Box):
    """Vectorized exact enumeration for fields of degree <= 2.

    Uses int64 arithmetic only; the sign of v0 + v1*sqrt(r) is decided by
    integer comparisons (v0^2 versus r*v1^2), which stays exact as long as
    magnitudes are bounded, checked up front.  Returns None when the
    system is outside the fast path's domain.
    """
    ctx = system.context
    n = ctx.degree
    if n > 2:
        return None
    if n == 2 and (ctx._rational_root is not None or ctx.radicand.denominator != 1):
        return None
    r_int = int(ctx.radicand) if n == 2 else 0
    max_abs = max(max(abs(lo), abs(hi)) for lo, hi in box.bounds)
    bound = 0
    for a, b in int_rows:
        for i in range(n):
            mag = abs(b[i]) + sum(abs(v) for v in a[i]) * max_abs
            bound = max(bound, mag)
    if bound == 0:
        bound = 1
    if bound >= (1 << 62) or (n == 2 and r_int * bound * bound >= (1 << 62)):
        return None

    d = system.num_vars
    a0 = np.array([a[0] for a, _ in int_rows], dtype=np.int64)
    b0 = np.array([b[0] for _, b in int_rows], dtype=np.int64)
    if n == 2:
        a1 = np.array([a[1] for a, _ in int_rows], dtype=np.int64)
        b1 = np.array([b[1] for _, b in int_rows], dtype=np.int64)

    # split into a prefix iterated in Python and a vectorized tail grid
    sizes = [hi - lo + 1 for lo, hi in box.bounds]
    split = d
    tail_volume = 1
    while split > 0 and tail_volume * sizes[split - 1] <= _FAST_CHUNK:
        split -= 1
        tail_volume *= sizes[split]
    tail_sizes = sizes[split:]
    tail_los = np.array([box.bounds[i][0] for i in range(split, d)], dtype=np.int64)
    if tail_sizes:
        grid = np.indices(tail_sizes, dtype=np.int64).reshape(d - split, -1)
        grid += tail_los[:, None]
    else:
        grid = np.zeros((0, 1), dtype=np.int64)

    result: list[tuple[int, ...]] = []
    prefix_ranges = [range(lo, hi + 1) for lo, hi in box.bounds[:split]]
    for prefix in itertools.product(*prefix_ranges):
        pref = np.array(prefix, dtype=np.int64)
        ok = np.ones(grid.shape[1], dtype=bool)
        for row_idx in range(len(int_rows)):
            v0 = b0[row_idx] - a0[row_idx, :split] @ pref - a0[row_idx, split:] @ grid
            if n == 2:
                v1 = b1[row_idx] - a1[row_idx, :split] @ pref - a1[row_idx, split:] @ grid
                neg = (v0 <= 0) & (v1 <= 0) & ((v0 < 0) | (v1 < 0))
                neg |= (v0 > 0) & (v1 < 0) & (v0 * v0 < r_int * v1 * v1)
                neg |= (v0 < 0) & (v1 > 0) & (v0 * v0 > r_int * v1 * v1)
            else:
                neg = v0 < 0
            ok &= ~neg
            if not ok.any():
                break
        for idx in np.nonzero(ok)[0]:
            result.append(prefix + tuple(int(x) for x in grid[:, idx]))
    return result
