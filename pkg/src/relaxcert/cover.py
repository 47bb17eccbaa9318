"""Covering machinery on the Boolean lattice and on lifted cube vertices.

Symmetric chain decompositions realize the binomial covering optimum for
chains; permutation-prefix facets cover the top layer of the lifted cube
and dominating-set facets the bottom layer.  A small branch-and-bound set
cover gives exact covering numbers on small instances.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PreconditionError, ResourceLimitError, ValidationError
from .lift import (FacetSimplex, HeightFunction, check_upper_facet,
                   facet_inequality_from_simplex, staircase_height)

Point = tuple[int, ...]


@dataclass(frozen=True)
class Chain:
    """Strictly increasing sequence of subsets of [n]."""

    subsets: tuple[frozenset[int], ...]

    def __post_init__(self):
        for a, b in zip(self.subsets, self.subsets[1:]):
            if not (a < b):
                raise ValidationError("chain subsets must strictly increase")

    def is_full(self, n: int) -> bool:
        return (len(self.subsets) == n + 1
                and not self.subsets[0] and len(self.subsets[-1]) == n)

    def __len__(self) -> int:
        return len(self.subsets)


@dataclass(frozen=True)
class CoverFamily:
    """Validated facets plus the generators that produced them."""

    kind: str  # "permutation", "dominating", or "explicit"
    generators: tuple
    facets: tuple[FacetSimplex, ...]

    @property
    def size(self) -> int:
        return len(self.facets)

    def covered_points(self) -> frozenset[Point]:
        points: set[Point] = set()
        for facet in self.facets:
            points.update(facet.vertices)
        return frozenset(points)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "generators": [sorted(g) if isinstance(g, frozenset) else list(g)
                           for g in self.generators],
            "facets": [f.to_json_dict() for f in self.facets],
        }


# ---------------------------------------------------------------------------
# symmetric chain decomposition
# ---------------------------------------------------------------------------

def symmetric_chain_cover(n: int) -> list[Chain]:
    """Partition of all subsets of [n] into C(n, floor(n/2)) symmetric chains.

    Bracket matching: scanning positions 1..n, a 0 opens and a 1 closes.
    Subsets sharing the same matched pairs form one chain, ordered by the
    number of unmatched positions switched on from the left.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    groups: dict[frozenset, list[frozenset]] = {}
    for mask in range(1 << n):
        stack: list[int] = []
        matched = []
        for pos in range(1, n + 1):
            if mask >> (pos - 1) & 1:
                if stack:
                    matched.append((stack.pop(), pos))
            else:
                stack.append(pos)
        key = frozenset(matched)
        subset = frozenset(pos for pos in range(1, n + 1) if mask >> (pos - 1) & 1)
        groups.setdefault(key, []).append(subset)
    chains = []
    for members in groups.values():
        members.sort(key=len)
        chains.append(Chain(tuple(members)))
    chains.sort(key=lambda ch: sorted(ch.subsets[0]))
    return chains


def chains_to_permutations(chains: Sequence[Chain], n: int | None = None
                           ) -> tuple[tuple[int, ...], ...]:
    """Extend each chain to a full chain and read it as a permutation.

    Gaps are filled by inserting the smallest missing element first; every
    subset covered by the input is then a prefix set of some permutation.
    """
    if n is None:
        n = 0
        for chain in chains:
            for subset in chain.subsets:
                n = max(n, max(subset, default=0))
    covered = set()
    for chain in chains:
        covered.update(chain.subsets)
    if len(covered) != 1 << n:
        raise ValidationError(
            f"chains cover {len(covered)} of {1 << n} subsets of [{n}]")
    perms = []
    universe = frozenset(range(1, n + 1))
    for chain in chains:
        order: list[int] = []
        current: set[int] = set()
        for member in chain.subsets + (universe,):
            missing = sorted(member - current)
            for element in missing:
                order.append(element)
                current.add(element)
        perms.append(tuple(order))
    return tuple(perms)


# ---------------------------------------------------------------------------
# dominating families on the Boolean lattice
# ---------------------------------------------------------------------------

def _dominated_by(subset: int, n: int) -> list[int]:
    """Bitmasks dominated by picking `subset`: itself and its one-smaller subsets."""
    out = [subset]
    mask = subset
    while mask:
        bit = mask & -mask
        out.append(subset ^ bit)
        mask ^= bit
    return out


def is_dominating_family(family: Iterable[frozenset[int]], n: int,
                         require_empty: bool = True) -> bool:
    """Every subset of [n] is in the family or has a one-larger superset in it."""
    masks = {sum(1 << (e - 1) for e in subset) for subset in family}
    start = 0 if require_empty else 1
    for mask in range(start, 1 << n):
        if mask in masks:
            continue
        pointed = False
        for pos in range(n):
            if not mask >> pos & 1 and mask | (1 << pos) in masks:
                pointed = True
                break
        if not pointed:
            return False
    return True


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(pos + 1 for pos in range(mask.bit_length()) if mask >> pos & 1)


def _family_sorted(masks: Iterable[int]) -> tuple[frozenset[int], ...]:
    sets = [_mask_to_set(m) for m in masks]
    sets.sort(key=lambda s: (len(s), sorted(s)))
    return tuple(sets)


def dominating_family(n: int, method: str = "greedy", seed: int | None = None,
                      require_empty: bool = True) -> tuple[frozenset[int], ...]:
    """Family of nonempty subsets dominating the Boolean lattice of [n].

    greedy: repeatedly take the subset covering the most uncovered sets
    (ties broken lexicographically on the sorted element tuple).
    randomized: two-stage sample, first picking each size-i subset with
    probability ln(n+1-i)/(n+1-i), then adding everything left undominated.
    With require_empty=False the empty set itself is exempt from the
    domination requirement (the facet cover handles it separately).
    The result is verified dominating before it is returned.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if method == "greedy":
        family = _greedy_dominating(n, require_empty)
    elif method == "randomized":
        family = _randomized_dominating(n, seed, require_empty)
    else:
        raise ValidationError(f"unknown method {method!r}")
    result = _family_sorted(family)
    if not is_dominating_family(result, n, require_empty):
        raise AssertionError("constructed family fails the domination check")
    return result


def _greedy_dominating(n: int, require_empty: bool) -> set[int]:
    total = 1 << n
    uncovered = bytearray([1]) * total
    if not require_empty:
        uncovered[0] = 0
    remaining = sum(uncovered)
    candidates = list(range(1, total))

    def lex_key(mask: int):
        return tuple(sorted(_mask_to_set(mask)))

    heap = []
    for mask in candidates:
        gain = sum(uncovered[m] for m in _dominated_by(mask, n))
        heap.append((-gain, lex_key(mask), mask))
    heapq.heapify(heap)
    chosen: set[int] = set()
    while remaining:
        neg_gain, key, mask = heapq.heappop(heap)
        gain = sum(uncovered[m] for m in _dominated_by(mask, n))
        if gain != -neg_gain:
            heapq.heappush(heap, (-gain, key, mask))
            continue
        if gain == 0:
            raise AssertionError("greedy ran out of useful candidates")
        chosen.add(mask)
        for m in _dominated_by(mask, n):
            if uncovered[m]:
                uncovered[m] = 0
                remaining -= 1
    return chosen


def _randomized_dominating(n: int, seed: int | None, require_empty: bool) -> set[int]:
    rng = random.Random(seed)
    total = 1 << n
    order = sorted(range(1, total), key=lambda m: (bin(m).count("1"), m))
    sampled: set[int] = set()
    for mask in order:
        size = bin(mask).count("1")
        p = math.log(n + 1 - size) / (n + 1 - size) if size < n else 0.0
        if rng.random() < p:
            sampled.add(mask)
    family = set(sampled)
    start = 0 if require_empty else 1
    for mask in range(start, total):
        if mask in family:
            continue
        pointed = any(not mask >> pos & 1 and mask | (1 << pos) in sampled
                      for pos in range(n))
        if not pointed:
            family.add(mask)
    if 0 in family:
        # the empty set cannot generate a facet; a singleton dominates it
        family.discard(0)
        family.add(1)
    return family


# ---------------------------------------------------------------------------
# facet families on the lifted cube
# ---------------------------------------------------------------------------

def _cube_points(k: int) -> list[Point]:
    return sorted(tuple((mask >> (k - 1 - i)) & 1 for i in range(k))
                  for mask in range(1 << k))


def _unit(k: int, index: int) -> tuple[int, ...]:
    """Unit vector with a 1 at 1-based position index."""
    return tuple(1 if i == index - 1 else 0 for i in range(k))


def _vec_add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def permutation_facet_vertices(k: int, perm: Sequence[int]) -> tuple[Point, ...]:
    """Vertex set 0, e_k, and the prefix sums e_k + e_perm(1) + ... + e_perm(t)."""
    if sorted(perm) != list(range(1, k)):
        raise ValidationError(f"{perm} is not a permutation of [{k - 1}]")
    verts = [tuple([0] * k), _unit(k, k)]
    current = _unit(k, k)
    for element in perm:
        current = _vec_add(current, _unit(k, element))
        verts.append(current)
    return tuple(verts)


def dominating_facet_vertices(k: int, subset: frozenset[int]) -> tuple[Point, ...]:
    """Vertex set built from a nonempty subset of [k-1] and its one-smaller subsets."""
    if not subset:
        raise ValidationError("the empty set does not generate a facet")
    if not subset <= set(range(1, k)):
        raise ValidationError(f"{sorted(subset)} is not a subset of [{k - 1}]")
    e_b = tuple(1 if i + 1 in subset else 0 for i in range(k))
    verts = [e_b, _vec_add(e_b, _unit(k, k))]
    for j in sorted(subset):
        verts.append(tuple(0 if i + 1 == j else v for i, v in enumerate(e_b)))
    rest = sorted(set(range(1, k)) - subset)
    current = _vec_add(e_b, _unit(k, k))
    for element in rest:
        current = _vec_add(current, _unit(k, element))
        verts.append(current)
    return tuple(verts)


def _realize_family(kind: str, k: int, generators, vertex_fn,
                    heights: HeightFunction) -> CoverFamily:
    points = _cube_points(k)
    facets = []
    for gen in generators:
        facet = facet_inequality_from_simplex(vertex_fn(k, gen), heights, "upper")
        check = check_upper_facet(facet, points, heights)
        if not check.valid:
            raise AssertionError(
                f"{kind} generator {gen} fails facet validation: {check}")
        facets.append(facet)
    return CoverFamily(kind, tuple(generators), tuple(facets))


def permutation_facet_family(k: int, perms: Sequence[Sequence[int]],
                             heights: HeightFunction | None = None) -> CoverFamily:
    """Validated upper facets for permutations of [k-1] under staircase heights."""
    heights = heights if heights is not None else staircase_height(k)
    perms = tuple(tuple(p) for p in perms)
    return _realize_family("permutation", k, perms, permutation_facet_vertices, heights)


def dominating_facet_family(k: int, family: Sequence[frozenset[int]],
                            heights: HeightFunction | None = None) -> CoverFamily:
    """Validated upper facets for a dominating family of subsets of [k-1]."""
    heights = heights if heights is not None else staircase_height(k)
    family = tuple(frozenset(b) for b in family)
    if not is_dominating_family(family, k - 1, require_empty=False):
        raise PreconditionError("family is not dominating over the nonempty subsets")
    return _realize_family("dominating", k, family, dominating_facet_vertices, heights)


def involution_image(facet: FacetSimplex, heights: HeightFunction) -> FacetSimplex:
    """Lower facet obtained by the reflection (x, y) -> (x', 1-x_k, -y)."""
    new_orientation = "lower" if facet.orientation == "upper" else "upper"
    new_vertices = tuple(v[:-1] + (1 - v[-1],) for v in facet.vertices)
    return facet_inequality_from_simplex(new_vertices, heights, new_orientation)


def build_full_cover(k: int) -> tuple[CoverFamily, CoverFamily]:
    """Upper and lower simplicial facet covers of the lifted cube vertices.

    Upper facets come from the symmetric-chain permutations plus a greedy
    dominating family; lower facets are their images under the reflection
    that flips the last coordinate and negates the height.  Both families
    are verified to cover all 2^k lifted points.
    """
    if k < 2:
        raise ValidationError("cover construction needs k >= 2")
    heights = staircase_height(k)
    perms = chains_to_permutations(symmetric_chain_cover(k - 1), k - 1)
    perm_family = permutation_facet_family(k, perms, heights)
    subsets = dominating_family(k - 1, "greedy", require_empty=False)
    dom_family = dominating_facet_family(k, subsets, heights)
    upper = CoverFamily("explicit",
                        perm_family.generators + dom_family.generators,
                        perm_family.facets + dom_family.facets)
    lower_facets = tuple(involution_image(f, heights) for f in upper.facets)
    points = set(_cube_points(k))
    for facet in lower_facets:
        check = check_upper_facet(facet, points, heights)
        if not check.valid:
            raise AssertionError(f"reflected facet invalid: {check}")
    lower = CoverFamily("explicit", upper.generators, lower_facets)
    if upper.covered_points() != points or lower.covered_points() != points:
        raise AssertionError("facet families leave lifted vertices uncovered")
    return upper, lower


# ---------------------------------------------------------------------------
# brute-force facet enumeration and exact set cover
# ---------------------------------------------------------------------------

_ENUMERATION_POINT_GUARD = 1 << 12


def enumerate_simplicial_upper_facets(points: Sequence[Sequence[int]],
                                      heights: HeightFunction,
                                      orientation: str = "upper"
                                      ) -> list[FacetSimplex]:
    """All valid simplicial facets of the requested orientation, by brute force."""
    pts = sorted(tuple(int(x) for x in p) for p in points)
    if len(pts) > _ENUMERATION_POINT_GUARD:
        raise ResourceLimitError(
            f"{len(pts)} points exceed the enumeration guard of {_ENUMERATION_POINT_GUARD}",
            required=len(pts))
    from itertools import combinations

    from .errors import DegenerateSimplexError
    k = len(pts[0])
    facets = []
    for candidate in combinations(pts, k + 1):
        try:
            facet = facet_inequality_from_simplex(candidate, heights, orientation)
        except DegenerateSimplexError:
            continue
        if check_upper_facet(facet, pts, heights).valid:
            facets.append(facet)
    return facets


def enumerate_simplicial_lower_facets(points: Sequence[Sequence[int]],
                                      heights: HeightFunction) -> list[FacetSimplex]:
    return enumerate_simplicial_upper_facets(points, heights, "lower")


_EXACT_COVER_GUARD = 24


def exact_min_cover(sets: Sequence, targets: Sequence) -> int:
    """Exact minimum number of the given sets needed to cover all targets.

    Accepts FacetSimplex values (their vertex sets are used) or plain
    iterables.  Branch and bound on the least-covered target.
    """
    collections = []
    for s in sets:
        if isinstance(s, FacetSimplex):
            collections.append(frozenset(s.vertices))
        else:
            collections.append(frozenset(s))
    if len(collections) > _EXACT_COVER_GUARD:
        raise ResourceLimitError(
            f"{len(collections)} sets exceed the exact-search guard of {_EXACT_COVER_GUARD}",
            required=len(collections))
    target_list = list(dict.fromkeys(targets))
    index = {t: i for i, t in enumerate(target_list)}
    universe = (1 << len(target_list)) - 1
    masks = []
    for coll in collections:
        mask = 0
        for t in coll:
            if t in index:
                mask |= 1 << index[t]
        masks.append(mask)
    joined = 0
    for m in masks:
        joined |= m
    if joined != universe:
        raise ValidationError("the sets cannot cover all targets")
    covers_bit: list[list[int]] = [[] for _ in target_list]
    for si, m in enumerate(masks):
        for bi in range(len(target_list)):
            if m >> bi & 1:
                covers_bit[bi].append(si)

    # greedy upper bound
    uncovered = universe
    greedy = 0
    while uncovered:
        best = max(range(len(masks)), key=lambda si: bin(masks[si] & uncovered).count("1"))
        uncovered &= ~masks[best]
        greedy += 1
    best_known = greedy
    max_cover = max(bin(m).count("1") for m in masks)

    def dfs(uncovered: int, used: int):
        nonlocal best_known
        if not uncovered:
            best_known = min(best_known, used)
            return
        lower = used + -(-bin(uncovered).count("1") // max_cover)
        if lower >= best_known:
            return
        # branch on the uncovered target with the fewest covering sets
        pick, pick_options = None, None
        mask = uncovered
        while mask:
            bit = mask & -mask
            bi = bit.bit_length() - 1
            options = [si for si in covers_bit[bi] if masks[si] & uncovered]
            if pick_options is None or len(options) < len(pick_options):
                pick, pick_options = bi, options
                if len(options) <= 1:
                    break
            mask ^= bit
        for si in pick_options:
            dfs(uncovered & ~masks[si], used + 1)

    dfs(universe, 0)
    return best_known
