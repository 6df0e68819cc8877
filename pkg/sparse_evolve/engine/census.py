"""
Exact counting and structural queries on concrete graphs.

Embeddings are INDUCED rooted embeddings: every represented edge must be
present and every absent ext-ext or ext-root pair must be a non-edge.
Edges among the root targets are never inspected.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Collection, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from sparse_evolve.core.config import settings
from sparse_evolve.core.exceptions import DegeneracyError, InvalidArgumentError, PreconditionError
from sparse_evolve.engine.calculus import (
    Predim,
    classify,
    d_value,
    min_subextension_delta,
    rooted_automorphism_count,
)
from sparse_evolve.engine.evolve import EvolvingGraph
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.census import Attachment, EmbeddingCount, GenericityVerdict, RootAssignment
from sparse_evolve.schemas.extension import RootedExtension

logger = logging.getLogger(__name__)

Roots = Union[RootAssignment, Sequence[int]]


@dataclass
class _Slot:
    vertex: int
    root_targets: Tuple[int, ...]
    root_avoid: FrozenSet[int]
    ext_nbrs: Tuple[int, ...]
    ext_non: Tuple[int, ...]
    min_degree: int


def _search_order(ext: RootedExtension) -> List[int]:
    # most constrained first: root anchors plus edges back to placed vertices
    ext_adj = [ext.ext_neighbors(v) for v in range(ext.ext_size)]
    root_deg = [len(ext.root_neighbors(v)) for v in range(ext.ext_size)]
    order: List[int] = []
    placed: Set[int] = set()
    while len(order) < ext.ext_size:
        v = max(
            (u for u in range(ext.ext_size) if u not in placed),
            key=lambda u: (root_deg[u] + len(ext_adj[u] & placed), len(ext_adj[u]), -u),
        )
        order.append(v)
        placed.add(v)
    return order


def _check_roots(g: EvolvingGraph, ext: RootedExtension, roots: Roots) -> Tuple[int, ...]:
    targets = roots.targets if isinstance(roots, RootAssignment) else tuple(roots)
    if len(targets) != ext.root_size:
        raise InvalidArgumentError(
            f"root assignment has {len(targets)} targets, extension expects {ext.root_size}"
        )
    if len(set(targets)) != len(targets):
        raise InvalidArgumentError("root targets must be distinct")
    for v in targets:
        if not 1 <= v <= g.num_vertices:
            raise InvalidArgumentError(f"root target {v} is not a vertex of G({g.num_vertices})")
    return targets


def _plan(ext: RootedExtension, targets: Tuple[int, ...]) -> List[_Slot]:
    slots = []
    placed: Set[int] = set()
    for v in _search_order(ext):
        root_nbrs = ext.root_neighbors(v)
        ext_nbrs = ext.ext_neighbors(v)
        slots.append(_Slot(
            vertex=v,
            root_targets=tuple(targets[r] for r in sorted(root_nbrs)),
            root_avoid=frozenset(targets[r] for r in range(ext.root_size) if r not in root_nbrs),
            ext_nbrs=tuple(u for u in sorted(ext_nbrs) if u in placed),
            ext_non=tuple(u for u in sorted(placed) if u not in ext_nbrs),
            min_degree=len(root_nbrs) + len(ext_nbrs),
        ))
        placed.add(v)
    return slots


def iter_embeddings(
    g: EvolvingGraph,
    ext: RootedExtension,
    roots: Roots,
    forbidden: Collection[int] = frozenset(),
    cap: Optional[int] = None,
) -> Iterator[Tuple[int, ...]]:
    """
    Yield induced rooted embeddings as tuples image[v] indexed by extension
    vertex, in a deterministic order. Stops after `cap` maps when given.
    """
    targets = _check_roots(g, ext, roots)
    forbidden = frozenset(forbidden)
    if forbidden & set(targets):
        raise InvalidArgumentError("forbidden set must be disjoint from the root targets")
    excluded = forbidden | set(targets)
    slots = _plan(ext, targets)
    n = ext.ext_size
    image = [0] * n
    used: Set[int] = set()
    emitted = 0

    def extend(i: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            yield tuple(image)
            return
        slot = slots[i]
        anchors = [g.neighbor_set(t) for t in slot.root_targets]
        anchors += [g.neighbor_set(image[u]) for u in slot.ext_nbrs]
        if anchors:
            anchors.sort(key=len)
            pool = sorted(anchors[0].intersection(*anchors[1:]))
        else:
            pool = g.vertices
        avoid = slot.root_avoid | {image[u] for u in slot.ext_non}
        for c in pool:
            if c in excluded or c in used or g.degree(c) < slot.min_degree:
                continue
            if not g.neighbor_set(c).isdisjoint(avoid):
                continue
            image[slot.vertex] = c
            used.add(c)
            yield from extend(i + 1)
            used.discard(c)

    for mapping in extend(0):
        yield mapping
        emitted += 1
        if cap is not None and emitted >= cap:
            return


def count_embeddings(
    g: EvolvingGraph,
    ext: RootedExtension,
    roots: Roots,
    forbidden: Collection[int] = frozenset(),
) -> EmbeddingCount:
    total = sum(1 for _ in iter_embeddings(g, ext, roots, forbidden))
    return EmbeddingCount(embeddings=total, automorphisms=rooted_automorphism_count(ext))


@dataclass
class RigidScan:
    """Connected candidate sets Z over a base X, split by the sign of d(Z/X)."""
    strict: List[FrozenSet[int]] = field(default_factory=list)
    boundary: List[FrozenSet[int]] = field(default_factory=list)

    def union(self) -> Set[int]:
        out: Set[int] = set()
        for z in self.strict:
            out |= z
        return out


def check_soft_limit(value: int, name: str, allow_large: bool = False) -> None:
    if value < 1:
        raise InvalidArgumentError(f"{name} must be positive, got {value}")
    if value > settings.CENSUS_SOFT_LIMIT and not allow_large:
        raise PreconditionError(
            f"{name}={value} exceeds the census soft limit {settings.CENSUS_SOFT_LIMIT}; pass allow_large to opt in"
        )


def _check_vertices(g: EvolvingGraph, vertices: Iterable[int], name: str) -> FrozenSet[int]:
    out = frozenset(vertices)
    for v in out:
        if not 1 <= v <= g.num_vertices:
            raise InvalidArgumentError(f"{name} contains {v}, not a vertex of G({g.num_vertices})")
    return out


def _pinned_core(g: EvolvingGraph, base: FrozenSet[int], m: int) -> Set[int]:
    """Vertices outside base surviving a min-degree-m peel in which base is never removed."""
    degree = {v: g.degree(v) for v in g.vertices if v not in base}
    queue = [v for v, d in degree.items() if d < m]
    removed: Set[int] = set()
    while queue:
        v = queue.pop()
        if v in removed:
            continue
        removed.add(v)
        for u in g.neighbors(v):
            if u in degree and u not in removed:
                degree[u] -= 1
                if degree[u] < m:
                    queue.append(u)
    return set(degree) - removed


def _completable(size: int, edges: int, t: int, base_size: int, p: int, q: int) -> bool:
    # some superset of at most t vertices could still reach delta(Z/X) <= 0
    for extra in range(t - size + 1):
        best = edges + extra * (size + base_size) + extra * (extra - 1) // 2
        if q * (size + extra) - p * best <= 0:
            return True
    return False


def _induced_extension(g: EvolvingGraph, base: FrozenSet[int], z: FrozenSet[int]) -> RootedExtension:
    edges = set()
    roots = set()
    for v in z:
        for u in g.neighbors(v):
            if u in z and u > v:
                edges.add((v, u))
            elif u in base:
                edges.add((u, v))
                roots.add(u)
    return RootedExtension.from_graph(edges, sorted(roots), sorted(z))


def rigid_extensions(
    g: EvolvingGraph,
    base: Iterable[int],
    t: int,
    alpha: Alpha,
    seeds: Optional[Iterable[int]] = None,
    allow_large: bool = False,
) -> RigidScan:
    """
    Every connected Z outside base with |Z| <= t and d(Z/base) <= 0.

    Without seeds all vertices surviving the pinned peel are starts. With
    seeds only sets containing a seed are reported and pruning falls back to
    global degree.
    """
    check_soft_limit(t, "t", allow_large)
    base = frozenset(base)
    p, q = alpha.numerator, alpha.denominator
    # a vertex of a rigid extension needs more than 1/alpha edges into X+Z
    m = -(-q // p)

    if seeds is None:
        allowed: Optional[Set[int]] = _pinned_core(g, base, m)
        starts = sorted(allowed)
    else:
        allowed = None
        starts = sorted(s for s in set(seeds) - base if g.degree(s) >= m)

    scan = RigidScan()
    banned: Set[int] = set()
    for start in starts:
        first = frozenset([start])
        e0 = len(g.neighbor_set(start) & base)
        stack = [(first, e0)]
        visited = {first}
        while stack:
            z, e = stack.pop()
            if q * len(z) - p * e <= 0 and all(
                len(g.neighbor_set(v) & z) + len(g.neighbor_set(v) & base) >= m for v in z
            ):
                gap = d_value(_induced_extension(g, base, z), alpha)
                if gap < 0:
                    scan.strict.append(z)
                elif gap == 0:
                    scan.boundary.append(z)
            if len(z) >= t:
                continue
            frontier = set()
            for v in z:
                frontier |= g.neighbor_set(v)
            frontier -= z
            frontier -= base
            frontier -= banned
            for w in frontier:
                if allowed is not None and w not in allowed:
                    continue
                if g.degree(w) < m:
                    continue
                bigger = z | {w}
                if bigger in visited:
                    continue
                nb = g.neighbor_set(w)
                gained = len(nb & z) + len(nb & base)
                if _completable(len(bigger), e + gained, t, len(base), p, q):
                    visited.add(bigger)
                    stack.append((bigger, e + gained))
        banned.add(start)
    logger.debug(f"rigid scan over |base|={len(base)}, t={t}: {len(scan.strict)} strict, {len(scan.boundary)} boundary")
    return scan


def _raise_if_uncovered(scan: RigidScan, covered: Set[int]) -> None:
    for z in scan.boundary:
        if not z <= covered:
            raise DegeneracyError(
                f"candidate {sorted(z)} has completion predimension exactly 0; rigidity is ambiguous",
                context={"candidate": sorted(z)},
            )


def irregular_vertices(g: EvolvingGraph, r: int, alpha: Alpha, allow_large: bool = False) -> FrozenSet[int]:
    check_soft_limit(r, "r", allow_large)
    scan = rigid_extensions(g, (), r, alpha, allow_large=allow_large)
    covered = scan.union()
    _raise_if_uncovered(scan, covered)
    return frozenset(covered)


def weak_closure(
    g: EvolvingGraph, X: Iterable[int], t: int, alpha: Alpha, allow_large: bool = False
) -> FrozenSet[int]:
    base = _check_vertices(g, X, "X")
    scan = rigid_extensions(g, base, t, alpha, allow_large=allow_large)
    covered = scan.union() | base
    _raise_if_uncovered(scan, covered)
    return frozenset(covered)


def is_t_generic(
    g: EvolvingGraph,
    A: Iterable[int],
    B: Iterable[int],
    t: int,
    alpha: Alpha,
    allow_large: bool = False,
) -> GenericityVerdict:
    """
    C ranges over vertex sets disjoint from B. E(C/AB) and E(C/A) differ
    exactly when C has an edge into B minus A, so a violation is a strictly
    rigid C/B touching B minus A. The reported witness is the smallest such
    set, ties broken by sorted ids.
    """
    a_set = _check_vertices(g, A, "A")
    b_set = _check_vertices(g, B, "B")
    if not a_set <= b_set:
        raise PreconditionError("A must be a subset of B")
    fresh = b_set - a_set
    seeds: Set[int] = set()
    for v in fresh:
        seeds |= g.neighbor_set(v)
    seeds -= b_set
    if not seeds:
        check_soft_limit(t, "t", allow_large)
        return GenericityVerdict(is_generic=True)

    scan = rigid_extensions(g, b_set, t, alpha, seeds=seeds, allow_large=allow_large)
    if scan.strict:
        witness = min(scan.strict, key=lambda z: (len(z), sorted(z)))
        return GenericityVerdict(is_generic=False, witness=sorted(witness))
    if scan.boundary:
        z = min(scan.boundary, key=lambda z: (len(z), sorted(z)))
        raise DegeneracyError(
            f"candidate {sorted(z)} has completion predimension exactly 0; genericity is ambiguous",
            context={"candidate": sorted(z)},
        )
    return GenericityVerdict(is_generic=True)


def compose(K: RootedExtension, H: RootedExtension) -> RootedExtension:
    """KH/R from H/R and K/HR, where K's root lists R first and then H's vertices."""
    if K.root_size != H.root_size + H.ext_size:
        raise PreconditionError(
            f"K must be rooted on R+H ({H.root_size + H.ext_size} vertices), got root_size {K.root_size}"
        )
    r, h = H.root_size, H.ext_size
    root_edges = list(H.root_edges)
    ext_edges = list(H.ext_edges)
    for x, e in K.root_edges:
        if x < r:
            root_edges.append((x, h + e))
        else:
            ext_edges.append((x - r, h + e))
    ext_edges += [(h + a, h + b) for a, b in K.ext_edges]
    return RootedExtension(root_size=r, ext_size=h + K.ext_size, root_edges=root_edges, ext_edges=ext_edges)


def classify_attachment(K: RootedExtension, H: RootedExtension, alpha: Alpha) -> Attachment:
    composite = compose(K, H)
    if K.ext_size == 0:
        return Attachment.NOT_MINIMALLY_RIGID
    k_class = classify(K, alpha)
    if k_class.is_degenerate:
        raise DegeneracyError("K/HR is degenerate")
    if not k_class.is_rigid:
        return Attachment.NOT_MINIMALLY_RIGID

    # minimality: no proper nonempty K'/HR is rigid
    full = (1 << K.ext_size) - 1
    for mask in range(1, full):
        vertices = [v for v in range(K.ext_size) if mask >> v & 1]
        gap = d_value(K.sub(vertices), alpha)
        if gap == 0:
            raise DegeneracyError(f"subextension {vertices} of K/HR is degenerate")
        if gap < 0:
            return Attachment.NOT_MINIMALLY_RIGID

    lowest = min_subextension_delta(composite, alpha)
    if lowest == 0:
        raise DegeneracyError("KH/R has a subextension of predimension exactly 0")
    return Attachment.LOOSE if lowest > 0 else Attachment.TIGHT


def concentration_margin(ext: RootedExtension, alpha: Alpha) -> Predim:
    if ext.ext_size == 0:
        raise PreconditionError("concentration margin needs at least one extension vertex")
    cls = classify(ext, alpha)
    if not cls.is_safe:
        raise PreconditionError("concentration margin is only defined for safe extensions")
    if cls.is_degenerate:
        raise DegeneracyError("extension is degenerate")
    return Fraction(1, 2) * min_subextension_delta(ext, alpha)
