"""
Predimension calculus for rooted graph extensions.

All quantities are exact. Internally a predimension delta(I/A) for the
intermediate I = A + M (M a bitmask of extension vertices) is kept scaled by
the denominator q of alpha = p/q as the integer q*|M| - p*e(M), where e(M)
counts root edges into M plus extension edges inside M. Additivity then
gives delta(B/I) = delta(B/A) - delta(I/A) for free.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from sparse_evolve.core.config import settings
from sparse_evolve.core.exceptions import DegeneracyError, PreconditionError
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.calculus import CalculusReport, ExtensionClass
from sparse_evolve.schemas.extension import RootedExtension

logger = logging.getLogger(__name__)

Predim = Fraction


@dataclass(frozen=True)
class _Profile:
    n: int
    q: int
    vals: Tuple[int, ...]

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def predim(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.q)


def _check_limit(ext: RootedExtension) -> None:
    if ext.ext_size > settings.SUBSET_SEARCH_LIMIT:
        raise PreconditionError(
            f"ext_size {ext.ext_size} exceeds the subset search limit {settings.SUBSET_SEARCH_LIMIT}"
        )


@lru_cache(maxsize=65536)
def _profile(ext: RootedExtension, alpha: Alpha) -> _Profile:
    _check_limit(ext)
    n = ext.ext_size
    p, q = alpha.numerator, alpha.denominator
    root_degree = [0] * n
    for _, e in ext.root_edges:
        root_degree[e] += 1
    adjacency = [0] * n
    for a, b in ext.ext_edges:
        adjacency[a] |= 1 << b
        adjacency[b] |= 1 << a

    size = 1 << n
    counts = [0] * size
    edges = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        counts[mask] = counts[rest] + 1
        edges[mask] = edges[rest] + root_degree[v] + bin(adjacency[v] & rest).count("1")
    vals = tuple(q * counts[m] - p * edges[m] for m in range(size))
    return _Profile(n=n, q=q, vals=vals)


def _mask_to_tuple(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _min_proper_submask(vals: Sequence[int], n: int) -> List[int]:
    """For each mask S, min of vals over proper submasks of S (inf for S = 0)."""
    size = 1 << n
    including = list(vals)
    for bit in range(n):
        step = 1 << bit
        for mask in range(size):
            if mask & step and including[mask ^ step] < including[mask]:
                including[mask] = including[mask ^ step]
    proper = [0] * size
    proper[0] = None
    for mask in range(1, size):
        best = None
        m = mask
        while m:
            low = m & -m
            candidate = including[mask ^ low]
            if best is None or candidate < best:
                best = candidate
            m ^= low
        proper[mask] = best
    return proper


def _min_superset(vals: Sequence[int], n: int) -> List[int]:
    """For each mask S, min of vals over supermasks of S (S included)."""
    size = 1 << n
    out = list(vals)
    for bit in range(n):
        step = 1 << bit
        for mask in range(size - 1, -1, -1):
            if not mask & step and out[mask | step] < out[mask]:
                out[mask] = out[mask | step]
    return out


def delta(ext: RootedExtension, alpha: Alpha) -> Predim:
    return ext.ext_size - alpha.value * ext.num_edges


def d_value(ext: RootedExtension, alpha: Alpha) -> Predim:
    """max delta(B/I) over A <= I < AB."""
    if ext.ext_size == 0:
        raise PreconditionError("d_value is undefined for the empty extension")
    prof = _profile(ext, alpha)
    full = prof.vals[prof.full]
    best = max(full - prof.vals[m] for m in range(prof.full))
    return prof.predim(best)


def min_subextension_delta(ext: RootedExtension, alpha: Alpha) -> Predim:
    """min delta(J/R) over R < J <= H."""
    if ext.ext_size == 0:
        raise PreconditionError("the empty extension has no nonempty subextension")
    prof = _profile(ext, alpha)
    return prof.predim(min(prof.vals[1:]))


def classify(ext: RootedExtension, alpha: Alpha) -> ExtensionClass:
    if ext.ext_size == 0:
        return ExtensionClass(
            is_sparse=False, is_dense=False, is_safe=True, is_rigid=True, is_degenerate=False
        )
    prof = _profile(ext, alpha)
    vals = prof.vals
    full = vals[prof.full]
    completions = [full - vals[m] for m in range(prof.full)]
    degenerate = any(v == 0 for v in vals[1:]) or any(c == 0 for c in completions)
    return ExtensionClass(
        is_sparse=full > 0,
        is_dense=full < 0,
        is_safe=all(v >= 0 for v in vals),
        is_rigid=max(completions) < 0,
        is_degenerate=degenerate,
    )


def find_rigid_subset(ext: RootedExtension, alpha: Alpha) -> Tuple[int, ...]:
    """
    Smallest S (then lexicographically first) with S/R rigid.
    Requires the extension to be neither safe nor degenerate.
    """
    cls = classify(ext, alpha)
    if cls.is_degenerate:
        raise DegeneracyError("extension is degenerate; rigid witness search needs strict signs")
    if cls.is_safe:
        raise PreconditionError("extension is safe; it has no rigid subextension")
    prof = _profile(ext, alpha)
    below = _min_proper_submask(prof.vals, prof.n)
    candidates = [m for m in range(1, prof.full + 1) if prof.vals[m] < below[m]]
    best = min(candidates, key=lambda m: (bin(m).count("1"), _mask_to_tuple(m)))
    return _mask_to_tuple(best)


def find_rigid_subextension(ext: RootedExtension, alpha: Alpha) -> RootedExtension:
    return ext.sub(find_rigid_subset(ext, alpha))


def decomposition_subset(ext: RootedExtension, alpha: Alpha) -> Tuple[int, ...]:
    """S with S/R rigid and H/S safe, scanning S by decreasing delta(H/S)."""
    cls = classify(ext, alpha)
    if cls.is_degenerate:
        raise DegeneracyError("extension is degenerate; decomposition needs strict signs")
    if cls.is_safe or cls.is_rigid:
        kind = "safe" if cls.is_safe else "rigid"
        raise PreconditionError(f"extension is {kind}; a rigid/safe decomposition needs neither")
    prof = _profile(ext, alpha)
    below = _min_proper_submask(prof.vals, prof.n)
    above = _min_superset(prof.vals, prof.n)
    order = sorted(
        range(1, prof.full),
        key=lambda m: (prof.vals[m], bin(m).count("1"), _mask_to_tuple(m)),
    )
    for mask in order:
        if prof.vals[mask] < below[mask] and prof.vals[mask] <= above[mask]:
            return _mask_to_tuple(mask)
    raise PreconditionError("no rigid/safe decomposition found")


def rigid_safe_decomposition(
    ext: RootedExtension, alpha: Alpha
) -> Tuple[RootedExtension, RootedExtension]:
    subset = decomposition_subset(ext, alpha)
    rigid_part, safe_part = ext.sub(subset), ext.over(subset)
    if not classify(rigid_part, alpha).is_rigid or not classify(safe_part, alpha).is_safe:
        raise PreconditionError(f"decomposition at {subset} failed re-verification")
    return rigid_part, safe_part


def rooted_automorphism_count(ext: RootedExtension) -> int:
    if ext.ext_size == 0:
        return 1
    graph = nx.Graph()
    for v in range(ext.ext_size):
        graph.add_node(v, roots=ext.root_neighbors(v))
    graph.add_edges_from(ext.ext_edges)
    matcher = isomorphism.GraphMatcher(
        graph, graph, node_match=lambda a, b: a["roots"] == b["roots"]
    )
    return sum(1 for _ in matcher.isomorphisms_iter())


def extend_root(
    ext: RootedExtension, x_size: int, x_edges: Sequence[Tuple[int, int]]
) -> RootedExtension:
    """
    HX/RX for X disjoint from H: x_edges are (x index, ext index) pairs.
    Edges between X and R, or inside X, fall inside the new root and vanish.
    """
    return RootedExtension(
        root_size=ext.root_size + x_size,
        ext_size=ext.ext_size,
        root_edges=list(ext.root_edges) + [(ext.root_size + x, e) for x, e in x_edges],
        ext_edges=ext.ext_edges,
    )


def describe(ext: RootedExtension, alpha: Alpha) -> CalculusReport:
    """Everything the calculus knows about one extension, witnesses included when defined."""
    cls = classify(ext, alpha)
    rigid_subset = decomposition = None
    if not cls.is_degenerate and not cls.is_safe:
        rigid_subset = list(find_rigid_subset(ext, alpha))
        if not cls.is_rigid:
            decomposition = list(decomposition_subset(ext, alpha))
    return CalculusReport(
        delta=delta(ext, alpha),
        d_value=d_value(ext, alpha) if ext.ext_size else None,
        classification=cls,
        rigid_subset=rigid_subset,
        decomposition_subset=decomposition,
        automorphisms=rooted_automorphism_count(ext),
    )
