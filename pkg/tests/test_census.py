from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from conftest import build_graph, extensions, naive_embeddings, random_graph
from sparse_evolve.core.config import settings
from sparse_evolve.core.exceptions import DegeneracyError, InvalidArgumentError, PreconditionError
from sparse_evolve.engine.calculus import classify, rooted_automorphism_count
from sparse_evolve.engine.census import (
    classify_attachment,
    compose,
    concentration_margin,
    count_embeddings,
    irregular_vertices,
    is_t_generic,
    iter_embeddings,
    rigid_extensions,
    weak_closure,
)
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.census import Attachment, RootAssignment
from sparse_evolve.schemas.extension import RootedExtension

K4_EDGES = [(a, b) for a, b in combinations(range(1, 5), 2)]
ALPHA_GENERIC = Alpha.parse("181/256")

# small corpus: extensions with at most 3 new vertices and at most 3 root vertices
CORPUS_EXTENSIONS = (
    list(extensions(0, 1)) + list(extensions(1, 1)) + list(extensions(2, 1)) + list(extensions(3, 1))
    + list(extensions(0, 2)) + list(extensions(1, 2)) + list(extensions(2, 2))
    + list(extensions(0, 3)) + list(extensions(1, 3)) + list(extensions(2, 3)) + list(extensions(3, 3))
    + list(extensions(3, 2))
)


def corpus_graphs():
    rng = np.random.default_rng(17)
    graphs = [build_graph(5, K4_EDGES + [(4, 5)]), build_graph(3, [(1, 2), (1, 3), (2, 3)])]
    for T, density in [(5, 0.5), (6, 0.3), (7, 0.6), (8, 0.4), (9, 0.5), (9, 0.25), (9, 0.7)]:
        graphs.append(random_graph(rng, T, density))
    return graphs


def edge_list(g):
    return list(g.edges())


class TestCountExamples:
    def test_pendant_counts_degree(self, pendant_edge):
        g = build_graph(6, [(1, 2), (1, 3), (1, 4), (2, 5)])
        assert count_embeddings(g, pendant_edge, [1]).embeddings == 3
        assert count_embeddings(g, pendant_edge, [1], forbidden={2}).embeddings == 2

    def test_edge_in_triangle(self, p2):
        g = build_graph(3, [(1, 2), (1, 3), (2, 3)])
        assert count_embeddings(g, p2, []).embeddings == 6

    def test_triangle_in_k4(self):
        g = build_graph(4, K4_EDGES)
        result = count_embeddings(g, RootedExtension.clique(3), RootAssignment())
        assert result.embeddings == 24
        assert result.copies == 4

    def test_induced_condition(self, p2):
        # the two non-adjacent vertex pairs of a path are not edges
        empty_pair = RootedExtension(root_size=0, ext_size=2)
        g = build_graph(3, [(1, 2), (2, 3)])
        assert count_embeddings(g, empty_pair, []).embeddings == 2
        assert count_embeddings(g, p2, []).embeddings == 4

    def test_root_assignment_arity(self, pendant_edge):
        g = build_graph(3, [(1, 2)])
        with pytest.raises(InvalidArgumentError):
            count_embeddings(g, pendant_edge, [1, 2])
        with pytest.raises(InvalidArgumentError):
            count_embeddings(g, pendant_edge, [4])

    def test_forbidden_must_avoid_roots(self, pendant_edge):
        g = build_graph(3, [(1, 2)])
        with pytest.raises(InvalidArgumentError):
            count_embeddings(g, pendant_edge, [1], forbidden={1})

    def test_cap(self):
        g = build_graph(4, K4_EDGES)
        assert len(list(iter_embeddings(g, RootedExtension.clique(3), [], cap=5))) == 5


def test_counts_match_naive_enumeration():
    rng = np.random.default_rng(3)
    for g in corpus_graphs():
        for ext in CORPUS_EXTENSIONS:
            if ext.root_size + ext.ext_size > g.num_vertices:
                continue
            roots = [int(v) for v in rng.choice(g.num_vertices, ext.root_size, replace=False) + 1]
            result = count_embeddings(g, ext, roots)
            assert result.embeddings == naive_embeddings(g, ext, roots), (edge_list(g), ext, roots)
            assert result.copies.denominator == 1
            spare = [v for v in g.vertices if v not in roots]
            forbidden = [v for v in spare if rng.random() < 0.3]
            assert count_embeddings(g, ext, roots, forbidden).embeddings == naive_embeddings(
                g, ext, roots, forbidden
            )


def test_unrooted_counts_match_networkx():
    rng = np.random.default_rng(8)
    graphs = [random_graph(rng, 9, 0.5), random_graph(rng, 10, 0.35)]
    for ext in extensions(0, 4):
        pattern = nx.Graph()
        pattern.add_nodes_from(range(4))
        pattern.add_edges_from(ext.ext_edges)
        for g in graphs:
            matcher = nx.algorithms.isomorphism.GraphMatcher(g.to_networkx(), pattern)
            expected = sum(1 for _ in matcher.subgraph_isomorphisms_iter())
            assert count_embeddings(g, ext, []).embeddings == expected


class TestIrregularVertices:
    def test_k4_plus_isolated(self, alpha):
        g = build_graph(8, K4_EDGES)
        assert irregular_vertices(g, 4, alpha) == frozenset({1, 2, 3, 4})
        assert irregular_vertices(g, 3, alpha) == frozenset()

    def test_single_vertex_never_rigid(self, alpha):
        g = build_graph(8, K4_EDGES)
        assert irregular_vertices(g, 1, alpha) == frozenset()

    def test_soft_limit(self, alpha):
        g = build_graph(8, K4_EDGES)
        with pytest.raises(PreconditionError):
            irregular_vertices(g, settings.CENSUS_SOFT_LIMIT + 1, alpha)
        assert irregular_vertices(g, settings.CENSUS_SOFT_LIMIT + 1, alpha, allow_large=True) == {1, 2, 3, 4}

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        for _ in range(6):
            g = random_graph(rng, 9, 0.55, alpha="181/256")
            edges = edge_list(g)
            for r in (2, 3, 4):
                expected = set()
                for k in range(1, r + 1):
                    for S in combinations(g.vertices, k):
                        if classify(RootedExtension.from_graph(edges, [], S), ALPHA_GENERIC).is_rigid:
                            expected |= set(S)
                assert irregular_vertices(g, r, ALPHA_GENERIC) == expected


class TestWeakClosure:
    def test_k4_with_pendant(self, alpha):
        # pendant 5 hangs off clique vertex 4
        g = build_graph(5, K4_EDGES + [(4, 5)])
        assert weak_closure(g, {4}, 3, alpha) == frozenset({1, 2, 3, 4})
        assert weak_closure(g, {4}, 1, alpha) == frozenset({4})

    def test_no_rigid_extension(self, alpha):
        g = build_graph(4, [(1, 2), (2, 3)])
        assert weak_closure(g, {1, 4}, 3, alpha) == frozenset({1, 4})

    def test_rejects_unknown_vertices(self, alpha):
        g = build_graph(4, [(1, 2)])
        with pytest.raises(InvalidArgumentError):
            weak_closure(g, {9}, 2, alpha)

    def test_matches_brute_force_and_is_monotone(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            g = random_graph(rng, 9, 0.5, alpha="181/256")
            edges = edge_list(g)
            X = {int(v) for v in rng.choice(9, 2, replace=False) + 1}
            previous = frozenset(X)
            for t in (1, 2, 3):
                expected = set(X)
                rest = [v for v in g.vertices if v not in X]
                for k in range(1, t + 1):
                    for Z in combinations(rest, k):
                        if classify(RootedExtension.from_graph(edges, sorted(X), Z), ALPHA_GENERIC).is_rigid:
                            expected |= set(Z)
                closure = weak_closure(g, X, t, ALPHA_GENERIC)
                assert closure == expected
                assert previous <= closure
                previous = closure

    def test_contains_irregular_witnesses_over_x(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 9, 0.6, alpha="181/256")
        scan = rigid_extensions(g, (), 4, ALPHA_GENERIC)
        for z in scan.strict:
            x = {min(z)}
            if len(z) > 1:
                assert set(z) <= weak_closure(g, x, 3, ALPHA_GENERIC)


class TestGenericity:
    def _graph(self, attach_to):
        # v=1, w=2 with edge vw; K4 on 3..6 with one edge to attach_to
        edges = [(1, 2)] + [(a + 2, b + 2) for a, b in K4_EDGES] + [(attach_to, 3)]
        return build_graph(6, edges)

    def test_only_a_and_b(self, alpha):
        g = build_graph(2, [(1, 2)])
        assert is_t_generic(g, {1}, {1, 2}, 4, alpha).is_generic

    def test_violation_through_w(self, alpha):
        verdict = is_t_generic(self._graph(2), {1}, {1, 2}, 4, alpha)
        assert not verdict.is_generic
        assert verdict.witness == [3, 4, 5, 6]

    def test_attachment_to_a_is_harmless(self, alpha):
        assert is_t_generic(self._graph(1), {1}, {1, 2}, 4, alpha).is_generic

    def test_zero_completion_is_degenerate(self, alpha):
        # at t = 3 the triangle 3,4,5 over B has predimension exactly 0
        with pytest.raises(DegeneracyError):
            is_t_generic(self._graph(2), {1}, {1, 2}, 3, alpha)

    def test_a_must_be_inside_b(self, alpha):
        with pytest.raises(PreconditionError):
            is_t_generic(self._graph(2), {1, 3}, {1, 2}, 2, alpha)

    def test_matches_brute_force_and_is_monotone(self):
        rng = np.random.default_rng(13)
        for _ in range(6):
            g = random_graph(rng, 9, 0.5, alpha="181/256")
            edges = edge_list(g)
            B = [int(v) for v in rng.choice(9, 3, replace=False) + 1]
            A = B[:1]
            previous = True
            for t in (1, 2, 3):
                violators = []
                rest = [v for v in g.vertices if v not in B]
                for k in range(1, t + 1):
                    for C in combinations(rest, k):
                        ext = RootedExtension.from_graph(edges, sorted(B), C)
                        if not classify(ext, ALPHA_GENERIC).is_rigid:
                            continue
                        over_ab = RootedExtension.from_graph(edges, sorted(B), C).num_edges
                        over_a = RootedExtension.from_graph(edges, A, C).num_edges
                        if over_ab != over_a:
                            violators.append(sorted(C))
                verdict = is_t_generic(g, A, B, t, ALPHA_GENERIC)
                assert verdict.is_generic == (not violators)
                if violators:
                    assert verdict.witness == min(violators, key=lambda c: (len(c), c))
                # a larger t admits more potential violations
                assert previous or not verdict.is_generic
                previous = verdict.is_generic


class TestAttachment:
    def test_loose(self, alpha):
        H = RootedExtension(root_size=1, ext_size=1)
        K = RootedExtension(root_size=2, ext_size=1, root_edges=[(0, 0), (1, 0)])
        assert classify_attachment(K, H, alpha) == Attachment.LOOSE

    def test_tight(self, alpha):
        H = RootedExtension(root_size=1, ext_size=1, root_edges=[(0, 0)])
        K = RootedExtension(root_size=2, ext_size=1, root_edges=[(0, 0), (1, 0)])
        assert classify_attachment(K, H, alpha) == Attachment.TIGHT

    def test_not_minimal(self, alpha):
        H = RootedExtension(root_size=1, ext_size=1)
        K = RootedExtension(root_size=2, ext_size=2, root_edges=[(0, 0), (1, 0), (0, 1), (1, 1)])
        assert classify(K, alpha).is_rigid
        assert classify_attachment(K, H, alpha) == Attachment.NOT_MINIMALLY_RIGID

    def test_not_rigid(self, alpha):
        H = RootedExtension(root_size=1, ext_size=1)
        K = RootedExtension(root_size=2, ext_size=1, root_edges=[(1, 0)])
        assert classify_attachment(K, H, alpha) == Attachment.NOT_MINIMALLY_RIGID

    def test_compose(self):
        H = RootedExtension(root_size=1, ext_size=1, root_edges=[(0, 0)])
        K = RootedExtension(root_size=2, ext_size=1, root_edges=[(0, 0), (1, 0)])
        assert compose(K, H) == RootedExtension(
            root_size=1, ext_size=2, root_edges=[(0, 0), (0, 1)], ext_edges=[(0, 1)]
        )

    def test_compose_checks_roots(self, alpha):
        H = RootedExtension(root_size=1, ext_size=1)
        with pytest.raises(PreconditionError):
            classify_attachment(RootedExtension(root_size=1, ext_size=1), H, alpha)


class TestConcentrationMargin:
    def test_examples(self, alpha, pendant_edge, k4):
        assert concentration_margin(pendant_edge, alpha) == Fraction(1, 8)
        assert concentration_margin(RootedExtension(root_size=3, ext_size=2), alpha) == Fraction(1, 2)
        with pytest.raises(PreconditionError):
            concentration_margin(k4, alpha)


def test_copies_are_whole_without_forbidden_set(alpha):
    g = build_graph(7, K4_EDGES + [(4, 5), (5, 6), (6, 7), (5, 7)])
    for ext in extensions(0, 3):
        result = count_embeddings(g, ext, [])
        assert result.embeddings % rooted_automorphism_count(ext) == 0
