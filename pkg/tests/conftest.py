import os
import tempfile
from itertools import combinations, permutations, product
from pathlib import Path

# the app engine is built at import time; keep it off the working directory
os.environ.setdefault(
    "DATABASE_URL",
    f"sqlite+aiosqlite:///{Path(tempfile.mkdtemp(prefix='sparse-evolve-')) / 'test.db'}",
)
os.environ.setdefault("RECORD_RUNS", "false")

import numpy as np
import pytest

from sparse_evolve.engine.evolve import EvolvingGraph
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.extension import RootedExtension


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run acceptance-scale experiments")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def build_graph(T, edges, alpha="3/4"):
    return EvolvingGraph.from_edges(T, edges, Alpha.parse(alpha))


def extensions(root_size, ext_size):
    """Every extension with the given sizes, one per edge subset."""
    pairs = [("r", r, e) for r in range(root_size) for e in range(ext_size)]
    pairs += [("e", a, b) for a, b in combinations(range(ext_size), 2)]
    for bits in product((False, True), repeat=len(pairs)):
        chosen = [p for p, keep in zip(pairs, bits) if keep]
        yield RootedExtension(
            root_size=root_size,
            ext_size=ext_size,
            root_edges=[(a, b) for kind, a, b in chosen if kind == "r"],
            ext_edges=[(a, b) for kind, a, b in chosen if kind == "e"],
        )


def extensions_up_to(total, min_ext=1, max_ext=None):
    out = []
    for n in range(min_ext, total + 1):
        if max_ext is not None and n > max_ext:
            break
        for r in range(0, total - n + 1):
            out.extend(extensions(r, n))
    return out


def naive_embeddings(g, ext, roots, forbidden=()):
    """Full enumeration over injective tuples of the allowed vertices."""
    blocked = set(roots) | set(forbidden)
    pool = [v for v in g.vertices if v not in blocked]
    total = 0
    for image in permutations(pool, ext.ext_size):
        ok = True
        for r in range(ext.root_size):
            for e in range(ext.ext_size):
                if ((r, e) in ext.root_edges) != g.has_edge(roots[r], image[e]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for a, b in combinations(range(ext.ext_size), 2):
                if ((a, b) in ext.ext_edges) != g.has_edge(image[a], image[b]):
                    ok = False
                    break
        total += ok
    return total


def random_graph(rng, T, density, alpha="3/4"):
    edges = [(i, j) for i, j in combinations(range(1, T + 1), 2) if rng.random() < density]
    return build_graph(T, edges, alpha)


def random_alphas(count, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        q = int(rng.integers(5, 200))
        p = int(rng.integers(1, q))
        alpha = Alpha(numerator=p, denominator=q)
        if alpha not in out:
            out.append(alpha)
    return out


@pytest.fixture
def alpha():
    return Alpha.parse("3/4")


@pytest.fixture
def k4():
    return RootedExtension.clique(4)


@pytest.fixture
def pendant_edge():
    """One extension vertex joined to a single root vertex."""
    return RootedExtension(root_size=1, ext_size=1, root_edges=[(0, 0)])


@pytest.fixture
def p2():
    return RootedExtension(root_size=0, ext_size=2, ext_edges=[(0, 1)])
