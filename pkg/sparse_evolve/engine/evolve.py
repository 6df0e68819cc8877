"""
Growth process for sparse random graphs with power-law edge probabilities.

At tick tau a new vertex arrives and is joined to every earlier vertex
independently with probability p(tau) = tau^(-alpha). Randomness comes from
a numpy Generator over PCG64, seeded through SeedSequence. Vertex tau makes
one Binomial(tau - 1, p(tau)) draw and, when that is positive, one
without-replacement choice of the targets; the draws depend only on tau and
the stream state, so extending a run never perturbs its history.
"""
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from sparse_evolve.core.exceptions import DomainError, InvalidArgumentError
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.graph import GraphFile

logger = logging.getLogger(__name__)


def edge_probability(tau: int, alpha: Alpha) -> float:
    if tau < 2:
        raise DomainError(f"edge probability is only defined for tau >= 2, got {tau}")
    return math.exp(-float(alpha.value) * math.log(tau))


def expected_edge_count(alpha: Alpha, T: int) -> float:
    """sum_{tau=2}^{T} (tau - 1) * tau^(-alpha)"""
    return math.fsum((tau - 1) * edge_probability(tau, alpha) for tau in range(2, T + 1))


def trial_seed(master_seed: int, trial: int) -> int:
    state = np.random.SeedSequence([master_seed, trial]).generate_state(1, dtype=np.uint64)
    return int(state[0])


class EvolvingGraph:
    """
    Graph whose vertices are the arrival times 1..T.

    Adjacency lists are sorted. Instances handed out by this module are
    treated as immutable.
    """

    def __init__(
        self,
        adjacency: List[List[int]],
        alpha: Alpha,
        seed: int = 0,
        rng_state: Optional[Dict[str, Any]] = None,
        edge_table: Optional[Tuple[float, ...]] = None,
    ):
        # adjacency[0] is a placeholder so that ids index directly
        self._adj = adjacency
        self.alpha = alpha
        self.seed = seed
        self.rng_state = rng_state
        self.edge_table = edge_table
        self._sets: List[Optional[frozenset]] = [None] * len(adjacency)

    @property
    def num_vertices(self) -> int:
        return len(self._adj) - 1

    @property
    def vertices(self) -> range:
        return range(1, len(self._adj))

    def neighbors(self, v: int) -> List[int]:
        return self._adj[v]

    def neighbor_set(self, v: int) -> frozenset:
        cached = self._sets[v]
        if cached is None:
            cached = frozenset(self._adj[v])
            self._sets[v] = cached
        return cached

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_set(u)

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self._adj) // 2

    def edges(self) -> Iterator[Tuple[int, int]]:
        for i in self.vertices:
            for j in self._adj[i]:
                if j > i:
                    yield (i, j)

    def prefix(self, T: int) -> "EvolvingGraph":
        """
        G(T) as it stood when vertex T arrived. A proper prefix keeps the
        edge table but not the stream state, so `step` treats it like a
        loaded graph.
        """
        if not 1 <= T <= self.num_vertices:
            raise DomainError(f"prefix size {T} outside 1..{self.num_vertices}")
        if T == self.num_vertices:
            return self
        adjacency = [[]] + [self._adj[v][: bisect_right(self._adj[v], T)] for v in range(1, T + 1)]
        return EvolvingGraph(adjacency, self.alpha, self.seed, edge_table=self.edge_table)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges())
        return graph

    def to_file(self) -> GraphFile:
        return GraphFile(alpha=self.alpha, seed=self.seed, T=self.num_vertices, edges=list(self.edges()))

    @classmethod
    def from_edges(
        cls, T: int, edges: Sequence[Tuple[int, int]], alpha: Alpha, seed: int = 0
    ) -> "EvolvingGraph":
        if T < 1:
            raise InvalidArgumentError("a graph needs at least one vertex")
        adjacency: List[List[int]] = [[] for _ in range(T + 1)]
        for i, j in edges:
            if i == j or not (1 <= i <= T and 1 <= j <= T):
                raise InvalidArgumentError(f"invalid edge {[i, j]} for T={T}")
            adjacency[i].append(j)
            adjacency[j].append(i)
        for nbrs in adjacency:
            nbrs.sort()
        return cls(adjacency, alpha, seed)

    @classmethod
    def from_file(cls, payload: GraphFile) -> "EvolvingGraph":
        return cls.from_edges(payload.T, payload.edges, payload.alpha, payload.seed)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvolvingGraph):
            return NotImplemented
        return self._adj == other._adj and self.alpha == other.alpha

    def __repr__(self) -> str:
        return f"EvolvingGraph(T={self.num_vertices}, edges={self.num_edges}, alpha={self.alpha})"


class ProcessConfig(BaseModel):
    """
    alpha and seed drive the power-law schedule. `edge_table`, when given,
    replaces it: edge_table[i] is p(i + 2) and the last entry extends to
    every later tick. `initial_graph` replaces the single starting vertex.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    alpha: Alpha
    seed: int = Field(0, ge=0, lt=2**64)
    initial_graph: Optional[EvolvingGraph] = None
    edge_table: Optional[Tuple[float, ...]] = None

    @field_validator("edge_table")
    @classmethod
    def monotone(cls, v: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if v is None:
            return v
        if not v:
            raise ValueError("edge_table must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in v):
            raise ValueError("edge_table entries must be probabilities")
        if any(b > a for a, b in zip(v, v[1:])):
            raise ValueError("edge_table must be weakly decreasing")
        return v

    @property
    def schedule(self) -> "EdgeSchedule":
        return EdgeSchedule(alpha=self.alpha, table=self.edge_table)


@dataclass(frozen=True)
class EdgeSchedule:
    alpha: Alpha
    table: Optional[Tuple[float, ...]] = None

    def __call__(self, tau: int) -> float:
        if self.table is None:
            return edge_probability(tau, self.alpha)
        if tau < 2:
            raise DomainError(f"edge probability is only defined for tau >= 2, got {tau}")
        return self.table[min(tau - 2, len(self.table) - 1)]


class EvolvingProcess:
    """Owns one graph under construction and its random stream."""

    def __init__(self, config: ProcessConfig, rng_state: Optional[Dict[str, Any]] = None):
        self.config = config
        self.schedule = config.schedule
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
        if rng_state is not None:
            self._rng.bit_generator.state = rng_state
        if config.initial_graph is not None:
            self._adj = [list(n) for n in config.initial_graph._adj]
        else:
            self._adj = [[], []]

    @property
    def num_vertices(self) -> int:
        return len(self._adj) - 1

    def step(self) -> None:
        tau = self.num_vertices + 1
        p = self.schedule(tau)
        k = int(self._rng.binomial(tau - 1, p))
        if k:
            picks = self._rng.choice(tau - 1, size=k, replace=False)
            targets = sorted(int(j) + 1 for j in picks)
        else:
            targets = []
        for j in targets:
            self._adj[j].append(tau)
        self._adj.append(targets)

    def advance(self, T: int) -> None:
        while self.num_vertices < T:
            self.step()

    def graph(self, copy: bool = True) -> EvolvingGraph:
        adjacency = [list(n) for n in self._adj] if copy else self._adj
        return EvolvingGraph(
            adjacency,
            self.config.alpha,
            self.config.seed,
            rng_state=self._rng.bit_generator.state,
            edge_table=self.config.edge_table,
        )


def run_to(config: ProcessConfig, T: int) -> EvolvingGraph:
    start = config.initial_graph.num_vertices if config.initial_graph is not None else 1
    if T < start:
        raise DomainError(f"T={T} is below the initial graph size {start}")
    process = EvolvingProcess(config)
    process.advance(T)
    logger.debug(f"grew G({T}) with {sum(len(n) for n in process._adj) // 2} edges")
    return process.graph(copy=False)


def step(g: EvolvingGraph) -> EvolvingGraph:
    """
    G(T+1) from G(T). Graphs produced by this module carry their stream
    state and edge table; a loaded graph or a proper prefix starts a stream
    keyed by (seed, T).
    """
    config = ProcessConfig(alpha=g.alpha, seed=g.seed, initial_graph=g, edge_table=g.edge_table)
    state = g.rng_state
    if state is None:
        state = np.random.PCG64(np.random.SeedSequence([g.seed, g.num_vertices])).state
    process = EvolvingProcess(config, rng_state=state)
    process.step()
    return process.graph(copy=False)
