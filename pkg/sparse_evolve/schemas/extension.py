from itertools import combinations
from typing import Iterable, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

Edge = Tuple[int, int]


class RootedExtension(BaseModel):
    """
    Abstract graph extension H/R.

    Root vertices are indexed 0..root_size-1 and extension vertices
    0..ext_size-1. `root_edges` holds (root index, ext index) pairs and
    `ext_edges` unordered (ext, ext) pairs stored as (low, high). Edges
    strictly inside the root are never represented.
    """
    model_config = ConfigDict(frozen=True)

    root_size: int = 0
    ext_size: int = 0
    root_edges: Tuple[Edge, ...] = ()
    ext_edges: Tuple[Edge, ...] = ()

    @field_validator("root_size", "ext_size")
    @classmethod
    def nonnegative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("sizes must be nonnegative")
        return v

    @field_validator("root_edges")
    @classmethod
    def sort_root_edges(cls, v: Tuple[Edge, ...]) -> Tuple[Edge, ...]:
        return tuple(sorted(v))

    @field_validator("ext_edges")
    @classmethod
    def sort_ext_edges(cls, v: Tuple[Edge, ...]) -> Tuple[Edge, ...]:
        return tuple(sorted((min(a, b), max(a, b)) for a, b in v))

    @model_validator(mode="after")
    def check_edges(self) -> "RootedExtension":
        if len(set(self.root_edges)) != len(self.root_edges):
            raise ValueError("duplicate root edge")
        if len(set(self.ext_edges)) != len(self.ext_edges):
            raise ValueError("duplicate extension edge")
        for r, e in self.root_edges:
            if not (0 <= r < self.root_size and 0 <= e < self.ext_size):
                raise ValueError(f"root edge {[r, e]} out of range")
        for a, b in self.ext_edges:
            if a == b:
                raise ValueError(f"self-loop on extension vertex {a}")
            if not (0 <= a < self.ext_size and 0 <= b < self.ext_size):
                raise ValueError(f"extension edge {[a, b]} out of range")
        return self

    @property
    def num_edges(self) -> int:
        return len(self.root_edges) + len(self.ext_edges)

    def root_neighbors(self, v: int) -> frozenset:
        return frozenset(r for r, e in self.root_edges if e == v)

    def ext_neighbors(self, v: int) -> frozenset:
        out = set()
        for a, b in self.ext_edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return frozenset(out)

    def sub(self, vertices: Sequence[int]) -> "RootedExtension":
        """S/R for the extension vertices listed, renumbered in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        return RootedExtension(
            root_size=self.root_size,
            ext_size=len(index),
            root_edges=[(r, index[e]) for r, e in self.root_edges if e in index],
            ext_edges=[(index[a], index[b]) for a, b in self.ext_edges if a in index and b in index],
        )

    def over(self, vertices: Sequence[int]) -> "RootedExtension":
        """
        H/S where S is the root plus the listed extension vertices.
        The new root is R followed by the listed vertices in order.
        """
        lifted = {v: self.root_size + i for i, v in enumerate(vertices)}
        rest = [v for v in range(self.ext_size) if v not in lifted]
        index = {v: i for i, v in enumerate(rest)}
        root_edges = [(r, index[e]) for r, e in self.root_edges if e in index]
        ext_edges = []
        for a, b in self.ext_edges:
            if a in index and b in index:
                ext_edges.append((index[a], index[b]))
            elif a in index:
                root_edges.append((lifted[b], index[a]))
            elif b in index:
                root_edges.append((lifted[a], index[b]))
        return RootedExtension(
            root_size=self.root_size + len(lifted),
            ext_size=len(rest),
            root_edges=root_edges,
            ext_edges=ext_edges,
        )

    @classmethod
    def from_graph(
        cls,
        edges: Iterable[Edge],
        root: Sequence[int],
        ext: Sequence[int],
    ) -> "RootedExtension":
        """Induced extension ext/root of a concrete graph given by its edge list."""
        root_index = {v: i for i, v in enumerate(root)}
        ext_index = {v: i for i, v in enumerate(ext)}
        if root_index.keys() & ext_index.keys():
            raise ValueError("root and extension vertex sets must be disjoint")
        root_edges, ext_edges = set(), set()
        for u, v in edges:
            if u in ext_index and v in ext_index:
                ext_edges.add(tuple(sorted((ext_index[u], ext_index[v]))))
            elif u in ext_index and v in root_index:
                root_edges.add((root_index[v], ext_index[u]))
            elif v in ext_index and u in root_index:
                root_edges.add((root_index[u], ext_index[v]))
        return cls(
            root_size=len(root_index),
            ext_size=len(ext_index),
            root_edges=sorted(root_edges),
            ext_edges=sorted(ext_edges),
        )

    @classmethod
    def clique(cls, k: int) -> "RootedExtension":
        return cls(root_size=0, ext_size=k, ext_edges=list(combinations(range(k), 2)))
