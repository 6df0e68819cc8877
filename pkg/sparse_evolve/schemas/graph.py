from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from sparse_evolve.schemas.alpha import Alpha


class GraphFile(BaseModel):
    """Canonical graph interchange: 1-based arrival-time ids, pairs (i, j) with i < j, sorted."""
    alpha: Alpha
    seed: int = Field(0, ge=0, lt=2**64)
    T: int = Field(..., ge=1)
    edges: List[Tuple[int, int]] = []

    @field_validator("edges")
    @classmethod
    def normalize(cls, v: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        return sorted((min(i, j), max(i, j)) for i, j in v)

    @model_validator(mode="after")
    def check_edges(self) -> "GraphFile":
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (1 <= i and j <= self.T):
                raise ValueError(f"edge {[i, j]} out of range 1..{self.T}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge {[i, j]}")
            seen.add((i, j))
        return self
