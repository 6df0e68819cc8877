import enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from sparse_evolve.schemas.extension import RootedExtension
from sparse_evolve.schemas.graph import GraphFile


class Attachment(str, enum.Enum):
    TIGHT = "tight"
    LOOSE = "loose"
    NOT_MINIMALLY_RIGID = "not-minimally-rigid"


class RootAssignment(BaseModel):
    model_config = ConfigDict(frozen=True)

    targets: Tuple[int, ...] = ()

    @field_validator("targets")
    @classmethod
    def distinct_ids(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(x < 1 for x in v):
            raise ValueError("root targets are 1-based vertex ids")
        if len(set(v)) != len(v):
            raise ValueError("root targets must be distinct")
        return v


class EmbeddingCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    embeddings: int
    automorphisms: int

    @property
    def copies(self) -> Fraction:
        return Fraction(self.embeddings, self.automorphisms)

    def to_record(self) -> Dict[str, int]:
        copies = self.copies
        return {
            "embeddings": self.embeddings,
            "copies_num": copies.numerator,
            "copies_den": copies.denominator,
        }


class GenericityVerdict(BaseModel):
    is_generic: bool
    witness: Optional[List[int]] = None


class CensusQuery(BaseModel):
    graph: GraphFile
    extension: RootedExtension
    roots: List[int] = []
    forbidden: List[int] = []


class EmbeddingRecord(BaseModel):
    embeddings: int
    copies_num: int
    copies_den: int
