from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.expectation import Rational
from sparse_evolve.schemas.extension import RootedExtension


class ExtensionClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_sparse: bool
    is_dense: bool
    is_safe: bool
    is_rigid: bool
    is_degenerate: bool


class ExtensionQuery(BaseModel):
    extension: RootedExtension
    alpha: Alpha


class CalculusReport(BaseModel):
    delta: Rational
    d_value: Optional[Rational] = None
    classification: ExtensionClass
    rigid_subset: Optional[List[int]] = None
    decomposition_subset: Optional[List[int]] = None
    automorphisms: int
