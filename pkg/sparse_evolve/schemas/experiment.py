import enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from sparse_evolve.core.config import settings
from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.expectation import Rational
from sparse_evolve.schemas.extension import RootedExtension


class ExperimentKind(str, enum.Enum):
    SLOPE = "slope"
    SATURATION = "saturation"
    GENERICITY = "genericity"
    CLIQUE = "clique"
    IRREGULAR = "irregular"


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"


DEFAULT_PASS_FRACTION = {
    ExperimentKind.SATURATION: 0.9,
    ExperimentKind.GENERICITY: 0.95,
    ExperimentKind.IRREGULAR: 0.9,
}


class ExperimentSpec(BaseModel):
    kind: ExperimentKind
    alpha: Alpha
    extension: Optional[RootedExtension] = None
    trials: int = Field(..., ge=1)
    checkpoints: List[int] = []
    master_seed: int = Field(0, ge=0, lt=2**64)
    t: Optional[int] = None
    r: Optional[int] = None
    tau0: int = Field(1, ge=0)

    # Verdict knobs
    tolerance: float = Field(0.1, gt=0)
    pass_fraction: Optional[float] = Field(None, ge=0, le=1)
    sigmas: float = Field(3.0, gt=0)

    candidate_cap: int = Field(default_factory=lambda: settings.GENERICITY_CANDIDATE_CAP, ge=1)
    clique_size: int = Field(4, ge=2)
    allow_large: bool = False

    @field_validator("checkpoints")
    @classmethod
    def increasing(cls, v: List[int]) -> List[int]:
        if any(T < 1 for T in v):
            raise ValueError("checkpoints must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        return v

    @model_validator(mode="after")
    def kind_requirements(self) -> "ExperimentSpec":
        kind = self.kind
        if kind in (ExperimentKind.SLOPE, ExperimentKind.SATURATION, ExperimentKind.GENERICITY):
            if self.extension is None:
                raise ValueError(f"{kind.value} experiments need an extension")
        if kind == ExperimentKind.GENERICITY and self.t is None:
            raise ValueError("genericity experiments need t")
        if kind == ExperimentKind.IRREGULAR and self.r is None:
            raise ValueError("irregular experiments need r")
        if kind != ExperimentKind.CLIQUE:
            if not self.checkpoints:
                raise ValueError(f"{kind.value} experiments need checkpoints")
            if self.checkpoints[0] < self.tau0:
                raise ValueError("checkpoints must not precede tau0")
        if self.extension is not None and self.extension.root_size > self.tau0:
            raise ValueError("tau0 must leave room for the root vertices")
        return self

    @property
    def effective_pass_fraction(self) -> float:
        if self.pass_fraction is not None:
            return self.pass_fraction
        return DEFAULT_PASS_FRACTION.get(self.kind, 1.0)

    @property
    def horizon(self) -> int:
        if self.kind == ExperimentKind.CLIQUE:
            return self.clique_size
        return self.checkpoints[-1]


class CheckpointAggregate(BaseModel):
    T: int
    mean: float
    stderr: float
    mean_new: Optional[float] = None


class ExperimentReport(BaseModel):
    spec: ExperimentSpec
    build_tag: str
    master_seed: int
    aggregates: List[CheckpointAggregate]
    fitted_slope: Optional[float] = None
    fit_residual: Optional[float] = None
    expected_slope: Optional[Rational] = None
    summary: Dict[str, Any] = {}
    verdict: Verdict
