from typing import Any, Dict, Optional
from datetime import datetime
from pydantic import BaseModel, ConfigDict

from sparse_evolve.schemas.experiment import ExperimentReport


class ExperimentRunBase(BaseModel):
    kind: str
    alpha: str
    master_seed: str
    build_tag: str
    verdict: str
    spec: Dict[str, Any]
    summary: Optional[Dict[str, Any]] = None


class ExperimentRunCreate(ExperimentRunBase):
    @classmethod
    def from_report(cls, report: ExperimentReport) -> "ExperimentRunCreate":
        payload = report.model_dump(mode="json")
        return cls(
            kind=report.spec.kind.value,
            alpha=str(report.spec.alpha),
            master_seed=str(report.master_seed),
            build_tag=report.build_tag,
            verdict=report.verdict.value,
            spec=payload["spec"],
            summary={
                "aggregates": payload["aggregates"],
                "fitted_slope": payload["fitted_slope"],
                "fit_residual": payload["fit_residual"],
                "expected_slope": payload["expected_slope"],
                **payload["summary"],
            },
        )


class ExperimentRun(ExperimentRunBase):
    model_config = ConfigDict(from_attributes=True)

    id: str
    created_at: datetime
