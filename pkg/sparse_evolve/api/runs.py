from typing import Any, List, Optional
from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.ext.asyncio import AsyncSession
from sparse_evolve.api import deps
from sparse_evolve.crud.experiment_run import experiment_run as crud_experiment_run
from sparse_evolve.schemas.experiment_run import ExperimentRun
from sparse_evolve.utils.response import APIResponse, create_response

router = APIRouter()

@router.get("/", response_model=APIResponse[List[ExperimentRun]])
async def read_runs(
    db: AsyncSession = Depends(deps.get_db),
    kind: Optional[str] = None,
    skip: int = 0,
    limit: int = 100,
) -> Any:
    """
    List recorded experiment runs.

    - **kind**: only runs of one experiment kind, newest first
    - **Pagination**: Use skip/limit for pagination
    """
    if kind:
        runs = await crud_experiment_run.get_by_kind(db, kind=kind, skip=skip, limit=limit)
    else:
        runs = await crud_experiment_run.get_multi(db, skip=skip, limit=limit)
    return create_response([ExperimentRun.model_validate(r) for r in runs])

@router.get("/{run_id}", response_model=APIResponse[ExperimentRun])
async def read_run(
    run_id: str,
    db: AsyncSession = Depends(deps.get_db),
) -> Any:
    run = await crud_experiment_run.get(db, id=run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Experiment run not found")
    return create_response(ExperimentRun.model_validate(run))
