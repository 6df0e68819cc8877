from typing import List
from sqlalchemy import select
from sqlalchemy.ext.asyncio import AsyncSession
from sparse_evolve.crud.base import CRUDBase
from sparse_evolve.models.experiment_run import ExperimentRun
from sparse_evolve.schemas.experiment import ExperimentReport
from sparse_evolve.schemas.experiment_run import ExperimentRunCreate


class CRUDExperimentRun(CRUDBase[ExperimentRun, ExperimentRunCreate]):
    async def get_by_kind(
        self, db: AsyncSession, *, kind: str, skip: int = 0, limit: int = 100
    ) -> List[ExperimentRun]:
        query = (
            select(ExperimentRun)
            .filter(ExperimentRun.kind == kind)
            .order_by(ExperimentRun.created_at.desc())
            .offset(skip)
            .limit(limit)
        )
        result = await db.execute(query)
        return result.scalars().all()

    async def record_report(self, db: AsyncSession, *, report: ExperimentReport) -> ExperimentRun:
        return await self.create(db, obj_in=ExperimentRunCreate.from_report(report))


experiment_run = CRUDExperimentRun(ExperimentRun)
