import uuid
from datetime import datetime, timezone
from sqlalchemy import Column, String, DateTime, JSON
from sparse_evolve.core.database import Base


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    kind = Column(String, nullable=False, index=True)
    alpha = Column(String, nullable=False)
    # stored as text: SQLite integers are signed 64-bit
    master_seed = Column(String, nullable=False)
    build_tag = Column(String, nullable=False)
    verdict = Column(String, nullable=False)
    spec = Column(JSON, nullable=False)
    summary = Column(JSON, nullable=True)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))
