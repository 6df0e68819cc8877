from sqlalchemy.ext.asyncio import create_async_engine, AsyncSession, async_sessionmaker
from sqlalchemy.orm import DeclarativeBase
from sparse_evolve.core.config import settings


def make_engine(url: str, **kwargs):
    return create_async_engine(
        url,
        echo=settings.DATABASE_ECHO,
        connect_args={"check_same_thread": False} if "sqlite" in url else {},
        **kwargs
    )


def make_sessionmaker(bind) -> async_sessionmaker:
    return async_sessionmaker(
        autocommit=False,
        autoflush=False,
        bind=bind,
        class_=AsyncSession,
        expire_on_commit=False
    )


engine = make_engine(settings.DATABASE_URL)
SessionLocal = make_sessionmaker(engine)

class Base(DeclarativeBase):
    pass

async def get_db():
    async with SessionLocal() as session:
        try:
            yield session
        finally:
            await session.close()

async def create_tables(bind=None):
    """Create every table registered on Base (safe - skips existing)"""
    from sparse_evolve import models  # noqa: F401  registers the tables

    async with (bind or engine).begin() as conn:
        await conn.run_sync(Base.metadata.create_all)
