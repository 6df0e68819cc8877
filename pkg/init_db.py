"""
Database initialization script
Creates the experiment run tables
"""
import asyncio
from sparse_evolve.core.database import create_tables


async def init_db():
    """Initialize database with all tables"""
    await create_tables()


if __name__ == "__main__":
    asyncio.run(init_db())
    print("✅ Database initialized successfully!")
