from fastapi import APIRouter
from sparse_evolve.api import (
    calculus,
    census,
    expectation,
    runs,
)

api_router = APIRouter()
api_router.include_router(calculus.router, prefix="/calculus", tags=["calculus"])
api_router.include_router(census.router, prefix="/census", tags=["census"])
api_router.include_router(expectation.router, prefix="/expectation", tags=["expectation"])
api_router.include_router(runs.router, prefix="/runs", tags=["runs"])
