from contextlib import asynccontextmanager
import logging
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from sparse_evolve.api.api import api_router
from sparse_evolve.core.config import settings
from sparse_evolve.core.database import create_tables
from sparse_evolve.core.exceptions import LabError
from sparse_evolve.utils.response import APIResponse

logger = logging.getLogger("uvicorn.error")

@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup
    await create_tables()
    logger.info(f"{settings.PROJECT_NAME} ready (build {settings.BUILD_TAG})")
    yield

app = FastAPI(
    title=settings.PROJECT_NAME,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    lifespan=lifespan
)

@app.exception_handler(LabError)
async def lab_error_handler(request: Request, exc: LabError) -> JSONResponse:
    logger.warning(f"{request.url.path}: {exc.detail}")
    body = APIResponse(success=False, message=exc.detail, data=exc.to_dict())
    return JSONResponse(status_code=exc.status_code, content=body.model_dump())

app.include_router(api_router, prefix=settings.API_V1_STR)

@app.get("/")
async def root():
    return {"message": f"Welcome to {settings.PROJECT_NAME}", "build": settings.BUILD_TAG}
