from typing import Optional
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    PROJECT_NAME: str = "Sparse Evolve Lab"
    API_V1_STR: str = "/api/v1"
    LOG_LEVEL: str = "INFO"

    DATABASE_URL: str = "sqlite+aiosqlite:///./sparse_evolve.db"
    DATABASE_ECHO: bool = False

    # Default for --threads
    SPARSE_EVOLVE_THREADS: int = 1

    # Opaque build identifier embedded into every experiment report,
    # e.g. the output of `git describe --always --dirty`
    BUILD_TAG: str = "unknown"

    # Exhaustive subset searches are exponential in the extension size
    SUBSET_SEARCH_LIMIT: int = 16
    # r and t bound for irregular vertices, weak closures and genericity
    CENSUS_SOFT_LIMIT: int = 6
    # Closed-form expectations sum over n! orderings
    MAX_ORDERINGS_ORDER: int = 8
    # n! * n * (T - tau0) terms for the exact oracle
    ORACLE_WORK_BUDGET: int = 5_000_000
    GENERICITY_CANDIDATE_CAP: int = 10_000

    MP_DPS: int = 50

    RECORD_RUNS: bool = True
    RECORD_TIMINGS: bool = False

    @field_validator("SPARSE_EVOLVE_THREADS", mode="before")
    def default_threads(cls, v: Optional[str]) -> int:
        if v in (None, ""):
            return 1
        threads = int(v)
        if threads < 1:
            raise ValueError("SPARSE_EVOLVE_THREADS must be >= 1")
        return threads

    model_config = SettingsConfigDict(case_sensitive=True, env_file=".env", extra="ignore")

settings = Settings()
