# app/main.py
# Start the API using uvicorn app.main:app --reload --host 0.0.0.0
import logging
import time
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.routing import APIRoute

from app.api import planning as planning_router
from app.api import runs as runs_router
from app.core.config import settings
from app.core.logging_utils import configure_logging_from_file

_api_stats = {"total_requests": 0, "errors_5xx": 0, "slowest_ms": 0.0}

# Configure logging when the module is loaded; the queue listener is stopped at exit.
configure_logging_from_file()
logger = logging.getLogger("app.main")  # Logger for this module


async def metrics_middleware(request: Request, call_next):
    _api_stats["total_requests"] += 1
    start_time = time.time()
    try:
        response = await call_next(request)
        if response.status_code >= 500:
            _api_stats["errors_5xx"] += 1
        return response
    except Exception as e:
        _api_stats["errors_5xx"] += 1
        logger.critical(f"Unhandled exception on {request.url.path}: {e}", exc_info=True)
        raise e
    finally:
        elapsed_ms = (time.time() - start_time) * 1000
        _api_stats["slowest_ms"] = max(_api_stats["slowest_ms"], elapsed_ms)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Application startup sequence initiated...")
    logger.info(f"Scenarios served from {settings.SCENARIO_DIR}")
    yield
    logger.info(
        f"Application shutdown: {_api_stats['total_requests']} requests, {_api_stats['errors_5xx']} server errors"
    )


app = FastAPI(
    title=settings.PROJECT_NAME,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    lifespan=lifespan,
)
app.middleware("http")(metrics_middleware)

app.include_router(runs_router.router, prefix=settings.API_V1_STR, tags=["Runs"])
app.include_router(planning_router.router, prefix=settings.API_V1_STR, tags=["Planning"])

logger.info("--- FastAPI Registered Routes ---")
for route in app.routes:
    if isinstance(route, APIRoute):
        logger.info(f"Path: {route.path}, Methods: {route.methods}, Name: {route.name}")
logger.info("--- End Registered Routes ---")


@app.get("/health", tags=["Health Check"])
async def health_check():
    return {"status": "healthy", "project": settings.PROJECT_NAME, "requests": _api_stats["total_requests"]}
