import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from .config import settings
from .logging_setup import configure_logging
from .models import HealthResponse
from .routers import abar, arthur, corank, ems, packets

"""
FastAPI main application entry point.
HTTP surface over the arthurkit engine; the same operations as the CLI.
"""

configure_logging()

logger = logging.getLogger(__name__)

# --- Sentry error tracking (opt-in via ARTHURKIT_SENTRY_DSN) ---
if settings.sentry_dsn:
    import sentry_sdk

    sentry_sdk.init(
        dsn=settings.sentry_dsn,
        traces_sample_rate=0.0 if settings.debug else settings.sentry_traces_sample_rate,
        send_default_pii=False,
        environment="development" if settings.debug else "production",
        release=settings.version,
    )
    logger.info(
        "Sentry initialized (environment=%s)",
        "development" if settings.debug else "production",
    )


# Lifespan context manager
@asynccontextmanager
async def lifespan(_: FastAPI):
    """Handle startup and shutdown events."""
    logger.info("Starting arthurkit API %s", settings.version)
    logger.info("Node budget %d, %d worker thread(s)", settings.node_budget, settings.threads)
    if settings.oracle_file:
        logger.info("Default wall table: %s", settings.oracle_file)

    yield

    logger.info("Shutting down arthurkit API...")


# Create FastAPI app
app = FastAPI(
    title="arthurkit",
    description="Extended multi-segments, local Arthur packets and Π_Ā regions for Sp(2n) and SO(2n+1).",
    version=settings.version,
    debug=settings.debug,
    lifespan=lifespan,
)

# Include routers
app.include_router(ems.router)
app.include_router(packets.router)
app.include_router(arthur.router)
app.include_router(corank.router)
app.include_router(abar.router)

# --- Prometheus metrics (opt-in via ARTHURKIT_ENABLE_PROMETHEUS) ---
if settings.enable_prometheus:
    from prometheus_fastapi_instrumentator import Instrumentator

    Instrumentator(
        should_group_status_codes=False,
        should_ignore_untemplated=True,
        excluded_handlers=["/health", "/metrics"],
        inprogress_name="http_requests_inprogress",
        inprogress_labels=True,
    ).instrument(app).expose(app, endpoint="/metrics", include_in_schema=False, should_gzip=True)
    logger.info("Prometheus metrics enabled at /metrics")


# Health check endpoint
@app.get("/health", response_model=HealthResponse)
async def health_check():
    return HealthResponse(status="healthy", version=settings.version)


# Root endpoint
@app.get("/")
async def root():
    """Root endpoint with service information"""
    return {
        "message": "arthurkit",
        "version": settings.version,
        "docs": "/docs",
        "health": "/health",
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "arthurkit.main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=settings.debug,
    )
