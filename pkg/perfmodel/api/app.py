"""FastAPI application exposing the performance model."""

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from perfmodel import __version__
from perfmodel.api.routes import router as api_router
from perfmodel.utils.config import get_config

SERVICE_NAME = "CNN Performance Model API"

app = FastAPI(
    title=SERVICE_NAME,
    description="Training-time predictions for CNNs on many-core processors",
    version=__version__,
)

# Read-only: predictions are computed, nothing is stored.
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(api_router)


@app.get("/")
async def root():
    """Service name, version and the model settings requests are answered with."""
    model = get_config()["model"]
    return {
        "name": SERVICE_NAME,
        "version": __version__,
        "status": "online",
        "preset": model["preset"],
        "chunk_mode": model["chunk_mode"],
        "docs": "/docs",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy"}
