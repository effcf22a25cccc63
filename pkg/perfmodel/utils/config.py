"""Configuration utilities for the CNN performance model."""

import os
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Base directories
BASE_DIR = Path(__file__).resolve().parent.parent.parent
DATA_DIR = Path(os.getenv("PERFMODEL_DATA_DIR", str(BASE_DIR / "data")))
ARCHITECTURES_DIR = DATA_DIR / "architectures"
DATASET_FILE = DATA_DIR / "paper_dataset.json"

# Model defaults
DEFAULT_PRESET = os.getenv("PERFMODEL_PRESET", "paper")
DEFAULT_FORMAT = os.getenv("PERFMODEL_FORMAT", "table")
DEFAULT_CHUNK_MODE = os.getenv("PERFMODEL_CHUNK_MODE", "exact")

# Logging
LOG_LEVEL = os.getenv("PERFMODEL_LOG_LEVEL", "WARNING")

# API configuration
API_HOST = os.getenv("API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("API_PORT", "8000"))
API_DEBUG = os.getenv("API_DEBUG", "False").lower() in ("true", "1", "t")


def get_config() -> Dict[str, Any]:
    """Get the application configuration as a dictionary.

    Returns:
        Dictionary containing all configuration values
    """
    return {
        "paths": {
            "base_dir": str(BASE_DIR),
            "data_dir": str(DATA_DIR),
            "dataset_file": str(DATASET_FILE),
            "architectures_dir": str(ARCHITECTURES_DIR),
        },
        "model": {
            "preset": DEFAULT_PRESET,
            "format": DEFAULT_FORMAT,
            "chunk_mode": DEFAULT_CHUNK_MODE,
        },
        "logging": {
            "level": LOG_LEVEL,
        },
        "api": {
            "host": API_HOST,
            "port": API_PORT,
            "debug": API_DEBUG,
        },
    }
