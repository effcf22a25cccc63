"""Server module to run the FastAPI application."""

import uvicorn

from perfmodel.utils.config import API_DEBUG, API_HOST, API_PORT


def run_server(
    host: str = API_HOST,
    port: int = API_PORT,
    reload: bool = API_DEBUG,
    log_level: str = "info",
) -> None:
    """Run the API with uvicorn.

    Args:
        host: Interface to bind
        port: Port to bind
        reload: Restart on code changes
        log_level: uvicorn log level
    """
    uvicorn.run(
        "perfmodel.api.app:app",
        host=host,
        port=port,
        reload=reload,
        log_level=log_level.lower(),
    )


if __name__ == "__main__":
    run_server()
