"""HTTP API for the CNN performance model."""
