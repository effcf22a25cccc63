"""
Domain models, dataset loading and measured-run ingestion.
"""
