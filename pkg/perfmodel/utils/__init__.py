"""Configuration, logging and output rendering."""
