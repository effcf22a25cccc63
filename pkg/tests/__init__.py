"""Test package for the CNN performance model."""
