"""Data processing for the retargeting pipeline."""
