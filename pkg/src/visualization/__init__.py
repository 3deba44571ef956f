"""Rendering of clips and training curves."""
