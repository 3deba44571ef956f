"""Evaluation of trained retargeting models."""
