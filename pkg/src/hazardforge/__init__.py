"""Hazard-scenario synthesis pipeline and MCQ safety-evaluation harness."""

__version__ = "0.1.0"
