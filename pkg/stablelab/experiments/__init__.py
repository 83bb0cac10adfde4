"""Experiment configuration, dispatch and reporting."""
