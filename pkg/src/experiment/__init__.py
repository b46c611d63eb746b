"""Experiment runner: datasets, training, evaluation and complexity reports."""
