"""Iterative roots of self-maps."""
