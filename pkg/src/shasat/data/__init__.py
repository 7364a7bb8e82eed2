"""Bundled starting points."""
