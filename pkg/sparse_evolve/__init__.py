"""Evolving sparse random graph lab."""
