"""Sphinx documentation configuration package for layered-gsm."""
