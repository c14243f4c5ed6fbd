"""Tests for the qpcd package."""
