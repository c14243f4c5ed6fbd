"""Tests for export system."""
