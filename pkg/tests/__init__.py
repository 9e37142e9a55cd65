"""Tests for the pyrope library."""
